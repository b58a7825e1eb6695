use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use chatelet::arith::parse_rational;
use chatelet::certify::{make_certificate, parse_document, to_document, verdict_hp, verdict_wa, verify_certificate};
use chatelet::chatelet::{classify_place, claimed_invariants, invariant_set, Kind, SearchBounds};
use chatelet::construct::{build, BuildConfig};
use chatelet::fields::NumberField;
use chatelet::hilbert::hilbert_symbol;
use chatelet::worked::check_worked_examples;
use chatelet::{parse_place_list, Error, Place};

#[derive(Parser)]
#[command(name = "chatelet", version, about = "Construct and certify Chatelet surfaces over Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hilbert symbol (a, b)_v.
    #[command(allow_negative_numbers = true)]
    Hilbert {
        a: String,
        b: String,
        #[arg(long)]
        place: String,
    },
    /// Build a surface and print its certificate.
    Construct {
        #[arg(long)]
        kind: String,
        /// Coefficients constant term first, e.g. "-3,0,1".
        #[arg(long, allow_hyphen_values = true)]
        minpoly: String,
        #[arg(long = "S", default_value = "")]
        s: String,
    },
    /// Invariant set and witnesses at one place.
    Invariants {
        #[arg(long)]
        cert: String,
        #[arg(long)]
        place: String,
    },
    /// Hasse-principle or weak-approximation verdict.
    Verdict {
        #[arg(long)]
        cert: String,
        #[arg(long, allow_hyphen_values = true)]
        subfield: Option<String>,
        #[arg(long)]
        off: Option<String>,
    },
    /// Re-verify a certificate from scratch.
    Verify {
        #[arg(long)]
        cert: String,
    },
    /// Check the two worked examples end to end.
    VerifyPaperExamples,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SolverExhausted(_) | Error::Exhausted(_) => 3,
        Error::Parse(_) => 4,
        _ => 2,
    }
}

fn read(path: &str) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

/// Writes a line to stdout, ignoring a closed pipe.
fn emit(line: impl std::fmt::Display) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value")
}

fn run(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::Hilbert { a, b, place } => {
            let v: Place = place.parse()?;
            emit(hilbert_symbol(&parse_rational(&a)?, &parse_rational(&b)?, &v)?);
        }
        Command::Construct { kind, minpoly, s } => {
            let kind: Kind = kind.parse()?;
            let field = NumberField::parse(&minpoly)?;
            let s = parse_place_list(&s)?;
            let (surface, cp) = build(kind, &field, &s, &BuildConfig::from_env())?;
            emit(to_document(&make_certificate(&surface, &cp)?)?);
        }
        Command::Invariants { cert, place } => {
            let cert = parse_document(&read(&cert)?)?;
            let v: Place = place.parse()?;
            let out = match cert.record(&v) {
                Some(r) => serde_json::to_value(r).map_err(|e| Error::Parse(e.to_string()))?,
                None => {
                    let p = &cert.construction.params;
                    let class = classify_place(&v, &p.a, &p.b, &p.s, p.kind)?;
                    let found = invariant_set(&cert.surface, &v, &SearchBounds::default())?;
                    json!({
                        "place": v,
                        "class": class,
                        "claimed": claimed_invariants(p.kind, class),
                        "invariants": found.values,
                        "witnesses": found.witnesses,
                    })
                }
            };
            emit(pretty(&out));
        }
        Command::Verdict { cert, subfield, off } => {
            let cert = parse_document(&read(&cert)?)?;
            let field = match subfield {
                Some(s) => NumberField::parse(&s)?,
                None => NumberField::rationals(),
            };
            let verdict = match cert.kind {
                Kind::V1 => verdict_wa(&cert, &field, &parse_place_list(off.as_deref().unwrap_or(""))?)?,
                Kind::V2 => verdict_hp(&cert, &field)?,
            };
            emit(pretty(&serde_json::to_value(verdict).map_err(|e| Error::Parse(e.to_string()))?));
        }
        Command::Verify { cert } => {
            let report = verify_certificate(&read(&cert)?)?;
            emit(pretty(&serde_json::to_value(&report).map_err(|e| Error::Parse(e.to_string()))?));
            return Ok(if report.ok { 0 } else { 4 });
        }
        Command::VerifyPaperExamples => {
            let mut all = true;
            for report in check_worked_examples()? {
                emit(format!("== {}", report.name));
                for c in &report.checks {
                    emit(format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
                }
                all &= report.passed();
            }
            return Ok(if all { 0 } else { 2 });
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
