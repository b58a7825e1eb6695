//! One line per acceptance criterion. Exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chatelet::arith::{rat, ratio, Rational};
use chatelet::certify::{make_certificate, to_document, verdict_hp, verify_certificate, HpVerdict, WaVerdict};
use chatelet::chatelet::{constancy_certificate, InvariantValue, Kind, Parameters};
use chatelet::construct::{build, example_v1, example_v2, validate, BuildConfig, ConstructionParams};
use chatelet::fields::NumberField;
use chatelet::hilbert::{hilbert_symbol, symbol_support};
use chatelet::worked::{check_first_example, check_second_example, ExampleReport};
use chatelet::{Error, Place};

use common::brute_hilbert;

const FIRST_EXAMPLE_LIMIT: Duration = Duration::from_secs(5);
const SECOND_EXAMPLE_LIMIT: Duration = Duration::from_secs(5);
const HILBERT_ORACLE_LIMIT: Duration = Duration::from_secs(60);
const PRODUCT_FORMULA_LIMIT: Duration = Duration::from_secs(10);
const ROUND_TRIP_LIMIT: Duration = Duration::from_secs(60);

const HILBERT_RANGE: i64 = 30;
const ORACLE_PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
const PRODUCT_PAIRS: usize = 1000;
const HEIGHT: i64 = 1_000_000;
const LEMMA_TRIALS: usize = 500;
const MIN_FAULTS: usize = 10;
const SEED: u64 = 0x5eed_c4a7;

struct Outcome {
    passed: bool,
    detail: String,
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    match limit {
        Some(l) => {
            out.detail = format!("{}; {:.2}s (limit {}s)", out.detail, elapsed.as_secs_f64(), l.as_secs());
            out.passed &= elapsed <= l;
        }
        None => out.detail = format!("{}; {:.2}s", out.detail, elapsed.as_secs_f64()),
    }
    out
}

fn example(report: chatelet::Result<ExampleReport>) -> Outcome {
    match report {
        Ok(r) => {
            let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            Outcome {
                passed: r.passed(),
                detail: format!("{} checks, failed: {:?}", r.checks.len(), failed),
            }
        }
        Err(e) => Outcome { passed: false, detail: e.to_string() },
    }
}

fn hilbert_oracle() -> Outcome {
    let mut mismatches = Vec::new();
    let mut count = 0usize;
    let places: Vec<Option<u64>> = std::iter::once(None).chain(ORACLE_PRIMES.iter().copied().map(Some)).collect();
    for a in (-HILBERT_RANGE..=HILBERT_RANGE).filter(|&x| x != 0) {
        for b in (-HILBERT_RANGE..=HILBERT_RANGE).filter(|&x| x != 0) {
            for &p in &places {
                let v = p.map_or(Place::Real, Place::Finite);
                let got = hilbert_symbol(&rat(a), &rat(b), &v).map(|s| s.value());
                count += 1;
                if got != Ok(brute_hilbert(a, b, p)) {
                    mismatches.push(format!("({a},{b})_{v}"));
                }
            }
        }
    }
    Outcome {
        passed: mismatches.is_empty(),
        detail: format!("{count} symbols, {} mismatches {:?}", mismatches.len(), mismatches.iter().take(5).collect::<Vec<_>>()),
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let n: i64 = rng.gen_range(1..=HEIGHT) * if rng.gen_bool(0.5) { 1 } else { -1 };
    ratio(n, rng.gen_range(1..=HEIGHT))
}

fn product_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut bad = Vec::new();
    for _ in 0..PRODUCT_PAIRS {
        let (a, b) = (random_rational(&mut rng), random_rational(&mut rng));
        let mut places: BTreeSet<Place> = match symbol_support(&a, &b) {
            Ok(s) => s,
            Err(e) => {
                bad.push(format!("({a},{b}): {e}"));
                continue;
            }
        };
        places.insert(Place::Real);
        places.insert(Place::Finite(2));
        let product: i8 = places.iter().map(|v| hilbert_symbol(&a, &b, v).map_or(0, |s| s.value())).product();
        if product != 1 {
            bad.push(format!("({a},{b})"));
        }
    }
    Outcome {
        passed: bad.is_empty(),
        detail: format!("{PRODUCT_PAIRS} pairs, {} failures {:?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>()),
    }
}

const LEMMA_PRIMES: [u64; 10] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31];

/// A random rational that is a p-adic unit.
fn random_unit(rng: &mut ChaCha8Rng, p: u64) -> Rational {
    loop {
        let x = random_rational(rng);
        let p = BigInt::from(p);
        if !(x.numer() % &p).is_zero() && !(x.denom() % &p).is_zero() {
            return x;
        }
    }
}

fn p_power(p: u64, e: i32) -> Rational {
    let base = rat(p as i64);
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        Rational::one() / num_traits::pow(base, (-e) as usize)
    }
}

fn lemma_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let mut fails = (0usize, 0usize);
    for _ in 0..LEMMA_TRIALS {
        // units up to even powers of p pair trivially
        let p = LEMMA_PRIMES[rng.gen_range(0..LEMMA_PRIMES.len())];
        let a = random_unit(&mut rng, p) * p_power(p, 2 * rng.gen_range(-2..=2));
        let b = random_unit(&mut rng, p) * p_power(p, 2 * rng.gen_range(-2..=2));
        if hilbert_symbol(&a, &b, &Place::Finite(p)).map(|s| s.value()) != Ok(1) {
            fails.0 += 1;
        }
    }
    for _ in 0..LEMMA_TRIALS {
        // adding a term of strictly larger valuation leaves the symbol unchanged
        let p = LEMMA_PRIMES[rng.gen_range(0..LEMMA_PRIMES.len())];
        let v = Place::Finite(p);
        let a = random_unit(&mut rng, p) * p_power(p, rng.gen_range(-3..=3));
        let vb = rng.gen_range(-3..=3);
        let b = random_unit(&mut rng, p) * p_power(p, vb);
        let c = random_unit(&mut rng, p) * p_power(p, vb + rng.gen_range(1..=4));
        let lhs = hilbert_symbol(&a, &(&b + &c), &v).map(|s| s.value());
        if lhs.is_err() || lhs != hilbert_symbol(&a, &b, &v).map(|s| s.value()) {
            fails.1 += 1;
        }
    }
    Outcome {
        passed: fails == (0, 0),
        detail: format!(
            "{LEMMA_TRIALS} even-valuation trials ({} failures), {LEMMA_TRIALS} dominated-sum trials ({} failures)",
            fails.0, fails.1
        ),
    }
}

fn expected_profile(kind: Kind, in_s: bool) -> BTreeSet<InvariantValue> {
    match (kind, in_s) {
        (Kind::V1, true) => BTreeSet::from([InvariantValue::Zero, InvariantValue::Half]),
        (Kind::V2, true) => BTreeSet::from([InvariantValue::Half]),
        (_, false) => BTreeSet::from([InvariantValue::Zero]),
    }
}

fn round_trip() -> Outcome {
    let cfg = BuildConfig::default();
    let fields: [&[i64]; 4] = [&[-1, 1], &[-3, 0, 1], &[1, 0, 1], &[-1, -2, 1, 1]];
    let mut notes = Vec::new();
    let mut passed = true;
    for coeffs in fields {
        let field = NumberField::from_coeffs(coeffs).expect("irreducible");
        for kind in [Kind::V1, Kind::V2] {
            let label = format!("{kind}/{field}");
            let result = build(kind, &field, &[], &cfg).and_then(|(surface, cp)| {
                let cert = make_certificate(&surface, &cp)?;
                let report = verify_certificate(&to_document(&cert)?)?;
                Ok((cp, cert, report))
            });
            match result {
                Ok((cp, cert, report)) => {
                    let profile_ok = cert
                        .places
                        .iter()
                        .all(|r| r.invariants == expected_profile(kind, cp.params.s.contains(&r.place)));
                    let ok = report.ok && profile_ok && cp.params.s.len() == 1;
                    passed &= ok;
                    notes.push(format!("{label} S={} {}", cp.params.s[0], if ok { "ok" } else { "BAD" }));
                }
                Err(e) => {
                    passed = false;
                    notes.push(format!("{label}: {e}"));
                }
            }
        }
    }
    Outcome { passed, detail: notes.join(", ") }
}

fn verdict_parity() -> Outcome {
    let field = NumberField::from_coeffs(&[-3, 0, 1]).expect("irreducible");
    let result = build(Kind::V2, &field, &[Place::Finite(11)], &BuildConfig::default()).and_then(|(surface, cp)| {
        let cert = make_certificate(&surface, &cp)?;
        Ok((verdict_hp(&cert, &NumberField::rationals())?, verdict_hp(&cert, &field)?))
    });
    match result {
        Ok((over_q, over_l)) => Outcome {
            passed: over_q.hp == HpVerdict::HPCounterexample
                && over_l.hp == HpVerdict::HasRationalPoint
                && over_l.wa == WaVerdict::SatisfiesWA
                && over_q.s_count == 1
                && over_l.s_count == 2,
            detail: format!(
                "Q: {:?} ({} place above S), L: {:?}/{:?} ({} places above S)",
                over_q.hp, over_q.s_count, over_l.hp, over_l.wa, over_l.s_count
            ),
        },
        Err(e) => Outcome { passed: false, detail: e.to_string() },
    }
}

struct Fault {
    name: &'static str,
    condition: &'static str,
    cp: ConstructionParams,
}

fn with_params(
    base: ConstructionParams,
    edit: impl FnOnce(&mut Rational, &mut Rational, &mut Rational, &mut Vec<Place>, &mut u64, &mut u64),
) -> ConstructionParams {
    let p = &base.params;
    let (mut a, mut b, mut c, mut s, mut v1, mut v2) = (p.a.clone(), p.b.clone(), p.c.clone(), p.s.clone(), p.v1, p.v2);
    edit(&mut a, &mut b, &mut c, &mut s, &mut v1, &mut v2);
    ConstructionParams {
        params: Parameters::new(p.kind, a, b, c, &s, v1, v2).expect("nonzero"),
        field: base.field,
    }
}

fn faults() -> Vec<Fault> {
    let v1 = example_v1;
    let v2 = example_v2;
    let mut tampered = v2();
    tampered.params.s_prime = vec![Place::Finite(13)];
    vec![
        Fault { name: "v1 c = 98", condition: "(a,c)_73 = -1", cp: with_params(v1(), |_, _, c, _, _, _| *c = rat(98)) },
        Fault { name: "v1 b = 1", condition: "v_73(b) = -v_73(a)", cp: with_params(v1(), |_, b, _, _, _, _| *b = rat(1)) },
        Fault { name: "v1 c = 1089", condition: "v_11(c) = 1", cp: with_params(v1(), |_, _, c, _, _, _| *c = rat(1089)) },
        Fault { name: "v1 v2 = 13", condition: "v_13(1 + cb^2) = 1", cp: with_params(v1(), |_, _, _, _, _, q| *q = 13) },
        Fault { name: "v1 a = 219", condition: "a is a square in Q_2", cp: with_params(v1(), |a, _, _, _, _, _| *a = rat(219)) },
        Fault { name: "v1 c = 99/5", condition: "c ∈ Z[1/2]", cp: with_params(v1(), |_, _, c, _, _, _| *c = ratio(99, 5)) },
        Fault { name: "v1 c = 99*73", condition: "v_73(c) = 0", cp: with_params(v1(), |_, _, c, _, _, _| *c = rat(99 * 73)) },
        Fault {
            name: "v1 b = 1/219",
            condition: "b ∈ Z[1/2, 1/p : p ∈ S]",
            cp: with_params(v1(), |_, b, _, _, _, _| *b = ratio(1, 219)),
        },
        Fault { name: "v2 b = 3", condition: "(a,b)_13 = -1", cp: with_params(v2(), |_, b, _, _, _, _| *b = rat(3)) },
        Fault {
            name: "v2 c + 1",
            condition: "v_41(bc+1) = 1",
            cp: with_params(v2(), |_, _, c, _, _, _| *c += Rational::one()),
        },
        Fault { name: "v2 v1 = 47", condition: "v_47(c) = 1", cp: with_params(v2(), |_, _, _, _, q, _| *q = 47) },
        Fault { name: "v2 a = 1131", condition: "a is a square in Q_2", cp: with_params(v2(), |a, _, _, _, _, _| *a = rat(1131)) },
        Fault {
            name: "v2 S = {13, 29}",
            condition: "(a,b)_29 = -1",
            cp: with_params(v2(), |_, _, _, s, _, _| s.push(Place::Finite(29))),
        },
        Fault { name: "v2 S' tampered", condition: "S' matches a", cp: tampered },
    ]
}

fn fault_injection() -> Outcome {
    let list = faults();
    let mut caught = 0usize;
    let mut missed = Vec::new();
    for f in &list {
        let report = validate(&f.cp);
        let validator_hit = report.failures().iter().any(|h| h.condition == f.condition);
        let rule_hit = matches!(
            f.cp.surface().map(|s| constancy_certificate(&s, &f.cp.params)),
            Ok(Err(Error::RuleHypothesisFailed { ref condition, .. })) if condition == f.condition
        );
        let no_certificate = f.cp.surface().and_then(|s| make_certificate(&s, &f.cp)).is_err();
        if (validator_hit || rule_hit) && no_certificate {
            caught += 1;
        } else {
            missed.push(f.name);
        }
    }
    Outcome {
        passed: caught == list.len() && caught >= MIN_FAULTS,
        detail: format!("{caught}/{} faults caught at their condition, missed {:?}", list.len(), missed),
    }
}

fn main() {
    let criteria: Vec<(&str, Outcome)> = vec![
        ("quadratic worked example end to end", timed(Some(FIRST_EXAMPLE_LIMIT), || example(check_first_example()))),
        ("cubic worked example end to end", timed(Some(SECOND_EXAMPLE_LIMIT), || example(check_second_example()))),
        ("Hilbert symbols match brute-force solvability", timed(Some(HILBERT_ORACLE_LIMIT), hilbert_oracle)),
        ("product formula on random pairs", timed(Some(PRODUCT_FORMULA_LIMIT), product_formula)),
        ("even-valuation and dominated-sum symbol suites", timed(None, lemma_suites)),
        ("construct/certify/verify round trip", timed(Some(ROUND_TRIP_LIMIT), round_trip)),
        ("Hasse principle verdict parity", timed(None, verdict_parity)),
        ("single-condition fault injection", timed(None, fault_injection)),
    ];
    let mut failed = 0;
    for (i, (name, out)) in criteria.iter().enumerate() {
        println!("{} [{}] {name}: {}", if out.passed { "PASS" } else { "FAIL" }, i + 1, out.detail);
        failed += usize::from(!out.passed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
