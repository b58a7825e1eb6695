//! End-to-end checks of the two worked examples: the quadratic field
//! `x² − 3` with the first family and the cyclic cubic `x³ + x² − 2x − 1`
//! with the second.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::arith::{parse_rational, val, Rational};
use crate::certify::{make_certificate, to_document, verdict_hp, verify_certificate, Certificate, HpVerdict};
use crate::chatelet::{constancy_certificate, invariant_set, ChateletSurface, InvariantValue, SearchBounds};
use crate::construct::{build, example_v1, example_v2, validate, BuildConfig, ConstructionParams};
use crate::error::Result;
use crate::fields::NumberField;
use crate::hilbert::hilbert_symbol;
use crate::place::Place;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleReport {
    pub name: String,
    pub checks: Vec<Check>,
    /// Parameters the builder chooses on the same field and S.
    pub rebuilt: Option<ConstructionParams>,
    #[serde(skip)]
    pub certificate: Option<Certificate>,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

fn q(s: &str) -> Rational {
    parse_rational(s).expect("literal")
}

fn set_str(s: &BTreeSet<InvariantValue>) -> String {
    let parts: Vec<String> = s.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

fn places_str(s: &[Place]) -> String {
    let parts: Vec<String> = s.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

fn invariants_at(surface: &ChateletSurface, v: &Place) -> Result<BTreeSet<InvariantValue>> {
    Ok(invariant_set(surface, v, &SearchBounds::default())?.values)
}

fn common(cp: &ConstructionParams, checks: &mut Checks, cases: usize) -> Result<Option<Certificate>> {
    let surface = cp.surface()?;
    let report = validate(cp);
    let failed: Vec<String> = report.failures().iter().map(|h| h.condition.clone()).collect();
    checks.add(
        "parameter validation",
        report.passed(),
        format!("{} conditions, failures: {:?}", report.checks.len(), failed),
    );
    match constancy_certificate(&surface, &cp.params) {
        Ok(rules) => checks.add(
            "rule certificate",
            rules.len() == cases && rules.iter().all(|r| r.passed()),
            format!("{} cases passed", rules.len()),
        ),
        Err(e) => checks.add("rule certificate", false, e.to_string()),
    }
    match make_certificate(&surface, cp) {
        Ok(cert) => {
            let doc = to_document(&cert)?;
            let verified = verify_certificate(&doc)?;
            checks.add(
                "certificate re-verification",
                verified.ok,
                format!("{} mismatches", verified.mismatches.len()),
            );
            Ok(Some(cert))
        }
        Err(e) => {
            checks.add("certificate", false, e.to_string());
            Ok(None)
        }
    }
}

fn rebuild(cp: &ConstructionParams, checks: &mut Checks) -> Option<ConstructionParams> {
    match build(cp.params.kind, &cp.field, &cp.params.s, &BuildConfig::default()) {
        Ok((_, built)) => {
            let ok = validate(&built).passed();
            let p = &built.params;
            checks.add(
                "builder on the same field and S",
                ok,
                format!("a = {}, b = {}, c = {}, v1 = {}, v2 = {}", p.a, p.b, p.c, p.v1, p.v2),
            );
            Some(built)
        }
        Err(e) => {
            checks.add("builder on the same field and S", false, e.to_string());
            None
        }
    }
}

pub fn check_first_example() -> Result<ExampleReport> {
    let cp = example_v1();
    let p = &cp.params;
    let mut checks = Checks(Vec::new());
    checks.add(
        "parameters",
        p.a == q("73") && p.b == q("1/73") && p.c == q("99") && p.s == [Place::Finite(73)] && (p.v1, p.v2) == (11, 23),
        format!("a = {}, b = {}, c = {}, S = {}, v1 = {}, v2 = {}", p.a, p.b, p.c, places_str(&p.s), p.v1, p.v2),
    );
    let surface = cp.surface()?;
    checks.add(
        "P(x) = (99x^2 + 1)(5428x^2/5329 + 1/5329)",
        surface.q1.lead == q("99")
            && surface.q1.constant == q("1")
            && surface.q2.lead == q("5428/5329")
            && surface.q2.constant == q("1/5329"),
        surface.to_string(),
    );
    let certificate = common(&cp, &mut checks, 6)?;

    let at73 = invariants_at(&surface, &Place::Finite(73))?;
    checks.add(
        "invariant set at 73 is {0, 1/2}",
        at73 == BTreeSet::from([InvariantValue::Zero, InvariantValue::Half]),
        set_str(&at73),
    );
    for v in [Place::Real].into_iter().chain([2u64, 3, 5, 7, 11, 23, 29, 97].map(Place::Finite)) {
        let got = invariants_at(&surface, &v)?;
        checks.add(
            format!("invariant set at {v} is {{0}}"),
            got == BTreeSet::from([InvariantValue::Zero]),
            set_str(&got),
        );
    }
    let rebuilt = rebuild(&cp, &mut checks);
    let report = ExampleReport {
        name: "first family over Q(sqrt 3), S = {73}".into(),
        checks: checks.0,
        rebuilt,
        certificate,
    };
    Ok(report)
}

pub fn check_second_example() -> Result<ExampleReport> {
    let cp = example_v2();
    let p = &cp.params;
    let (a, b, c) = (&p.a, &p.b, &p.c);
    let mut checks = Checks(Vec::new());
    checks.add(
        "parameters",
        *a == q("377") && *b == q("5") && *c == q("878755181") && p.s == [Place::Finite(13)] && (p.v1, p.v2) == (43, 41),
        format!("a = {a}, b = {b}, c = {c}, S = {}, v1 = {}, v2 = {}", places_str(&p.s), p.v1, p.v2),
    );
    checks.add(
        "S' = {13, 29}, S'' = {5}",
        p.s_prime == [Place::Finite(13), Place::Finite(29)] && p.s_dprime == [Place::Finite(5)],
        format!("S' = {}, S'' = {}", places_str(&p.s_prime), places_str(&p.s_dprime)),
    );
    let surface = cp.surface()?;
    checks.add(
        "P(x) = (x^2 - 878755181)(5x^2 - 4393775906)",
        surface.q1.lead == q("1")
            && surface.q1.constant == q("-878755181")
            && surface.q2.lead == q("5")
            && surface.q2.constant == q("-4393775906"),
        surface.to_string(),
    );
    let bc1 = b * c + q("1");
    for (prime, want) in [(13u64, 3i64), (29, 3), (41, 1)] {
        let got = val(&bc1, prime);
        checks.add(format!("v_{prime}(bc+1) = {want}"), got == want, got.to_string());
    }
    checks.add("v_43(c) = 1", val(c, 43) == 1, val(c, 43).to_string());
    let s13 = hilbert_symbol(a, b, &Place::Finite(13))?;
    checks.add("(377, 5)_13 = -1", s13.value() == -1, s13.to_string());
    let s5 = hilbert_symbol(a, c, &Place::Finite(5))?;
    checks.add("(377, c)_5 = +1", s5.value() == 1, s5.to_string());

    let certificate = common(&cp, &mut checks, 7)?;
    let at13 = invariants_at(&surface, &Place::Finite(13))?;
    checks.add(
        "invariant set at 13 is {1/2}",
        at13 == BTreeSet::from([InvariantValue::Half]),
        set_str(&at13),
    );
    if let Some(cert) = &certificate {
        checks.add(
            "reciprocity sum is 1/2",
            cert.reciprocity_sum == InvariantValue::Half,
            cert.reciprocity_sum.to_string(),
        );
        for field in [NumberField::rationals(), cp.field.clone()] {
            let verdict = verdict_hp(cert, &field)?;
            checks.add(
                format!("Hasse-principle verdict over Q[x]/({field})"),
                verdict.hp == HpVerdict::HPCounterexample,
                format!("{:?}, {} places above S", verdict.hp, verdict.s_count),
            );
        }
    }
    let rebuilt = rebuild(&cp, &mut checks);
    Ok(ExampleReport {
        name: "second family over the cubic field of conductor 7, S = {13}".into(),
        checks: checks.0,
        rebuilt,
        certificate,
    })
}

pub fn check_worked_examples() -> Result<Vec<ExampleReport>> {
    Ok(vec![check_first_example()?, check_second_example()?])
}
