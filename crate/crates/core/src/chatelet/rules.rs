use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{s_dprime_of, s_prime_of, ChateletSurface, InvariantValue, Kind, Parameters};
use crate::arith::{denominator_supported_on, is_rational_square, odd_support, square_class_test, val, Rational};
use crate::error::{Error, Result};
use crate::hilbert::hilbert_symbol;
use crate::place::Place;

/// The classes of places the prover reasons about; they partition all places
/// of Q for fixed `(a, b, S)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PlaceClass {
    /// Real place outside S′, or the prime 2: `a` is a local square.
    InfMinusSPrimeOr2adic,
    SPrimeMinusSArch,
    SPrimeMinusSFinite,
    /// Odd primes outside S′ (and, for the second family, outside S″).
    OutsideSPrimeFinite,
    SArch,
    SFinite,
    /// Primes of S″ outside S′; second family only.
    SDoublePrime,
}

impl fmt::Display for PlaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlaceClass::InfMinusSPrimeOr2adic => "InfMinusSPrime_or_2adic",
            PlaceClass::SPrimeMinusSArch => "SPrimeMinusS_Arch",
            PlaceClass::SPrimeMinusSFinite => "SPrimeMinusS_Finite",
            PlaceClass::OutsideSPrimeFinite => "OutsideSPrime_Finite",
            PlaceClass::SArch => "S_Arch",
            PlaceClass::SFinite => "S_Finite",
            PlaceClass::SDoublePrime => "SDoublePrime",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub condition: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conclusion {
    /// `None` when the case says nothing about local points.
    pub solvable: Option<bool>,
    pub invariant_claim: BTreeSet<InvariantValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleOutcome {
    pub place_class: PlaceClass,
    pub case_id: String,
    /// Explicit members; the class of remaining odd primes lists none.
    pub members: Vec<Place>,
    pub covers_remaining: bool,
    pub hypotheses: Vec<Hypothesis>,
    pub conclusion: Option<Conclusion>,
    pub note: Option<String>,
}

impl RuleOutcome {
    pub fn passed(&self) -> bool {
        self.conclusion.is_some()
    }

    pub fn first_failure(&self) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| !h.holds)
    }
}

pub fn classify_place(v: &Place, a: &Rational, b: &Rational, s: &[Place], kind: Kind) -> Result<PlaceClass> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument);
    }
    if is_rational_square(a) {
        return Err(Error::SquareA);
    }
    let s_prime = s_prime_of(a)?;
    Ok(match v {
        Place::Real if s.contains(v) => PlaceClass::SArch,
        Place::Real if s_prime.contains(v) => PlaceClass::SPrimeMinusSArch,
        Place::Real | Place::Finite(2) => PlaceClass::InfMinusSPrimeOr2adic,
        Place::Finite(_) if s.contains(v) => PlaceClass::SFinite,
        Place::Finite(_) if s_prime.contains(v) => PlaceClass::SPrimeMinusSFinite,
        Place::Finite(p) if kind == Kind::V2 && val(b, *p) != 0 => PlaceClass::SDoublePrime,
        Place::Finite(_) => PlaceClass::OutsideSPrimeFinite,
    })
}

/// The invariant set each family realizes on a class.
pub fn claimed_invariants(kind: Kind, class: PlaceClass) -> BTreeSet<InvariantValue> {
    use InvariantValue::{Half, Zero};
    match (kind, class) {
        (Kind::V1, PlaceClass::SArch | PlaceClass::SFinite) => BTreeSet::from([Zero, Half]),
        (Kind::V2, PlaceClass::SArch | PlaceClass::SFinite) => BTreeSet::from([Half]),
        _ => BTreeSet::from([Zero]),
    }
}

struct Builder<'a> {
    params: &'a Parameters,
    out: Vec<RuleOutcome>,
}

impl Builder<'_> {
    fn push(
        &mut self,
        class: PlaceClass,
        members: Vec<Place>,
        covers_remaining: bool,
        hypotheses: Vec<Hypothesis>,
        note: Option<&str>,
    ) {
        let kind = self.params.kind;
        let vacuous = members.is_empty() && !covers_remaining;
        let ok = hypotheses.iter().all(|h| h.holds);
        self.out.push(RuleOutcome {
            place_class: class,
            case_id: format!("{kind}:{class}"),
            members,
            covers_remaining,
            hypotheses,
            conclusion: ok.then(|| Conclusion {
                solvable: Some(true),
                invariant_claim: claimed_invariants(kind, class),
            }),
            note: if vacuous {
                Some("no places in this class".into())
            } else {
                note.map(str::to_string)
            },
        });
    }
}

fn hyp(condition: impl Into<String>, holds: bool) -> Hypothesis {
    Hypothesis {
        condition: condition.into(),
        holds,
    }
}

fn symbol_at(x: &Rational, y: &Rational, p: u64) -> Result<i8> {
    Ok(hilbert_symbol(x, y, &Place::Finite(p))?.value())
}

fn odd_denominator_primes(x: &Rational) -> Result<Vec<u64>> {
    let inv = Rational::from_integer(x.denom().clone());
    odd_support(&inv)
}

/// Checks every case hypothesis against the parameters. Fails outright only
/// when the surface or the derived sets disagree with the parameters.
pub fn evaluate_rules(surface: &ChateletSurface, params: &Parameters) -> Result<Vec<RuleOutcome>> {
    let setup = |condition: &str| Error::RuleHypothesisFailed {
        case: format!("{}:setup", params.kind),
        condition: condition.into(),
    };
    if params.surface().ok().as_ref() != Some(surface) {
        return Err(setup(&format!("surface matches the {} formula in (a, b, c)", params.kind)));
    }
    if params.s_prime != s_prime_of(&params.a)? {
        return Err(setup("S' = {real if a < 0} ∪ {odd p : v_p(a) odd}"));
    }
    if params.s_dprime != s_dprime_of(&params.b)? {
        return Err(setup("S'' = {odd p : v_p(b) ≠ 0}"));
    }
    if params.s.contains(&Place::Finite(2)) {
        return Err(setup("2 ∉ S"));
    }
    if let Some(v) = params.s.iter().find(|v| !params.s_prime.contains(v)) {
        return Err(setup(&format!("S ⊆ S' (fails at {v})")));
    }

    let (a, b, c) = (&params.a, &params.b, &params.c);
    let s = &params.s;
    let sp = &params.s_prime;
    let mut builder = Builder { params, out: Vec::new() };

    // a is a local square at the real place outside S' and at 2
    let mut members = vec![Place::Finite(2)];
    if !sp.contains(&Place::Real) {
        members.insert(0, Place::Real);
    }
    let mut hs = Vec::new();
    for v in &members {
        hs.push(hyp(format!("a is a square in Q_{v}"), square_class_test(a, v)?));
    }
    builder.push(PlaceClass::InfMinusSPrimeOr2adic, members, false, hs, None);

    let arch_outside: Vec<Place> = sp.iter().filter(|v| v.is_real() && !s.contains(v)).copied().collect();
    let finite_outside: Vec<u64> = sp.iter().filter(|v| !s.contains(v)).filter_map(Place::prime).collect();
    let s_arch: Vec<Place> = s.iter().filter(|v| v.is_real()).copied().collect();
    let s_finite: Vec<u64> = s.iter().filter_map(Place::prime).collect();
    let zero = Rational::zero();
    let one = Rational::one();
    let c_half_integral = hyp("c ∈ Z[1/2]", denominator_supported_on(c, &[2]));

    match params.kind {
        Kind::V1 => {
            let hs = if arch_outside.is_empty() { vec![] } else { vec![hyp("c > 0", c > &zero)] };
            builder.push(PlaceClass::SPrimeMinusSArch, arch_outside, false, hs, None);

            let mut hs = Vec::new();
            for &p in &finite_outside {
                hs.push(hyp(format!("v_{p}(a) = v_{p}(b) > 0"), val(a, p) == val(b, p) && val(a, p) > 0));
                hs.push(hyp(format!("v_{p}(c) ≥ 0"), val(c, p) >= 0));
            }
            let members = finite_outside.iter().map(|&p| Place::Finite(p)).collect();
            builder.push(PlaceClass::SPrimeMinusSFinite, members, false, hs, None);

            let b_denoms = odd_denominator_primes(b)?;
            let hs = vec![
                c_half_integral.clone(),
                hyp(
                    "v_p(b) ≥ 0 for every odd p ∉ S'",
                    b_denoms.iter().all(|&p| sp.contains(&Place::Finite(p))),
                ),
            ];
            builder.push(PlaceClass::OutsideSPrimeFinite, vec![], true, hs, None);

            let b2 = b * b;
            let hs = if s_arch.is_empty() {
                vec![]
            } else {
                vec![
                    hyp("a < 0", a.is_negative()),
                    hyp("1 + cb^2 < 0", &one + c * &b2 < zero),
                ]
            };
            builder.push(PlaceClass::SArch, s_arch, false, hs, None);

            let mut hs = Vec::new();
            for &p in &s_finite {
                hs.push(hyp(format!("v_{p}(a) odd"), val(a, p) % 2 != 0));
                hs.push(hyp(format!("v_{p}(b) = -v_{p}(a)"), val(b, p) == -val(a, p)));
                hs.push(hyp(format!("v_{p}(c) = 0"), val(c, p) == 0));
                hs.push(hyp(format!("(a,c)_{p} = -1"), symbol_at(a, c, p)? == -1));
            }
            let members = s_finite.iter().map(|&p| Place::Finite(p)).collect();
            builder.push(PlaceClass::SFinite, members, false, hs, None);
        }
        Kind::V2 => {
            let bc1 = b * c + &one;
            let hs = if arch_outside.is_empty() {
                vec![]
            } else {
                vec![hyp("b > 0", b > &zero), hyp("bc + 1 < 0", bc1 < zero)]
            };
            builder.push(PlaceClass::SPrimeMinusSArch, arch_outside, false, hs, None);

            let mut hs = vec![c_half_integral.clone()];
            for &p in &finite_outside {
                hs.push(hyp(format!("v_{p}(b) = 0"), val(b, p) == 0));
                hs.push(hyp(format!("(a,b)_{p} = +1"), val(b, p) == 0 && symbol_at(a, b, p)? == 1));
                hs.push(hyp(format!("v_{p}(c) = 0"), val(c, p) == 0));
                hs.push(hyp(
                    format!("v_{p}(bc+1) = v_{p}(a) + 2 ≥ 3"),
                    val(&bc1, p) == val(a, p) + 2 && val(a, p) >= 1,
                ));
            }
            let members: Vec<Place> = finite_outside.iter().map(|&p| Place::Finite(p)).collect();
            let hs = if members.is_empty() { vec![] } else { hs };
            builder.push(PlaceClass::SPrimeMinusSFinite, members, false, hs, None);

            let dprime: Vec<u64> = params
                .s_dprime
                .iter()
                .filter(|v| !sp.contains(v))
                .filter_map(Place::prime)
                .collect();
            let mut hs = Vec::new();
            for &p in &dprime {
                hs.push(hyp(format!("(a,c)_{p} = +1"), symbol_at(a, c, p)? == 1));
                hs.push(hyp(format!("v_{p}(bc+1) = 0"), val(&bc1, p) == 0));
                hs.push(hyp(format!("v_{p}(a) even"), val(a, p) % 2 == 0));
            }
            let members = dprime.iter().map(|&p| Place::Finite(p)).collect();
            builder.push(PlaceClass::SDoublePrime, members, false, hs, None);

            let hs = vec![
                c_half_integral,
                hyp("b ∈ Z[1/2]", denominator_supported_on(b, &[2])),
            ];
            builder.push(PlaceClass::OutsideSPrimeFinite, vec![], true, hs, None);

            let hs = if s_arch.is_empty() {
                vec![]
            } else {
                vec![
                    hyp("a < 0", a.is_negative()),
                    hyp("b < 0", b.is_negative()),
                    hyp("0 < c < -1/b", c > &zero && b.is_negative() && c < &(-one.clone() / b)),
                ]
            };
            builder.push(
                PlaceClass::SArch,
                s_arch,
                false,
                hs,
                Some("a point with invariant 0 would need x^2 - c > 0, forcing bx^2 - bc - 1 < 0 and (a, bx^2 - bc - 1) = -1"),
            );

            let mut hs = Vec::new();
            for &p in &s_finite {
                hs.push(hyp(format!("v_{p}(a) odd"), val(a, p) % 2 != 0));
                hs.push(hyp(format!("v_{p}(b) = 0"), val(b, p) == 0));
                hs.push(hyp(format!("(a,b)_{p} = -1"), val(b, p) == 0 && symbol_at(a, b, p)? == -1));
                hs.push(hyp(format!("v_{p}(c) = 0"), val(c, p) == 0));
                hs.push(hyp(format!("v_{p}(bc+1) = v_{p}(a) + 2"), val(&bc1, p) == val(a, p) + 2));
            }
            let members = s_finite.iter().map(|&p| Place::Finite(p)).collect();
            builder.push(PlaceClass::SFinite, members, false, hs, None);
        }
    }
    Ok(builder.out)
}

/// Runs [`evaluate_rules`] and fails on the first unmet hypothesis.
pub fn constancy_certificate(surface: &ChateletSurface, params: &Parameters) -> Result<Vec<RuleOutcome>> {
    let outcomes = evaluate_rules(surface, params)?;
    for o in &outcomes {
        if let Some(h) = o.first_failure() {
            return Err(Error::RuleHypothesisFailed {
                case: o.case_id.clone(),
                condition: h.condition.clone(),
            });
        }
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    fn example_v1(c: i64) -> Parameters {
        Parameters::new(Kind::V1, rat(73), ratio(1, 73), rat(c), &[Place::Finite(73)], 11, 23).unwrap()
    }

    fn example_v2() -> Parameters {
        Parameters::new(Kind::V2, rat(377), rat(5), rat(878755181), &[Place::Finite(13)], 43, 41).unwrap()
    }

    #[test]
    fn classification() {
        let s73 = [Place::Finite(73)];
        assert_eq!(
            classify_place(&Place::Finite(73), &rat(73), &ratio(1, 73), &s73, Kind::V1).unwrap(),
            PlaceClass::SFinite
        );
        let s13 = [Place::Finite(13)];
        let c = |v| classify_place(&v, &rat(377), &rat(5), &s13, Kind::V2).unwrap();
        assert_eq!(c(Place::Finite(29)), PlaceClass::SPrimeMinusSFinite);
        assert_eq!(c(Place::Real), PlaceClass::InfMinusSPrimeOr2adic);
        assert_eq!(c(Place::Finite(5)), PlaceClass::SDoublePrime);
        assert_eq!(c(Place::Finite(7)), PlaceClass::OutsideSPrimeFinite);
        assert_eq!(classify_place(&Place::Real, &rat(4), &rat(1), &[], Kind::V1), Err(Error::SquareA));
    }

    #[test]
    fn examples_pass() {
        for p in [example_v1(99), example_v2()] {
            let outcomes = constancy_certificate(&p.surface().unwrap(), &p).unwrap();
            assert!(outcomes.iter().all(RuleOutcome::passed));
        }
        assert_eq!(constancy_certificate(&example_v1(99).surface().unwrap(), &example_v1(99)).unwrap().len(), 6);
        assert_eq!(constancy_certificate(&example_v2().surface().unwrap(), &example_v2()).unwrap().len(), 7);
    }

    #[test]
    fn c98_fails_at_s_finite() {
        let p = example_v1(98);
        let err = constancy_certificate(&p.surface().unwrap(), &p).unwrap_err();
        assert_eq!(
            err,
            Error::RuleHypothesisFailed {
                case: "v1:S_Finite".into(),
                condition: "(a,c)_73 = -1".into()
            }
        );
    }

    #[test]
    fn surface_mismatch_is_rejected() {
        let p = example_v1(99);
        let other = example_v1(101).surface().unwrap();
        assert!(matches!(constancy_certificate(&other, &p), Err(Error::RuleHypothesisFailed { .. })));
    }
}
