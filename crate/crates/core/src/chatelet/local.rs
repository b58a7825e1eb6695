use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{ChateletSurface, EvenQuadratic, InvariantValue, XCoordinate};
use crate::arith::{is_rational_square, legendre_u64, square_class_test, val, Rational};
use crate::error::{Error, Result};
use crate::hilbert::hilbert_symbol;
use crate::place::Place;

/// A local point recorded by its x-coordinate, with the exact symbols
/// `(a, q1(x))_v` and `(a, q2(x))_v` (leading coefficients at infinity);
/// a symbol is absent when the factor vanishes at x.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub x: XCoordinate,
    pub value: InvariantValue,
    pub symbol_q1: Option<i8>,
    pub symbol_q2: Option<i8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    /// Valuation range `[−B, B]`; `None` derives B from the coefficients.
    pub radius: Option<u32>,
    pub unit_bound: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            radius: None,
            unit_bound: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantSet {
    pub values: BTreeSet<InvariantValue>,
    /// One witness per value found, in order of discovery.
    pub witnesses: Vec<Witness>,
}

fn symbol(a: &Rational, t: &Rational, v: &Place) -> Result<Option<i8>> {
    if t.is_zero() {
        return Ok(None);
    }
    Ok(Some(hilbert_symbol(a, t, v)?.value()))
}

/// Evaluates the class at the fiber over `x`; `None` when that fiber has no
/// `Q_v`-point.
pub fn evaluate_witness(surface: &ChateletSurface, v: &Place, x: &XCoordinate) -> Result<Option<Witness>> {
    let a = &surface.a;
    let (t1, t2) = match x {
        XCoordinate::Finite(x) => (surface.q1.eval(x), surface.q2.eval(x)),
        XCoordinate::Infinity => (surface.q1.lead.clone(), surface.q2.lead.clone()),
    };
    let prod = &t1 * &t2;
    if !prod.is_zero() && !hilbert_symbol(a, &prod, v)?.is_plus() {
        return Ok(None);
    }
    let s1 = symbol(a, &t1, v)?;
    let s2 = symbol(a, &t2, v)?;
    let s = s1.or(s2).expect("q1 and q2 have no common root");
    let value = if square_class_test(a, v)? {
        InvariantValue::Zero
    } else {
        InvariantValue::from_symbol_is_plus(s == 1)
    };
    Ok(Some(Witness {
        x: x.clone(),
        value,
        symbol_q1: s1,
        symbol_q2: s2,
    }))
}

/// Local invariant of `(a, q1(x))` at a point of the fiber over `x`.
pub fn evaluate_invariant(surface: &ChateletSurface, v: &Place, x: &XCoordinate) -> Result<InvariantValue> {
    if square_class_test(&surface.a, v)? {
        return Ok(InvariantValue::Zero);
    }
    evaluate_witness(surface, v, x)?
        .map(|w| w.value)
        .ok_or_else(|| Error::NoLocalPointOnFiber {
            place: *v,
            x: x.to_string(),
        })
}

/// A rational `s > 0` with `lo < s² < hi` (`hi = None` for no upper bound).
fn rational_with_square_between(lo: &Rational, hi: Option<&Rational>) -> Rational {
    let Some(hi) = hi else {
        let r = num_integer::Roots::sqrt(&lo.ceil().to_integer());
        return Rational::from_integer(r + 2);
    };
    let mid = (lo + hi) / Rational::from_integer(BigInt::from(2));
    let mut scale = BigInt::one();
    loop {
        let scaled = (&mid * Rational::from_integer(&scale * &scale)).floor().to_integer();
        let s = Rational::new(num_integer::Roots::sqrt(&scaled), scale.clone());
        let sq = &s * &s;
        if sq > *lo && sq < *hi && s.is_positive() {
            return s;
        }
        scale *= 2;
    }
}

/// Sample x in every open interval cut out by the real roots of q1 and q2.
fn real_samples(q1: &EvenQuadratic, q2: &EvenQuadratic) -> Vec<Rational> {
    let mut cuts: Vec<Rational> = [q1.root_square(), q2.root_square()]
        .into_iter()
        .filter(|t| t.is_positive())
        .collect();
    cuts.sort();
    cuts.dedup();
    let zero = Rational::zero();
    let mut out = Vec::new();
    let mut prev = zero;
    for t in &cuts {
        out.push(rational_with_square_between(&prev, Some(t)));
        prev = t.clone();
    }
    out.push(rational_with_square_between(&prev, None));
    let negatives: Vec<Rational> = out.iter().map(|s| -s).collect();
    out.extend(negatives);
    out
}

fn search_radius(surface: &ChateletSurface, p: u64) -> u32 {
    [
        &surface.a,
        &surface.q1.lead,
        &surface.q1.constant,
        &surface.q2.lead,
        &surface.q2.constant,
    ]
    .into_iter()
    .map(|x| val(x, p).unsigned_abs() as u32)
    .max()
    .unwrap_or(0)
        + 2
}

fn unit_representatives(p: u64, bound: u64) -> Vec<u64> {
    if p == 2 {
        return vec![1, 3, 5, 7];
    }
    let mut units: Vec<u64> = (1..=bound.min(p - 1)).collect();
    if p > bound + 1 {
        let n = (2..p)
            .find(|&n| legendre_u64(&BigInt::from(n), p) == -1)
            .expect("odd primes have non-residues");
        if n > bound {
            units.push(n);
        }
    }
    units
}

fn candidates(surface: &ChateletSurface, v: &Place, bounds: &SearchBounds) -> Vec<XCoordinate> {
    let mut out = vec![XCoordinate::Finite(Rational::zero()), XCoordinate::Infinity];
    match v {
        Place::Real => out.extend(real_samples(&surface.q1, &surface.q2).into_iter().map(XCoordinate::Finite)),
        Place::Finite(p) => {
            let radius = bounds.radius.unwrap_or_else(|| search_radius(surface, *p)) as i32;
            let units = unit_representatives(*p, bounds.unit_bound);
            let pb = Rational::from_integer(BigInt::from(*p));
            let mut exponents = vec![0i32];
            for k in 1..=radius {
                exponents.push(-k);
                exponents.push(k);
            }
            for n in exponents {
                let scale = pb.pow(n);
                for &u in &units {
                    let x = Rational::from_integer(BigInt::from(u)) * &scale;
                    out.push(XCoordinate::Finite(x.clone()));
                    out.push(XCoordinate::Finite(-x));
                }
            }
        }
    }
    out
}

/// Searches for a local point; falls back to the root criterion when a
/// factor has an irrational root in `Q_v`.
pub fn local_solvable(surface: &ChateletSurface, v: &Place) -> Result<(bool, Option<XCoordinate>)> {
    for x in candidates(surface, v, &SearchBounds::default()) {
        if evaluate_witness(surface, v, &x)?.is_some() {
            return Ok((true, Some(x)));
        }
    }
    for q in [&surface.q1, &surface.q2] {
        let t = q.root_square();
        if square_class_test(&t, v)? {
            if is_rational_square(&t) {
                let r = Rational::new(
                    num_integer::Roots::sqrt(t.numer()),
                    num_integer::Roots::sqrt(t.denom()),
                );
                return Ok((true, Some(XCoordinate::Finite(r))));
            }
            return Ok((true, None));
        }
    }
    Ok((false, None))
}

/// Invariant values realized by local points found in the bounded search.
pub fn invariant_set(surface: &ChateletSurface, v: &Place, bounds: &SearchBounds) -> Result<InvariantSet> {
    let mut set = InvariantSet {
        values: BTreeSet::new(),
        witnesses: Vec::new(),
    };
    for x in candidates(surface, v, bounds) {
        if let Some(w) = evaluate_witness(surface, v, &x)? {
            if set.values.insert(w.value) {
                set.witnesses.push(w);
            }
            if set.values.len() == 2 {
                break;
            }
        }
    }
    if set.values.is_empty() {
        return Err(Error::NotLocallySolvable(*v));
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};
    use InvariantValue::{Half, Zero};

    fn v1_example() -> ChateletSurface {
        ChateletSurface::v1(&rat(73), &ratio(1, 73), &rat(99)).unwrap()
    }

    fn v2_example() -> ChateletSurface {
        ChateletSurface::v2(&rat(377), &rat(5), &rat(878755181)).unwrap()
    }

    fn fin(x: Rational) -> XCoordinate {
        XCoordinate::Finite(x)
    }

    #[test]
    fn pointwise_invariants() {
        let v1 = v1_example();
        for v in [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(73)] {
            assert_eq!(evaluate_invariant(&v1, &v, &fin(rat(0))).unwrap(), Zero);
        }
        assert_eq!(evaluate_invariant(&v1, &Place::Finite(73), &fin(ratio(1, 73))).unwrap(), Half);
        let v2 = v2_example();
        assert_eq!(evaluate_invariant(&v2, &Place::Finite(13), &fin(rat(13))).unwrap(), Half);
    }

    #[test]
    fn missing_fiber_point_is_an_error() {
        let v2 = v2_example();
        // at 13 the fiber over x = 0 carries (377, c(bc+1))_13 = −1
        assert!(matches!(
            evaluate_invariant(&v2, &Place::Finite(13), &fin(rat(0))),
            Err(Error::NoLocalPointOnFiber { .. })
        ));
    }

    #[test]
    fn solvability() {
        let (ok, x) = local_solvable(&v2_example(), &Place::Finite(13)).unwrap();
        assert!(ok);
        assert!(evaluate_witness(&v2_example(), &Place::Finite(13), &x.unwrap()).unwrap().is_some());
        assert!(evaluate_witness(&v2_example(), &Place::Finite(13), &fin(rat(13))).unwrap().is_some());
        for v in [Place::Real, Place::Finite(2), Place::Finite(73), Place::Finite(11)] {
            assert_eq!(local_solvable(&v1_example(), &v).unwrap(), (true, Some(fin(rat(0)))));
        }
    }

    #[test]
    fn invariant_sets_of_examples() {
        let b = SearchBounds::default();
        let s = invariant_set(&v1_example(), &Place::Finite(73), &b).unwrap();
        assert_eq!(s.values, BTreeSet::from([Zero, Half]));
        assert_eq!(invariant_set(&v1_example(), &Place::Finite(3), &b).unwrap().values, BTreeSet::from([Zero]));
        assert_eq!(invariant_set(&v2_example(), &Place::Finite(13), &b).unwrap().values, BTreeSet::from([Half]));
        assert_eq!(invariant_set(&v2_example(), &Place::Finite(29), &b).unwrap().values, BTreeSet::from([Zero]));
    }

    #[test]
    fn real_place_with_both_values() {
        // a < 0 and c < −1/b²: x large makes cx² + 1 negative
        let v = ChateletSurface::v1(&rat(-7), &rat(1), &rat(-3)).unwrap();
        let s = invariant_set(&v, &Place::Real, &SearchBounds::default()).unwrap();
        assert_eq!(s.values, BTreeSet::from([Zero, Half]));
    }

    #[test]
    fn real_samples_separate_roots() {
        let q1 = EvenQuadratic::new(rat(1), rat(-2)).unwrap();
        let q2 = EvenQuadratic::new(rat(1), rat(-3)).unwrap();
        let s = real_samples(&q1, &q2);
        let pos: Vec<Rational> = s.iter().filter(|x| x.is_positive()).map(|x| x * x).collect();
        assert!(pos[0] < rat(2));
        assert!(pos[1] > rat(2) && pos[1] < rat(3));
        assert!(pos[2] > rat(3));
    }

    #[test]
    fn factor_symbols_agree_on_witnesses() {
        for (surface, places) in [
            (v1_example(), vec![2u64, 3, 5, 7, 11, 23, 73]),
            (v2_example(), vec![2, 3, 5, 13, 29, 41, 43]),
        ] {
            for p in places {
                let v = Place::Finite(p);
                for x in candidates(&surface, &v, &SearchBounds::default()) {
                    if let Some(w) = evaluate_witness(&surface, &v, &x).unwrap() {
                        if let (Some(s1), Some(s2)) = (w.symbol_q1, w.symbol_q2) {
                            assert_eq!(s1, s2, "p = {p}, x = {x}");
                        }
                    }
                }
            }
        }
    }
}
