mod common;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use chatelet::arith::{crt_solve, rat, ratio, square_class_test, valuation, CongruenceSystem, Rational, Sign};
use chatelet::chatelet::{evaluate_invariant, invariant_set, ChateletSurface, InvariantValue, SearchBounds, XCoordinate};
use chatelet::construct::{build_v1, BuildConfig};
use chatelet::fields::{splits_completely, NumberField, SplitStatus};
use chatelet::hilbert::{hilbert_symbol, symbol_support};
use chatelet::Place;

use common::{brute_hilbert, roots_mod};

const SMALL_PRIMES: [u64; 6] = [3, 5, 7, 11, 13, 17];

/// Checks a solver answer without the library's residue code.
fn independent_check(x: &Rational, sys: &[(u64, u32, Vec<u64>)], sign: Option<Sign>) -> bool {
    if x.is_zero() {
        return false;
    }
    for (p, e, residues) in sys {
        let m = BigInt::from(*p).pow(*e);
        let den = x.denom() % &m;
        // den · inv ≡ 1 by exhaustive search over residues
        let Some(inv) = (0..p.pow(*e)).map(BigInt::from).find(|t| (&den * t) % &m == BigInt::one()) else {
            return false;
        };
        let mut r = (x.numer() * inv) % &m;
        if r < BigInt::zero() {
            r += &m;
        }
        if !residues.iter().any(|&s| BigInt::from(s) == r) {
            return false;
        }
    }
    match sign {
        Some(Sign::Positive) => *x > Rational::zero(),
        Some(Sign::Negative) => *x < Rational::zero(),
        None => true,
    }
}

type System = Vec<(u64, u32, Vec<u64>)>;

fn congruence_system() -> impl Strategy<Value = (System, Option<Sign>)> {
    let one = (0usize..SMALL_PRIMES.len(), 1u32..3, proptest::collection::vec(0u64..289, 1..4));
    (
        proptest::collection::vec(one, 0..4),
        prop_oneof![Just(None), Just(Some(Sign::Positive)), Just(Some(Sign::Negative))],
    )
        .prop_map(|(raw, sign)| {
            let mut seen = BTreeSet::new();
            let mut sys = Vec::new();
            for (i, e, rs) in raw {
                let p = SMALL_PRIMES[i];
                if seen.insert(p) {
                    let m = p.pow(e);
                    let rs: BTreeSet<u64> = rs.into_iter().map(|r| r % m).collect();
                    sys.push((p, e, rs.into_iter().collect()));
                }
            }
            (sys, sign)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn crt_output_passes_independent_validator((sys, sign) in congruence_system()) {
        let mut cs = CongruenceSystem::new();
        for (p, e, rs) in &sys {
            cs.require_residues(*p, *e, rs.iter().map(|&r| BigInt::from(r)));
        }
        if let Some(s) = sign {
            cs.require_sign(s);
        }
        let x = crt_solve(&cs, &[2], 100_000).unwrap();
        prop_assert!(independent_check(&x, &sys, sign), "x = {}", x);
    }

    #[test]
    fn crt_interval_solutions_stay_inside(lo in -50i64..50, width in 1i64..4, r in 0u64..13) {
        let mut cs = CongruenceSystem::new();
        cs.require_residues(13, 1, [BigInt::from(r)]);
        let (l, h) = (ratio(lo, 7), ratio(lo * 7 + width, 49));
        if l < h {
            cs.require_interval(Some(l.clone()), Some(h.clone()));
            let x = crt_solve(&cs, &[2], 1_000_000).unwrap();
            prop_assert!(x > l && x < h);
            prop_assert!(independent_check(&x, &[(13, 1, vec![r])], None));
        }
    }

    #[test]
    fn square_class_is_a_local_square_in_the_brute_sense(u in 1i64..2000, p in prop::sample::select(vec![3u64, 5, 7, 11, 13])) {
        prop_assume!(u % p as i64 != 0);
        let brute = (1..p).any(|y| (y * y) % p == (u as u64) % p);
        prop_assert_eq!(square_class_test(&rat(u), &Place::Finite(p)).unwrap(), brute);
    }

    #[test]
    fn square_a_gives_only_invariant_zero(
        t in 1i64..40, c1 in -30i64..30, c2 in -30i64..30, d in -30i64..30,
        p in prop::sample::select(vec![3u64, 5, 7, 11]),
    ) {
        prop_assume!(c1 != 0 && c2 != 0 && d != 0);
        // a ≡ t² mod p-adic squares with a not a rational square
        let a = rat((t * t) * (1 + p as i64 * 8));
        prop_assume!(square_class_test(&a, &Place::Finite(p)).unwrap());
        let q1 = chatelet::chatelet::EvenQuadratic::new(rat(1), rat(c1)).unwrap();
        let q2 = chatelet::chatelet::EvenQuadratic::new(rat(d), rat(c2)).unwrap();
        if let Ok(surface) = ChateletSurface::new(a, q1, q2) {
            let set = invariant_set(&surface, &Place::Finite(p), &SearchBounds::default()).unwrap();
            prop_assert_eq!(set.values, BTreeSet::from([InvariantValue::Zero]));
        }
    }
}

#[test]
fn hilbert_matches_brute_force_on_a_grid() {
    for a in (-12i64..=12).filter(|&x| x != 0) {
        for b in (-12i64..=12).filter(|&x| x != 0) {
            for p in [2u64, 3, 5, 7] {
                let got = hilbert_symbol(&rat(a), &rat(b), &Place::Finite(p)).unwrap().value();
                assert_eq!(got, brute_hilbert(a, b, Some(p)), "({a},{b})_{p}");
            }
        }
    }
}

#[test]
fn splitting_matches_root_counts() {
    let polys: [&[i64]; 5] = [&[-3, 0, 1], &[1, 0, 1], &[-1, -2, 1, 1], &[-2, 0, 0, 1], &[1, 1, 1, 1, 1]];
    for coeffs in polys {
        let f = NumberField::from_coeffs(coeffs).unwrap();
        for p in (3u64..300).filter(|&p| Place::finite(p).is_ok()) {
            let report = splits_completely(p, &f).unwrap();
            let roots = roots_mod(coeffs, p);
            if (f.discriminant() % p).is_zero() {
                assert_eq!(report.status, SplitStatus::Indeterminate);
            } else {
                let expect = roots.len() == f.degree();
                assert_eq!(report.status == SplitStatus::Splits, expect, "{coeffs:?} at {p}");
                if expect {
                    assert_eq!(report.roots, roots);
                }
            }
        }
    }
}

#[test]
fn valuation_examples() {
    assert_eq!(valuation(&ratio(1, 73), &BigInt::from(73)).unwrap(), -1);
    assert_eq!(valuation(&rat(377), &BigInt::from(13)).unwrap(), 1);
    assert_eq!(valuation(&rat(1), &BigInt::from(5)).unwrap(), 0);
}

#[test]
fn rational_point_has_zero_reciprocity_sum() {
    let cfg = BuildConfig::default();
    for (coeffs, s) in [(vec![-3i64, 0, 1], 73u64), (vec![-1, 1], 5), (vec![1, 0, 1], 13)] {
        let f = NumberField::from_coeffs(&coeffs).unwrap();
        let (surface, cp) = build_v1(&f, &[Place::Finite(s)], &cfg).unwrap();
        let x = XCoordinate::Finite(Rational::zero());
        let q1 = surface.q1.eval(&Rational::zero());
        let mut places = cp.params.support();
        places.extend(symbol_support(&surface.a, &q1).unwrap());
        let total: InvariantValue = places
            .iter()
            .map(|v| evaluate_invariant(&surface, v, &x).unwrap())
            .sum();
        assert_eq!(total, InvariantValue::Zero);
    }
}
