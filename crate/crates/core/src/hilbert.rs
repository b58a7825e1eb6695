//! Hilbert symbols `(a, b)_v` over the completions of Q.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::arith::{factor, jacobi, split_power, square_class_rep, Rational};
use crate::error::{Error, Result};
use crate::place::Place;

/// A value in {+1, −1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymbolValue(i8);

impl SymbolValue {
    pub const PLUS: SymbolValue = SymbolValue(1);
    pub const MINUS: SymbolValue = SymbolValue(-1);

    pub fn from_parity(odd: bool) -> SymbolValue {
        if odd {
            Self::MINUS
        } else {
            Self::PLUS
        }
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn is_plus(self) -> bool {
        self.0 == 1
    }
}

impl Mul for SymbolValue {
    type Output = SymbolValue;

    fn mul(self, rhs: SymbolValue) -> SymbolValue {
        SymbolValue(self.0 * rhs.0)
    }
}

impl fmt::Display for SymbolValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_plus() { "+1" } else { "-1" })
    }
}

fn mod8(n: &BigInt) -> u8 {
    n.mod_floor(&BigInt::from(8u8))
        .to_u32_digits()
        .1
        .first()
        .copied()
        .unwrap_or(0) as u8
}

/// (t − 1)/2 mod 2 for odd t.
fn epsilon(t: &BigInt) -> u8 {
    (mod8(t) >> 1) & 1
}

/// (t² − 1)/8 mod 2 for odd t.
fn omega(t: &BigInt) -> u8 {
    match mod8(t) {
        3 | 5 => 1,
        _ => 0,
    }
}

pub fn hilbert_symbol(a: &Rational, b: &Rational, v: &Place) -> Result<SymbolValue> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument);
    }
    Ok(match v {
        Place::Real => SymbolValue::from_parity(a.is_negative() && b.is_negative()),
        Place::Finite(p) => {
            let pb = BigInt::from(*p);
            let (alpha, u) = split_power(&square_class_rep(a), &pb);
            let (beta, w) = split_power(&square_class_rep(b), &pb);
            if *p == 2 {
                let e = epsilon(&u) * epsilon(&w)
                    + (alpha % 2) as u8 * omega(&w)
                    + (beta % 2) as u8 * omega(&u);
                SymbolValue::from_parity(e % 2 == 1)
            } else {
                let mut s = SymbolValue::from_parity(
                    (alpha % 2 == 1) && (beta % 2 == 1) && (p % 4 == 3),
                );
                if beta % 2 == 1 {
                    s = s * SymbolValue(jacobi(&u, &pb));
                }
                if alpha % 2 == 1 {
                    s = s * SymbolValue(jacobi(&w, &pb));
                }
                s
            }
        }
    })
}

/// Places where `(a, b)_v = −1`. Only the real place, 2 and the primes
/// dividing a numerator or denominator can contribute.
pub fn symbol_support(a: &Rational, b: &Rational) -> Result<BTreeSet<Place>> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let mut candidates = BTreeSet::from([Place::Real, Place::Finite(2)]);
    for n in [a.numer(), a.denom(), b.numer(), b.denom()] {
        for p in factor(n)?.primes() {
            candidates.insert(Place::from_biguint(p)?);
        }
    }
    let mut out = BTreeSet::new();
    for v in candidates {
        if !hilbert_symbol(a, b, &v)?.is_plus() {
            out.insert(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};
    use proptest::prelude::*;

    fn h(a: i64, b: i64, p: u64) -> i8 {
        hilbert_symbol(&rat(a), &rat(b), &Place::Finite(p)).unwrap().value()
    }

    #[test]
    fn worked_values() {
        assert_eq!(h(73, 99, 73), -1);
        assert_eq!(h(377, 5, 13), -1);
        assert_eq!(h(2, 5, 5), -1);
        assert_eq!(h(1, 17, 17), 1);
        assert_eq!(h(-1, -1, 2), -1);
        assert_eq!(
            hilbert_symbol(&rat(-1), &rat(-1), &Place::Real).unwrap(),
            SymbolValue::MINUS
        );
        assert_eq!(
            hilbert_symbol(&rat(0), &rat(1), &Place::Real),
            Err(Error::ZeroArgument)
        );
    }

    #[test]
    fn support_examples() {
        assert_eq!(
            symbol_support(&rat(2), &rat(5)).unwrap(),
            BTreeSet::from([Place::Finite(2), Place::Finite(5)])
        );
        assert!(symbol_support(&rat(1), &rat(91)).unwrap().is_empty());
        assert_eq!(
            symbol_support(&rat(-1), &rat(-1)).unwrap(),
            BTreeSet::from([Place::Real, Place::Finite(2)])
        );
    }

    fn nonzero() -> impl Strategy<Value = Rational> {
        ((-3000i64..3000).prop_filter("nonzero", |n| *n != 0), 1i64..500)
            .prop_map(|(n, d)| ratio(n, d))
    }

    fn place() -> impl Strategy<Value = Place> {
        prop::sample::select(vec![
            Place::Real,
            Place::Finite(2),
            Place::Finite(3),
            Place::Finite(5),
            Place::Finite(7),
            Place::Finite(13),
        ])
    }

    proptest! {
        #[test]
        fn bilinear(a in nonzero(), b1 in nonzero(), b2 in nonzero(), v in place()) {
            let lhs = hilbert_symbol(&a, &(&b1 * &b2), &v).unwrap();
            let rhs = hilbert_symbol(&a, &b1, &v).unwrap() * hilbert_symbol(&a, &b2, &v).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn symmetric(a in nonzero(), b in nonzero(), v in place()) {
            prop_assert_eq!(hilbert_symbol(&a, &b, &v).unwrap(), hilbert_symbol(&b, &a, &v).unwrap());
        }

        #[test]
        fn norm_identities(a in nonzero(), v in place()) {
            prop_assert!(hilbert_symbol(&a, &(-a.clone()), &v).unwrap().is_plus());
            let one_minus = Rational::from_integer(1.into()) - &a;
            if !one_minus.is_zero() {
                prop_assert!(hilbert_symbol(&a, &one_minus, &v).unwrap().is_plus());
            }
        }

        #[test]
        fn square_class_invariance(a in nonzero(), b in nonzero(), s in nonzero(), t in nonzero(), v in place()) {
            let a2 = &a * &s * &s;
            let b2 = &b * &t * &t;
            prop_assert_eq!(hilbert_symbol(&a, &b, &v).unwrap(), hilbert_symbol(&a2, &b2, &v).unwrap());
        }
    }
}
