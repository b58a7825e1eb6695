//! Exact rational arithmetic, p-adic valuations and square classes,
//! Legendre symbols and CRT solving.

pub mod crt;
pub mod primes;
pub mod serde_rational;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::place::Place;

pub use crt::{crt_solve, Congruence, CongruenceSystem, Sign};
pub use primes::{factor, is_prime, Factorization};

/// Arbitrary-precision fraction, always reduced with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"num/den"` or `"num"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// `"num/den"`, with the denominator omitted when it is 1.
pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

fn check_prime(p: &BigInt) -> Result<()> {
    if primes::is_prime_int(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p.to_string()))
    }
}

/// Splits a nonzero integer as `p^k · u` with `p ∤ u`.
pub(crate) fn split_power(n: &BigInt, p: &BigInt) -> (u64, BigInt) {
    debug_assert!(!n.is_zero());
    let mut k = 0;
    let mut u = n.clone();
    loop {
        let (q, r) = u.div_rem(p);
        if !r.is_zero() {
            return (k, u);
        }
        u = q;
        k += 1;
    }
}

pub(crate) fn int_valuation(n: &BigInt, p: &BigInt) -> u64 {
    split_power(n, p).0
}

/// v_p(x) without the primality check; `x` must be nonzero.
pub(crate) fn val(x: &Rational, p: u64) -> i64 {
    let p = BigInt::from(p);
    int_valuation(x.numer(), &p) as i64 - int_valuation(x.denom(), &p) as i64
}

/// The p-adic valuation of a nonzero rational.
pub fn valuation(x: &Rational, p: &BigInt) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroArgument);
    }
    check_prime(p)?;
    Ok(int_valuation(x.numer(), p) as i64 - int_valuation(x.denom(), p) as i64)
}

/// An integer in the same square class as `x` (numerator times denominator).
pub(crate) fn square_class_rep(x: &Rational) -> BigInt {
    x.numer() * x.denom()
}

/// Whether `x` is a square in the completion Q_v.
pub fn square_class_test(x: &Rational, v: &Place) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::ZeroArgument);
    }
    Ok(match v {
        Place::Real => x.is_positive(),
        Place::Finite(p) => {
            let pb = BigInt::from(*p);
            let (k, u) = split_power(&square_class_rep(x), &pb);
            if k % 2 == 1 {
                false
            } else if *p == 2 {
                u.mod_floor(&BigInt::from(8)) == BigInt::one()
            } else {
                jacobi(&u, &pb) == 1
            }
        }
    })
}

/// Jacobi symbol `(a / n)` for odd positive `n`; 0 when not coprime.
pub(crate) fn jacobi(a: &BigInt, n: &BigInt) -> i8 {
    debug_assert!(n.is_positive() && n.is_odd());
    let mut a: BigUint = a.mod_floor(n).to_biguint().expect("nonnegative");
    let mut n: BigUint = n.magnitude().clone();
    let mut t = 1i8;
    while !a.is_zero() {
        let z = a.trailing_zeros().unwrap_or(0);
        a >>= z;
        let n8 = (&n % 8u32).to_u32_digits().first().copied().unwrap_or(0);
        if z % 2 == 1 && (n8 == 3 || n8 == 5) {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        let a4 = (&a % 4u32).to_u32_digits().first().copied().unwrap_or(0);
        let n4 = (&n % 4u32).to_u32_digits().first().copied().unwrap_or(0);
        if a4 == 3 && n4 == 3 {
            t = -t;
        }
        a %= &n;
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// Legendre symbol of a unit `u` modulo an odd prime `p`.
pub fn legendre(u: &BigInt, p: &BigInt) -> Result<i8> {
    if !primes::is_prime_int(p) || p.is_even() {
        return Err(Error::NotOddPrime(p.to_string()));
    }
    if !u.gcd(p).is_one() {
        return Err(Error::NotCoprime);
    }
    Ok(jacobi(u, p))
}

pub(crate) fn legendre_u64(u: &BigInt, p: u64) -> i8 {
    jacobi(u, &BigInt::from(p))
}

/// Residue of a p-integral rational modulo `m` (with `gcd(den, m) = 1`).
pub(crate) fn residue_mod(x: &Rational, m: &BigInt) -> Option<BigInt> {
    let inv = mod_inverse(&x.denom().mod_floor(m), m)?;
    Some((x.numer() * inv).mod_floor(m))
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else if m.is_one() {
        Some(BigInt::zero())
    } else {
        None
    }
}

/// Whether the denominator of `x` is supported on the given primes.
pub(crate) fn denominator_supported_on(x: &Rational, primes: &[u64]) -> bool {
    let mut d = x.denom().clone();
    for &p in primes {
        let pb = BigInt::from(p);
        d = split_power(&d, &pb).1;
    }
    d.is_one()
}

/// Odd primes where `x` has nonzero valuation.
pub(crate) fn odd_support(x: &Rational) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in [x.numer(), x.denom()] {
        for p in factor(part)?.primes() {
            let place = Place::from_biguint(p)?;
            if let Place::Finite(q) = place {
                if q != 2 {
                    out.push(q);
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub(crate) fn is_rational_square(x: &Rational) -> bool {
    if x.is_negative() {
        return false;
    }
    let is_sq = |n: &BigInt| {
        let r = num_integer::Roots::sqrt(n);
        &r * &r == *n
    };
    is_sq(x.numer()) && is_sq(x.denom())
}
