//! Primality testing and integer factorization.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Miller–Rabin bases: the first thirteen primes. Deterministic for all
/// n < 3.317·10²⁴; above that bound the test is probabilistic.
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

const TRIAL_LIMIT: u64 = 1_000_000;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut composite = vec![false; n + 1];
        let mut out = Vec::new();
        for i in 2..=n {
            if !composite[i] {
                out.push(i as u64);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        out
    })
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime_int(n: &BigInt) -> bool {
    n.sign() == Sign::Plus && is_prime(n.magnitude())
}

/// Complete factorization of a nonzero integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    /// `(prime, exponent)` pairs, primes strictly increasing.
    pub factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn reconstruct(&self) -> BigInt {
        let mag = self
            .factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
        if self.sign < 0 {
            -BigInt::from(mag)
        } else {
            BigInt::from(mag)
        }
    }
}

pub fn factor(n: &BigInt) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let sign = if n.sign() == Sign::Minus { -1 } else { 1 };
    let mut rest = n.magnitude().clone();
    let mut found: Vec<BigUint> = Vec::new();

    for &p in small_primes() {
        if rest.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        while (&rest % p).is_zero() {
            rest /= p;
            found.push(pb.clone());
        }
    }
    if !rest.is_one() {
        split_large(rest, &mut found);
    }

    found.sort();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for p in found {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { sign, factors })
}

fn split_large(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        out.push(n);
        return;
    }
    let root = n.sqrt();
    if &root * &root == n {
        split_large(root.clone(), out);
        split_large(root, out);
        return;
    }
    let d = pollard_brent(&n);
    let other = &n / &d;
    split_large(d, out);
    split_large(other, out);
}

/// Pollard rho with Brent's cycle detection; polynomial constants are tried
/// in the fixed order 1, 2, 3, ... so results are deterministic.
fn pollard_brent(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m: u64 = 64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fac(n: i64) -> Vec<(u64, u32)> {
        factor(&BigInt::from(n))
            .unwrap()
            .factors
            .iter()
            .map(|(p, e)| (p.to_u64().unwrap(), *e))
            .collect()
    }

    #[test]
    fn factors_worked_values() {
        assert_eq!(fac(377), vec![(13, 1), (29, 1)]);
        assert_eq!(fac(5329), vec![(73, 2)]);
        assert_eq!(fac(1), vec![]);
        assert_eq!(factor(&BigInt::from(-12)).unwrap().sign, -1);
        assert_eq!(fac(-12), vec![(2, 2), (3, 1)]);
    }

    #[test]
    fn zero_is_rejected() {
        assert_eq!(factor(&BigInt::zero()), Err(Error::ZeroArgument));
    }

    #[test]
    fn large_semiprime_uses_rho() {
        // both factors exceed the trial-division bound
        let p = 1_000_003u64;
        let q = 1_000_033u64;
        let n = BigInt::from(p) * BigInt::from(q) * BigInt::from(q);
        assert_eq!(
            factor(&n).unwrap().factors,
            vec![(BigUint::from(p), 1), (BigUint::from(q), 2)]
        );
        let big = BigInt::from(18_446_744_073_709_551_557u64) * BigInt::from(1_000_000_007u64);
        let f = factor(&big).unwrap();
        assert_eq!(f.reconstruct(), big);
        assert_eq!(f.factors.len(), 2);
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0u64..5000 {
            let naive = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime_u64(n), naive, "n = {n}");
        }
        // strong pseudoprime to several small bases
        assert!(!is_prime_u64(3_215_031_751));
        assert!(is_prime(&BigUint::from(18_446_744_073_709_551_557u64)));
    }

    #[test]
    fn reconstruct_roundtrip() {
        for n in [-360i64, 97, 1024, 878755181, 4393775906] {
            assert_eq!(factor(&BigInt::from(n)).unwrap().reconstruct(), BigInt::from(n));
        }
    }
}
