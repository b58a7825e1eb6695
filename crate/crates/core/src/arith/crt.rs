//! Approximation solver: finds a rational satisfying finitely many p-adic
//! residue conditions plus a sign or open-interval condition at the real
//! place, with denominator supported on a prescribed set of primes.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{mod_inverse, residue_mod, Rational};
use crate::error::{Error, Result};

/// Upper bound on residue combinations tried per denominator.
const COMBO_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

/// `x mod p^exponent ∈ residues`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Congruence {
    pub prime: u64,
    pub exponent: u32,
    /// Sorted, deduplicated, reduced into `[0, p^exponent)`.
    pub residues: Vec<BigInt>,
}

impl Congruence {
    pub fn modulus(&self) -> BigInt {
        BigInt::from(self.prime).pow(self.exponent)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CongruenceSystem {
    pub congruences: Vec<Congruence>,
    pub sign: Option<Sign>,
    /// Open interval; `None` endpoints are infinite.
    pub interval: Option<(Option<Rational>, Option<Rational>)>,
}

impl CongruenceSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn require_residues<I>(&mut self, prime: u64, exponent: u32, residues: I) -> &mut Self
    where
        I: IntoIterator<Item = BigInt>,
    {
        let m = BigInt::from(prime).pow(exponent);
        let set: BTreeSet<BigInt> = residues.into_iter().map(|r| r.mod_floor(&m)).collect();
        self.congruences.push(Congruence {
            prime,
            exponent,
            residues: set.into_iter().collect(),
        });
        self
    }

    /// `v_p(x) = n` for `n ≥ 0`.
    pub fn require_valuation(&mut self, prime: u64, n: u32) -> &mut Self {
        self.require_shifted_valuation(prime, n, &Rational::zero())
    }

    /// `v_p(x − target) = n` for a p-integral `target` and `n ≥ 0`.
    pub fn require_shifted_valuation(&mut self, prime: u64, n: u32, target: &Rational) -> &mut Self {
        let p = BigInt::from(prime);
        let m = p.pow(n + 1);
        let t = residue_mod(target, &m).expect("target must be p-integral");
        let step = p.pow(n);
        let residues = (0..prime)
            .filter(|k| *k != 0)
            .map(|k| &t + &step * BigInt::from(k));
        self.require_residues(prime, n + 1, residues.collect::<Vec<_>>())
    }

    pub fn require_sign(&mut self, sign: Sign) -> &mut Self {
        self.sign = Some(sign);
        self
    }

    pub fn require_interval(&mut self, lo: Option<Rational>, hi: Option<Rational>) -> &mut Self {
        self.interval = Some((lo, hi));
        self
    }

    fn effective_interval(&self) -> (Option<Rational>, Option<Rational>) {
        let (mut lo, mut hi) = self.interval.clone().unwrap_or((None, None));
        match self.sign {
            Some(Sign::Positive) => {
                let z = Rational::zero();
                lo = Some(match lo {
                    Some(l) if l > z => l,
                    _ => z,
                });
            }
            Some(Sign::Negative) => {
                let z = Rational::zero();
                hi = Some(match hi {
                    Some(h) if h < z => h,
                    _ => z,
                });
            }
            None => {}
        }
        (lo, hi)
    }

    /// Direct check of every constraint against a candidate.
    pub fn is_satisfied_by(&self, x: &Rational) -> bool {
        if x.is_zero() {
            return false;
        }
        for c in &self.congruences {
            match residue_mod(x, &c.modulus()) {
                Some(r) if c.residues.binary_search(&r).is_ok() => {}
                _ => return false,
            }
        }
        let (lo, hi) = self.effective_interval();
        lo.is_none_or(|l| *x > l) && hi.is_none_or(|h| *x < h)
    }

    /// Intersects congruences sharing a prime, so moduli become pairwise coprime.
    fn merged(&self) -> Result<Vec<Congruence>> {
        let mut by_prime: BTreeMap<u64, Congruence> = BTreeMap::new();
        for c in &self.congruences {
            let merged = match by_prime.remove(&c.prime) {
                None => c.clone(),
                Some(prev) => {
                    let (small, large) = if prev.exponent <= c.exponent {
                        (prev, c.clone())
                    } else {
                        (c.clone(), prev)
                    };
                    let m_small = small.modulus();
                    let keep: BTreeSet<&BigInt> = small.residues.iter().collect();
                    let residues: Vec<BigInt> = large
                        .residues
                        .iter()
                        .filter(|r| keep.contains(&r.mod_floor(&m_small)))
                        .cloned()
                        .collect();
                    Congruence {
                        prime: c.prime,
                        exponent: large.exponent,
                        residues,
                    }
                }
            };
            if merged.residues.is_empty() {
                return Err(Error::Inconsistent(format!(
                    "no residue modulo {}^{} satisfies every condition",
                    merged.prime, merged.exponent
                )));
            }
            by_prime.insert(c.prime, merged);
        }
        Ok(by_prime.into_values().collect())
    }
}

fn floor_rat(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

fn ceil_rat(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

/// Smallest `m ≡ x0 (mod modulus)` with `m > bound`.
fn first_above(x0: &BigInt, modulus: &BigInt, bound: &Rational) -> BigInt {
    let k = floor_rat(&((bound - Rational::from_integer(x0.clone())) / Rational::from_integer(modulus.clone()))) + 1;
    x0 + k * modulus
}

/// Largest `m ≡ x0 (mod modulus)` with `m < bound`.
fn last_below(x0: &BigInt, modulus: &BigInt, bound: &Rational) -> BigInt {
    let k = ceil_rat(&((bound - Rational::from_integer(x0.clone())) / Rational::from_integer(modulus.clone()))) - 1;
    x0 + k * modulus
}

/// Nonzero element of the progression inside `(lo, hi)` of least absolute
/// value; ties go to the positive one.
fn nearest_in_interval(
    x0: &BigInt,
    modulus: &BigInt,
    lo: &Option<Rational>,
    hi: &Option<Rational>,
) -> Option<BigInt> {
    let zero = Rational::zero();
    let inside = |m: &BigInt| {
        let q = Rational::from_integer(m.clone());
        lo.as_ref().is_none_or(|l| q > *l) && hi.as_ref().is_none_or(|h| q < *h)
    };
    let candidates: Vec<BigInt> = match (lo, hi) {
        (Some(l), _) if *l >= zero => vec![first_above(x0, modulus, l)],
        (_, Some(h)) if *h <= zero => vec![last_below(x0, modulus, h)],
        _ => vec![first_above(x0, modulus, &zero), last_below(x0, modulus, &zero)],
    };
    candidates
        .into_iter()
        .filter(|m| !m.is_zero() && inside(m))
        .min_by(|a, b| a.abs().cmp(&b.abs()).then(b.cmp(a)))
}

fn preference_key(x: &Rational) -> (BigInt, BigInt, bool) {
    (x.numer().abs(), x.denom().clone(), x.is_negative())
}

/// Solves a congruence system.
///
/// Residues are combined by CRT and each resulting progression is searched
/// for the element of least absolute value meeting the real-place condition.
/// When the condition is a bounded interval that the progression misses,
/// the denominator is multiplied by the smallest prime of
/// `denominator_support` and the search repeats. Every residue combination
/// evaluated counts as one step against `max_iterations`.
pub fn crt_solve(
    sys: &CongruenceSystem,
    denominator_support: &[u64],
    max_iterations: u64,
) -> Result<Rational> {
    for c in &sys.congruences {
        if denominator_support.contains(&c.prime) {
            return Err(Error::InvalidInput(format!(
                "prime {} carries both a congruence and a denominator",
                c.prime
            )));
        }
    }
    let merged = sys.merged()?;
    let (lo, hi) = sys.effective_interval();
    if let (Some(l), Some(h)) = (&lo, &hi) {
        if l >= h {
            return Err(Error::Inconsistent(format!("empty interval ({l}, {h})")));
        }
    }

    let moduli: Vec<BigInt> = merged.iter().map(Congruence::modulus).collect();
    let total: BigInt = moduli.iter().product();
    let weights: Vec<BigInt> = moduli
        .iter()
        .map(|m| {
            let cofactor = &total / m;
            let inv = mod_inverse(&cofactor, m).expect("coprime moduli");
            cofactor * inv
        })
        .collect();

    // keep the number of residue combinations bounded
    let multi = merged.iter().filter(|c| c.residues.len() > 1).count().max(1);
    let per_set = ((COMBO_CAP as f64).powf(1.0 / multi as f64).floor() as usize).max(1);
    let choices: Vec<&[BigInt]> = merged
        .iter()
        .map(|c| &c.residues[..c.residues.len().min(per_set)])
        .collect();

    let base = denominator_support.iter().copied().min();
    let mut steps: u64 = 0;
    let mut denominator = BigInt::one();
    loop {
        let d_rat = Rational::from_integer(denominator.clone());
        let lo_m = lo.as_ref().map(|l| l * &d_rat);
        let hi_m = hi.as_ref().map(|h| h * &d_rat);
        let mut best: Option<Rational> = None;
        let mut idx = vec![0usize; choices.len()];
        loop {
            steps += 1;
            if steps > max_iterations {
                return Err(Error::Exhausted(format!(
                    "no solution within {max_iterations} steps"
                )));
            }
            let mut x0 = BigInt::zero();
            for (i, set) in choices.iter().enumerate() {
                x0 += &set[idx[i]] * &denominator * &weights[i];
            }
            let x0 = x0.mod_floor(&total);
            if let Some(m) = nearest_in_interval(&x0, &total, &lo_m, &hi_m) {
                let cand = Rational::new(m, denominator.clone());
                if best
                    .as_ref()
                    .is_none_or(|b| preference_key(&cand) < preference_key(b))
                {
                    best = Some(cand);
                }
            }
            // odometer over residue choices
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < choices[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == idx.len() {
                break;
            }
        }
        if let Some(b) = best {
            return Ok(b);
        }
        match base {
            Some(q) => denominator *= q,
            None => {
                return Err(Error::Exhausted(
                    "interval misses every solution and no denominators are allowed".into(),
                ))
            }
        }
    }
}
