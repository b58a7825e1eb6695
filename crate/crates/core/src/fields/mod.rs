//! Monogenic number fields `Q[x]/(f)`, complete splitting of primes and the
//! split-prime finder.

mod polymod;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::primes::{is_prime_u64, factor};
use crate::arith::{square_class_rep, square_class_test, split_power, jacobi, Rational};
use crate::error::{Error, Result};
use crate::place::Place;

/// Default upper bound for prime scans.
pub const DEFAULT_PRIME_BOUND: u64 = 1_000_000;

/// Limit on candidate factors tried by the exhaustive irreducibility search.
const FACTOR_SEARCH_LIMIT: u64 = 5_000_000;

/// A number field given by a monic irreducible integer polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct NumberField {
    minpoly: Vec<BigInt>,
    disc: BigInt,
}

impl NumberField {
    /// `coeffs` lists the coefficients constant term first.
    pub fn new(coeffs: Vec<BigInt>) -> Result<NumberField> {
        let mut f = coeffs;
        while f.len() > 1 && f.last().is_some_and(Zero::is_zero) {
            f.pop();
        }
        if f.len() < 2 {
            return Err(Error::InvalidInput("minimal polynomial must have degree ≥ 1".into()));
        }
        if !f.last().unwrap().is_one() {
            return Err(Error::InvalidInput("minimal polynomial must be monic".into()));
        }
        let disc = discriminant(&f)?;
        if disc.is_zero() {
            return Err(Error::Reducible("discriminant is zero".into()));
        }
        check_irreducible(&f)?;
        Ok(NumberField { minpoly: f, disc })
    }

    pub fn from_coeffs(coeffs: &[i64]) -> Result<NumberField> {
        NumberField::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Q itself, presented as `x − 1`.
    pub fn rationals() -> NumberField {
        NumberField {
            minpoly: vec![-BigInt::one(), BigInt::one()],
            disc: BigInt::one(),
        }
    }

    /// Parses `"c0,c1,...,1"`.
    pub fn parse(s: &str) -> Result<NumberField> {
        let coeffs = s
            .trim()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        NumberField::new(coeffs)
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    pub fn coefficients_i64(&self) -> Option<Vec<i64>> {
        self.minpoly.iter().map(ToPrimitive::to_i64).collect()
    }

    /// Number of real roots of the minimal polynomial (Sturm's theorem).
    pub fn real_root_count(&self) -> usize {
        sturm_real_roots(&self.minpoly)
    }

    pub fn is_totally_real(&self) -> bool {
        self.real_root_count() == self.degree()
    }

    fn reduce_mod(&self, p: u64) -> polymod::Poly {
        let pb = BigInt::from(p);
        let mut f: polymod::Poly = self
            .minpoly
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect();
        polymod::trim(&mut f);
        f
    }
}

impl TryFrom<Vec<i64>> for NumberField {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<NumberField> {
        NumberField::from_coeffs(&v)
    }
}

impl From<NumberField> for Vec<i64> {
    fn from(f: NumberField) -> Vec<i64> {
        f.coefficients_i64().expect("coefficients fit in i64")
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.minpoly.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Resultant via the Sylvester matrix; inputs constant term first.
fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in f.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in g.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    det_bareiss(rows)
}

/// Discriminant `(−1)^{d(d−1)/2}·Res(f, f′)/lc(f)` of a degree-d polynomial.
pub fn discriminant(f: &[BigInt]) -> Result<BigInt> {
    if f.len() < 2 || f.last().is_none_or(Zero::is_zero) {
        return Err(Error::InvalidInput("polynomial must have degree ≥ 1".into()));
    }
    let d = f.len() - 1;
    if d == 1 {
        return Ok(BigInt::one());
    }
    let deriv: Vec<BigInt> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    let res = resultant(f, &deriv);
    let lc = f.last().unwrap();
    let mut disc = res / lc;
    if (d * (d - 1) / 2) % 2 == 1 {
        disc = -disc;
    }
    Ok(disc)
}

fn eval_int(f: &[BigInt], x: &BigInt) -> BigInt {
    f.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Remainder of `f` by the monic `g` over Z.
fn rem_monic(f: &[BigInt], g: &[BigInt]) -> Vec<BigInt> {
    let dg = g.len() - 1;
    let mut r = f.to_vec();
    while r.len() > dg {
        let lead = r.pop().unwrap();
        let shift = r.len() - dg;
        for (i, c) in g[..dg].iter().enumerate() {
            r[shift + i] -= &lead * c;
        }
    }
    r
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let fac = factor(n)?;
    let mut divs = vec![BigInt::one()];
    for (p, e) in &fac.factors {
        let p = BigInt::from(p.clone());
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=*e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs)
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn check_irreducible(f: &[BigInt]) -> Result<()> {
    let d = f.len() - 1;
    if d == 1 {
        return Ok(());
    }
    if f[0].is_zero() {
        return Err(Error::Reducible("x divides f".into()));
    }
    for r in divisors(&f[0].abs())? {
        for cand in [r.clone(), -r] {
            if eval_int(f, &cand).is_zero() {
                return Err(Error::Reducible(format!("rational root {cand}")));
            }
        }
    }
    if d <= 3 {
        return Ok(());
    }

    // Degree sieve: a factor of degree k over Z forces a sub-multiset of
    // irreducible factor degrees summing to k modulo every good prime.
    let disc = discriminant(f)?;
    let mut possible: BTreeSet<usize> = (2..=d / 2).collect();
    let mut p = 3u64;
    let mut used = 0;
    while used < 40 && !possible.is_empty() {
        if is_prime_u64(p) && !(&disc % p).is_zero() {
            used += 1;
            let pb = BigInt::from(p);
            let mut fp: polymod::Poly = f.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
            polymod::trim(&mut fp);
            let degs = polymod::factor_degrees(&fp, p);
            let mut sums = BTreeSet::from([0usize]);
            for dg in degs {
                let shifted: Vec<usize> = sums.iter().map(|s| s + dg).collect();
                sums.extend(shifted);
            }
            possible.retain(|k| sums.contains(k));
        }
        p += 2;
    }
    for k in possible {
        if let Some(g) = search_factor(f, k)? {
            return Err(Error::Reducible(format!("factor of degree {k}: {g:?}")));
        }
    }
    Ok(())
}

/// Exhaustive search for a monic factor of degree `k` within the Mignotte bound.
fn search_factor(f: &[BigInt], k: usize) -> Result<Option<Vec<BigInt>>> {
    let norm_sq: BigInt = f.iter().map(|c| c * c).sum();
    let norm = num_integer::Roots::sqrt(&norm_sq) + 1;
    let bounds: Vec<BigInt> = (0..k).map(|j| binomial(k, j) * &norm).collect();
    let consts: Vec<BigInt> = divisors(&f[0].abs())?
        .into_iter()
        .flat_map(|d| [d.clone(), -d])
        .collect();
    let mut space = BigInt::from(consts.len());
    for b in &bounds[1..] {
        space *= b * 2 + 1;
    }
    if space > BigInt::from(FACTOR_SEARCH_LIMIT) {
        return Err(Error::IrreducibilityUndetermined(format!(
            "degree-{k} factor search space {space} exceeds limit"
        )));
    }
    let mut g: Vec<BigInt> = vec![BigInt::zero(); k + 1];
    g[k] = BigInt::one();
    let mut idx: Vec<BigInt> = bounds[1..].iter().map(|b| -b).collect();
    for c0 in &consts {
        g[0] = c0.clone();
        for (i, v) in idx.iter_mut().enumerate() {
            *v = -bounds[i + 1].clone();
        }
        loop {
            for (i, v) in idx.iter().enumerate() {
                g[i + 1] = v.clone();
            }
            if rem_monic(f, &g).iter().all(Zero::is_zero) {
                return Ok(Some(g));
            }
            let mut pos = 0;
            while pos < idx.len() {
                idx[pos] += 1;
                if idx[pos] <= bounds[pos + 1] {
                    break;
                }
                idx[pos] = -bounds[pos + 1].clone();
                pos += 1;
            }
            if pos == idx.len() {
                break;
            }
        }
    }
    Ok(None)
}

fn sturm_real_roots(f: &[BigInt]) -> usize {
    type RPoly = Vec<Rational>;
    let trim = |p: &mut RPoly| {
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
    };
    let rem = |a: &RPoly, b: &RPoly| -> RPoly {
        let mut r = a.clone();
        let db = b.len() - 1;
        while r.len() > db && !r.is_empty() {
            let q = r.last().unwrap() / b.last().unwrap();
            let shift = r.len() - 1 - db;
            for (i, c) in b.iter().enumerate() {
                r[shift + i] -= &q * c;
            }
            r.pop();
            trim(&mut r);
        }
        r
    };
    let p0: RPoly = f.iter().map(|c| Rational::from_integer(c.clone())).collect();
    let p1: RPoly = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| Rational::from_integer(c * BigInt::from(i)))
        .collect();
    let mut seq = vec![p0, p1];
    loop {
        let n = seq.len();
        let mut r = rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        for c in r.iter_mut() {
            *c = -c.clone();
        }
        seq.push(r);
    }
    let changes = |signs: Vec<bool>| signs.windows(2).filter(|w| w[0] != w[1]).count();
    let at_pos_inf: Vec<bool> = seq.iter().map(|p| p.last().unwrap().is_positive()).collect();
    let at_neg_inf: Vec<bool> = seq
        .iter()
        .map(|p| p.last().unwrap().is_positive() == ((p.len() - 1) % 2 == 0))
        .collect();
    changes(at_neg_inf) - changes(at_pos_inf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitStatus {
    Splits,
    DoesNotSplit,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitReport {
    pub prime: u64,
    pub status: SplitStatus,
    /// Roots of f mod p, ascending; filled only when the prime splits.
    pub roots: Vec<u64>,
}

/// Complete-splitting test from the minimal polynomial: `p` splits iff
/// `p ∤ disc(f)` and `f` has `deg f` distinct roots mod p. Primes dividing
/// the discriminant are reported as indeterminate.
pub fn splits_completely(p: u64, field: &NumberField) -> Result<SplitReport> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if (field.discriminant() % p).is_zero() {
        return Ok(SplitReport {
            prime: p,
            status: SplitStatus::Indeterminate,
            roots: Vec::new(),
        });
    }
    let fp = field.reduce_mod(p);
    let lin = polymod::linear_part(&fp, p);
    if polymod::degree(&lin) != Some(field.degree()) {
        return Ok(SplitReport {
            prime: p,
            status: SplitStatus::DoesNotSplit,
            roots: Vec::new(),
        });
    }
    let roots = polymod::split_linear(&lin, p);
    debug_assert_eq!(roots.len(), field.degree());
    Ok(SplitReport {
        prime: p,
        status: SplitStatus::Splits,
        roots,
    })
}

/// Whether a place of Q splits completely: the real place iff the field is
/// totally real, a prime iff [`splits_completely`] reports `Splits`.
pub fn place_splits_completely(v: &Place, field: &NumberField) -> Result<bool> {
    match v {
        Place::Real => Ok(field.is_totally_real()),
        Place::Finite(p) => Ok(splits_completely(*p, field)?.status == SplitStatus::Splits),
    }
}

/// The `count` smallest odd primes outside `avoid`, not dividing the
/// discriminant, that split completely.
pub fn find_split_primes(
    field: &NumberField,
    count: usize,
    avoid: &BTreeSet<u64>,
    bound: u64,
) -> Result<Vec<u64>> {
    if count == 0 {
        return Err(Error::InvalidInput("count must be positive".into()));
    }
    let mut out = Vec::with_capacity(count);
    let mut p = 3u64;
    while p <= bound {
        if is_prime_u64(p)
            && !avoid.contains(&p)
            && splits_completely(p, field)?.status == SplitStatus::Splits
        {
            out.push(p);
            if out.len() == count {
                return Ok(out);
            }
        }
        p += 2;
    }
    Err(Error::Exhausted(format!(
        "found {} of {count} split primes below {bound}",
        out.len()
    )))
}

/// Bound on the auxiliary prime scan in [`nonsquare_witness`].
const AUX_SCAN_BOUND: u64 = 20_000;

/// A place splitting completely in `field` at which `a` is not a local
/// square; such a place certifies that `a` is not a square in the field.
/// Members of `s` are tried first, then odd primes where `a` has odd
/// valuation, then a bounded scan of split primes.
pub fn nonsquare_witness(a: &Rational, s: &[Place], field: &NumberField) -> Result<Option<Place>> {
    if a.is_zero() {
        return Err(Error::ZeroArgument);
    }
    for v in s {
        if !square_class_test(a, v)? && place_splits_completely(v, field)? {
            return Ok(Some(*v));
        }
    }
    let rep = square_class_rep(a);
    for p in factor(&rep)?.primes() {
        let v = Place::from_biguint(p)?;
        if v != Place::Finite(2) && !square_class_test(a, &v)? && place_splits_completely(&v, field)? {
            return Ok(Some(v));
        }
    }
    let mut p = 3u64;
    while p <= AUX_SCAN_BOUND {
        if is_prime_u64(p) {
            let pb = BigInt::from(p);
            let (k, u) = split_power(&rep, &pb);
            if k % 2 == 0
                && jacobi(&u, &pb) == -1
                && splits_completely(p, field)?.status == SplitStatus::Splits
            {
                return Ok(Some(Place::Finite(p)));
            }
        }
        p += 2;
    }
    Ok(None)
}

/// `true` certifies `a ∉ L²`; `false` only means no certificate was found.
pub fn certify_nonsquare_in_l(a: &Rational, s: &[Place], field: &NumberField) -> Result<bool> {
    Ok(nonsquare_witness(a, s, field)?.is_some())
}
