//! Parameter selection for the two surface families: the element `a`, then
//! `b` and `c` by approximation, with auxiliary primes `v1, v2` splitting
//! completely in the field.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    crt_solve, denominator_supported_on, is_rational_square, legendre_u64, square_class_test, val,
    CongruenceSystem, Rational, Sign,
};
use crate::chatelet::{s_dprime_of, s_prime_of, ChateletSurface, Hypothesis, Kind, Parameters};
use crate::error::{Error, Result};
use crate::fields::{certify_nonsquare_in_l, find_split_primes, place_splits_completely, NumberField, DEFAULT_PRIME_BOUND};
use crate::place::Place;

/// Most residues handed to the solver per prime.
const RESIDUE_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildConfig {
    pub max_iterations: u64,
    pub prime_bound: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            max_iterations: 1_000_000,
            prime_bound: DEFAULT_PRIME_BOUND,
        }
    }
}

impl BuildConfig {
    /// Defaults, with `CHATELET_MAX_ITER` overriding the iteration cap.
    pub fn from_env() -> BuildConfig {
        let mut cfg = BuildConfig::default();
        if let Some(n) = std::env::var("CHATELET_MAX_ITER").ok().and_then(|s| s.trim().parse().ok()) {
            cfg.max_iterations = n;
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub params: Parameters,
    pub field: NumberField,
}

impl ConstructionParams {
    pub fn surface(&self) -> Result<ChateletSurface> {
        self.params.surface()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub kind: Kind,
    pub checks: Vec<Hypothesis>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|h| h.holds)
    }

    pub fn failures(&self) -> Vec<&Hypothesis> {
        self.checks.iter().filter(|h| !h.holds).collect()
    }
}

fn check(checks: &mut Vec<Hypothesis>, condition: impl Into<String>, holds: bool) {
    checks.push(Hypothesis {
        condition: condition.into(),
        holds,
    });
}

fn solver_error(e: Error) -> Error {
    match e {
        Error::Exhausted(m) | Error::Inconsistent(m) => Error::SolverExhausted(m),
        other => other,
    }
}

/// Every member of `S` must be the real place or an odd prime splitting
/// completely in the field; the real place needs a totally real field.
pub fn check_split(s: &[Place], field: &NumberField) -> Result<()> {
    for v in s {
        if *v == Place::Finite(2) {
            return Err(Error::SplitCheckFailed("2 cannot belong to S".into()));
        }
        if !place_splits_completely(v, field)? {
            return Err(Error::SplitCheckFailed(format!(
                "{v} does not split completely in Q[x]/({field})"
            )));
        }
    }
    Ok(())
}

/// `S` itself, or the smallest odd prime splitting completely when `S` is empty.
pub fn effective_s(s: &[Place], field: &NumberField, cfg: &BuildConfig) -> Result<Vec<Place>> {
    check_split(s, field)?;
    if !s.is_empty() {
        let set: BTreeSet<Place> = s.iter().copied().collect();
        return Ok(set.into_iter().collect());
    }
    let v0 = find_split_primes(field, 1, &BTreeSet::new(), cfg.prime_bound)
        .map_err(|e| Error::SplitCheckFailed(e.to_string()))?[0];
    Ok(vec![Place::Finite(v0)])
}

/// The integer of least absolute value with `a ≡ 1 mod 8`, `v_p(a) = 1` on the
/// finite part of `S` and `a < 0` exactly when the real place is in `S`.
pub fn choose_a(s: &[Place], field: &NumberField, cfg: &BuildConfig) -> Result<Rational> {
    let s = effective_s(s, field, cfg)?;
    let mut sys = CongruenceSystem::new();
    sys.require_residues(2, 3, [BigInt::one()]);
    for p in s.iter().filter_map(Place::prime) {
        sys.require_valuation(p, 1);
    }
    sys.require_sign(if s.contains(&Place::Real) { Sign::Negative } else { Sign::Positive });
    let a = crt_solve(&sys, &[], cfg.max_iterations).map_err(solver_error)?;
    if is_rational_square(&a) || !certify_nonsquare_in_l(&a, &s, field)? {
        return Err(Error::SolverExhausted(format!("{a} is not certified as a non-square in the field")));
    }
    Ok(a)
}

/// The conditions an admissible `a` must meet for the set `S`.
pub fn validate_a(a: &Rational, s: &[Place]) -> ValidationReport {
    let mut checks = Vec::new();
    check(&mut checks, "a ∈ Z", a.is_integer());
    check(&mut checks, "a is not a rational square", !a.is_zero() && !is_rational_square(a));
    if a.is_zero() {
        return ValidationReport { kind: Kind::V1, checks };
    }
    if s.contains(&Place::Real) {
        check(&mut checks, "a < 0", a.is_negative());
    }
    check(
        &mut checks,
        "a is a square in Q_2",
        square_class_test(a, &Place::Finite(2)).unwrap_or(false),
    );
    for p in s.iter().filter_map(Place::prime) {
        check(&mut checks, format!("v_{p}(a) odd"), val(a, p) % 2 != 0);
    }
    ValidationReport { kind: Kind::V1, checks }
}

/// Units `r mod p` with `(a, r)_p = sign`, for odd `p`.
fn unit_residues_with_symbol(a: &Rational, p: u64, sign: i8) -> Vec<BigInt> {
    let odd = val(a, p) % 2 != 0;
    let mut out = Vec::new();
    for r in 1..p {
        // for a unit r, (a, r)_p = (r/p)^{v_p(a)}
        let s = if odd { legendre_u64(&BigInt::from(r), p) } else { 1 };
        if s == sign {
            out.push(BigInt::from(r));
            if out.len() == RESIDUE_CAP {
                break;
            }
        }
    }
    out
}

fn pick_split_primes(field: &NumberField, avoid: &[Place], cfg: &BuildConfig) -> Result<(u64, u64)> {
    let mut set: BTreeSet<u64> = avoid.iter().filter_map(Place::prime).collect();
    set.insert(2);
    let found = find_split_primes(field, 2, &set, cfg.prime_bound).map_err(solver_error)?;
    Ok((found[0], found[1]))
}

pub fn build_v1(field: &NumberField, s: &[Place], cfg: &BuildConfig) -> Result<(ChateletSurface, ConstructionParams)> {
    let s = effective_s(s, field, cfg)?;
    let a = choose_a(&s, field, cfg)?;
    let s_prime = s_prime_of(&a)?;
    let s_finite: Vec<u64> = s.iter().filter_map(Place::prime).collect();

    // b = b0 / ∏_{p ∈ S} p^{v_p(a)} with b0 a unit on S and v_p(b0) = v_p(a) on S' \ S
    let mut sys = CongruenceSystem::new();
    let mut denom = BigInt::one();
    for &p in &s_finite {
        sys.require_residues(p, 1, (1..p).map(BigInt::from).take(RESIDUE_CAP));
        denom *= BigInt::from(p).pow(val(&a, p) as u32);
    }
    for p in s_prime.iter().filter(|v| !s.contains(v)).filter_map(Place::prime) {
        sys.require_valuation(p, val(&a, p) as u32);
    }
    sys.require_sign(Sign::Positive);
    let b0 = crt_solve(&sys, &[], cfg.max_iterations).map_err(solver_error)?;
    let b = b0 / Rational::from_integer(denom);
    let s_dprime = s_dprime_of(&b)?;
    let (v1, v2) = pick_split_primes(field, &s_dprime, cfg)?;

    let b2 = &b * &b;
    let mut sys = CongruenceSystem::new();
    for &p in &s_finite {
        sys.require_residues(p, 1, unit_residues_with_symbol(&a, p, -1));
    }
    sys.require_valuation(v1, 1);
    sys.require_shifted_valuation(v2, 1, &(-Rational::one() / &b2));
    if s.contains(&Place::Real) {
        sys.require_interval(None, Some(-Rational::one() / &b2));
    } else if s_prime.contains(&Place::Real) {
        sys.require_sign(Sign::Positive);
    }
    let c = crt_solve(&sys, &[2], cfg.max_iterations).map_err(solver_error)?;

    let params = Parameters::new(Kind::V1, a, b, c, &s, v1, v2)?;
    let cp = ConstructionParams {
        params,
        field: field.clone(),
    };
    finish(cp, validate_params_v1)
}

pub fn build_v2(field: &NumberField, s: &[Place], cfg: &BuildConfig) -> Result<(ChateletSurface, ConstructionParams)> {
    let s = effective_s(s, field, cfg)?;
    let a = choose_a(&s, field, cfg)?;
    let s_prime = s_prime_of(&a)?;

    let mut sys = CongruenceSystem::new();
    for v in &s_prime {
        if let Place::Finite(p) = v {
            let sign = if s.contains(v) { -1 } else { 1 };
            sys.require_residues(*p, 1, unit_residues_with_symbol(&a, *p, sign));
        }
    }
    if s.contains(&Place::Real) {
        sys.require_sign(Sign::Negative);
    } else if s_prime.contains(&Place::Real) {
        sys.require_sign(Sign::Positive);
    }
    let b = crt_solve(&sys, &[2], cfg.max_iterations).map_err(solver_error)?;
    let s_dprime = s_dprime_of(&b)?;
    let avoid: Vec<Place> = s_prime.iter().chain(&s_dprime).copied().collect();
    let (v1, v2) = pick_split_primes(field, &avoid, cfg)?;

    let target = -Rational::one() / &b;
    let mut sys = CongruenceSystem::new();
    for p in s_prime.iter().filter_map(Place::prime) {
        sys.require_shifted_valuation(p, (val(&a, p) + 2) as u32, &target);
    }
    for p in s_dprime.iter().filter_map(Place::prime) {
        sys.require_residues(p, 1, unit_residues_with_symbol(&a, p, 1));
    }
    sys.require_valuation(v1, 1);
    sys.require_shifted_valuation(v2, 1, &target);
    if s.contains(&Place::Real) {
        sys.require_interval(Some(Rational::zero()), Some(target.clone()));
    } else if s_prime.contains(&Place::Real) {
        // bc + 1 < 0 with b > 0
        sys.require_interval(None, Some(target.clone()));
    }
    let c = crt_solve(&sys, &[2], cfg.max_iterations).map_err(solver_error)?;

    let params = Parameters::new(Kind::V2, a, b, c, &s, v1, v2)?;
    let cp = ConstructionParams {
        params,
        field: field.clone(),
    };
    finish(cp, validate_params_v2)
}

fn finish(
    cp: ConstructionParams,
    validate: fn(&ConstructionParams) -> ValidationReport,
) -> Result<(ChateletSurface, ConstructionParams)> {
    let report = validate(&cp);
    if let Some(h) = report.failures().first() {
        return Err(Error::ValidationFailed(h.condition.clone()));
    }
    Ok((cp.surface()?, cp))
}

/// Conditions shared by both families: `a`, `S`, the derived sets and the
/// auxiliary primes.
fn common_checks(cp: &ConstructionParams, checks: &mut Vec<Hypothesis>) {
    let p = &cp.params;
    checks.extend(validate_a(&p.a, &p.s).checks);
    if p.a.is_zero() || p.b.is_zero() || p.c.is_zero() {
        check(checks, "a, b, c nonzero", false);
        return;
    }
    check(
        checks,
        "a is certified not to be a square in the field",
        certify_nonsquare_in_l(&p.a, &p.s, &cp.field).unwrap_or(false),
    );
    check(checks, "2 ∉ S", !p.s.contains(&Place::Finite(2)));
    for v in &p.s {
        check(
            checks,
            format!("{v} splits completely"),
            place_splits_completely(v, &cp.field).unwrap_or(false),
        );
    }
    check(checks, "S' matches a", s_prime_of(&p.a).ok().as_ref() == Some(&p.s_prime));
    check(checks, "S'' matches b", s_dprime_of(&p.b).ok().as_ref() == Some(&p.s_dprime));
    check(checks, "v1 ≠ v2", p.v1 != p.v2);
    for (name, q) in [("v1", p.v1), ("v2", p.v2)] {
        let place = Place::Finite(q);
        check(checks, format!("{name} = {q} is an odd prime"), q != 2 && Place::finite(q).is_ok());
        check(checks, format!("{name} = {q} ∉ S''"), !p.s_dprime.contains(&place));
        check(
            checks,
            format!("{name} = {q} splits completely"),
            Place::finite(q).is_ok() && place_splits_completely(&place, &cp.field).unwrap_or(false),
        );
        check(checks, format!("v_{q}(a) even"), val(&p.a, q) % 2 == 0);
    }
    check(checks, "c ∈ Z[1/2]", denominator_supported_on(&p.c, &[2]));
}

pub fn validate_params_v1(cp: &ConstructionParams) -> ValidationReport {
    let mut checks = Vec::new();
    let p = &cp.params;
    check(&mut checks, "kind is v1", p.kind == Kind::V1);
    common_checks(cp, &mut checks);
    if p.a.is_zero() || p.b.is_zero() || p.c.is_zero() {
        return ValidationReport { kind: Kind::V1, checks };
    }
    let (a, b, c) = (&p.a, &p.b, &p.c);
    let one = Rational::one();
    let s_finite: Vec<u64> = p.s.iter().filter_map(Place::prime).collect();
    let mut allowed = s_finite.clone();
    allowed.push(2);
    check(&mut checks, "b ∈ Z[1/2, 1/p : p ∈ S]", denominator_supported_on(b, &allowed));
    for &q in &s_finite {
        check(&mut checks, format!("v_{q}(b) = -v_{q}(a)"), val(b, q) == -val(a, q));
    }
    for q in p.s_prime.iter().filter(|v| !p.s.contains(v)).filter_map(Place::prime) {
        check(&mut checks, format!("v_{q}(b) = v_{q}(a)"), val(b, q) == val(a, q));
    }
    let q2lead = &one + c * b * b;
    if p.s.contains(&Place::Real) {
        check(&mut checks, "1 + cb^2 < 0", q2lead.is_negative());
    }
    if p.s_prime.contains(&Place::Real) && !p.s.contains(&Place::Real) {
        check(&mut checks, "c > 0", c.is_positive());
    }
    for &q in &s_finite {
        check(&mut checks, format!("v_{q}(c) = 0"), val(c, q) == 0);
        let sym = crate::hilbert::hilbert_symbol(a, c, &Place::Finite(q)).map(|s| s.value());
        check(&mut checks, format!("(a,c)_{q} = -1"), sym == Ok(-1));
    }
    check(&mut checks, format!("v_{}(c) = 1", p.v1), val(c, p.v1) == 1);
    let q2_ok = !q2lead.is_zero() && val(&q2lead, p.v2) == 1;
    check(&mut checks, format!("v_{}(1 + cb^2) = 1", p.v2), q2_ok);
    check(&mut checks, format!("v_{}(b) = 0", p.v2), val(b, p.v2) == 0);
    ValidationReport { kind: Kind::V1, checks }
}

pub fn validate_params_v2(cp: &ConstructionParams) -> ValidationReport {
    let mut checks = Vec::new();
    let p = &cp.params;
    check(&mut checks, "kind is v2", p.kind == Kind::V2);
    common_checks(cp, &mut checks);
    if p.a.is_zero() || p.b.is_zero() || p.c.is_zero() {
        return ValidationReport { kind: Kind::V2, checks };
    }
    let (a, b, c) = (&p.a, &p.b, &p.c);
    let one = Rational::one();
    let symbol = |x: &Rational, y: &Rational, q: u64| {
        crate::hilbert::hilbert_symbol(x, y, &Place::Finite(q)).map(|s| s.value())
    };
    check(&mut checks, "b ∈ Z[1/2]", denominator_supported_on(b, &[2]));
    let real_in_s = p.s.contains(&Place::Real);
    let real_outside = p.s_prime.contains(&Place::Real) && !real_in_s;
    if real_in_s {
        check(&mut checks, "b < 0", b.is_negative());
    }
    if real_outside {
        check(&mut checks, "b > 0", b.is_positive());
    }
    for v in &p.s_prime {
        if let Place::Finite(q) = v {
            let (want, label) = if p.s.contains(v) { (-1, "-1") } else { (1, "+1") };
            check(&mut checks, format!("(a,b)_{q} = {label}"), symbol(a, b, *q) == Ok(want));
            check(&mut checks, format!("v_{q}(b) = 0"), val(b, *q) == 0);
        }
    }
    for (name, q) in [("v1", p.v1), ("v2", p.v2)] {
        check(
            &mut checks,
            format!("{name} = {q} ∉ S'"),
            !p.s_prime.contains(&Place::Finite(q)),
        );
    }
    let bc1 = b * c + &one;
    if real_in_s {
        check(&mut checks, "0 < c < -1/b", c.is_positive() && b.is_negative() && *c < -&one / b);
    }
    if real_outside {
        check(&mut checks, "bc + 1 < 0", bc1.is_negative());
    }
    for q in p.s_prime.iter().filter_map(Place::prime) {
        check(
            &mut checks,
            format!("v_{q}(bc+1) = v_{q}(a) + 2"),
            !bc1.is_zero() && val(&bc1, q) == val(a, q) + 2,
        );
    }
    for q in p.s_dprime.iter().filter_map(Place::prime) {
        check(&mut checks, format!("(a,c)_{q} = +1"), symbol(a, c, q) == Ok(1));
    }
    check(&mut checks, format!("v_{}(c) = 1", p.v1), val(c, p.v1) == 1);
    check(
        &mut checks,
        format!("v_{}(bc+1) = 1", p.v2),
        !bc1.is_zero() && val(&bc1, p.v2) == 1,
    );
    check(&mut checks, format!("v_{}(b) = 0", p.v2), val(b, p.v2) == 0);
    ValidationReport { kind: Kind::V2, checks }
}

pub fn validate(cp: &ConstructionParams) -> ValidationReport {
    match cp.params.kind {
        Kind::V1 => validate_params_v1(cp),
        Kind::V2 => validate_params_v2(cp),
    }
}

pub fn build(kind: Kind, field: &NumberField, s: &[Place], cfg: &BuildConfig) -> Result<(ChateletSurface, ConstructionParams)> {
    match kind {
        Kind::V1 => build_v1(field, s, cfg),
        Kind::V2 => build_v2(field, s, cfg),
    }
}

/// The parameters of the worked quadratic example.
pub fn example_v1() -> ConstructionParams {
    ConstructionParams {
        params: Parameters::new(
            Kind::V1,
            Rational::from_integer(73.into()),
            Rational::new(1.into(), 73.into()),
            Rational::from_integer(99.into()),
            &[Place::Finite(73)],
            11,
            23,
        )
        .expect("nonzero parameters"),
        field: NumberField::from_coeffs(&[-3, 0, 1]).expect("irreducible"),
    }
}

/// The parameters of the worked cubic example.
pub fn example_v2() -> ConstructionParams {
    ConstructionParams {
        params: Parameters::new(
            Kind::V2,
            Rational::from_integer(377.into()),
            Rational::from_integer(5.into()),
            Rational::from_integer(878755181.into()),
            &[Place::Finite(13)],
            43,
            41,
        )
        .expect("nonzero parameters"),
        field: NumberField::from_coeffs(&[-1, -2, 1, 1]).expect("irreducible"),
    }
}
