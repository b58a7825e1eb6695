//! Châtelet surfaces `y² − a z² = q1(x)·q2(x)` with even quadratic factors,
//! local points, evaluation of the quaternion class `(a, q1(x))`, and the
//! rule prover for the two parameter families.

mod local;
mod rules;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{format_rational, is_rational_square, odd_support, parse_rational, serde_rational, Rational};
use crate::error::{Error, Result};
use crate::place::Place;

pub use local::{evaluate_invariant, evaluate_witness, invariant_set, local_solvable, InvariantSet, SearchBounds, Witness};
pub use rules::{
    claimed_invariants, classify_place, constancy_certificate, evaluate_rules, Conclusion, Hypothesis,
    PlaceClass, RuleOutcome,
};

/// `lead·x² + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvenQuadratic {
    #[serde(with = "serde_rational")]
    pub lead: Rational,
    #[serde(with = "serde_rational")]
    pub constant: Rational,
}

impl EvenQuadratic {
    pub fn new(lead: Rational, constant: Rational) -> Result<EvenQuadratic> {
        if lead.is_zero() || constant.is_zero() {
            return Err(Error::InvalidInput("even quadratic needs nonzero coefficients".into()));
        }
        Ok(EvenQuadratic { lead, constant })
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        &self.lead * x * x + &self.constant
    }

    /// `x²` at the roots, i.e. `−constant/lead`.
    pub fn root_square(&self) -> Rational {
        -&self.constant / &self.lead
    }
}

impl fmt::Display for EvenQuadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})x^2 + ({})", self.lead, self.constant)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChateletSurface {
    #[serde(with = "serde_rational")]
    pub a: Rational,
    pub q1: EvenQuadratic,
    pub q2: EvenQuadratic,
}

impl ChateletSurface {
    pub fn new(a: Rational, q1: EvenQuadratic, q2: EvenQuadratic) -> Result<ChateletSurface> {
        if a.is_zero() {
            return Err(Error::ZeroArgument);
        }
        if is_rational_square(&a) {
            return Err(Error::SquareA);
        }
        if &q1.lead * &q2.constant == &q2.lead * &q1.constant {
            return Err(Error::InvalidInput("q1 and q2 share a root".into()));
        }
        Ok(ChateletSurface { a, q1, q2 })
    }

    /// `(cx² + 1)((1 + cb²)x² + b²)`.
    pub fn v1(a: &Rational, b: &Rational, c: &Rational) -> Result<ChateletSurface> {
        let b2 = b * b;
        ChateletSurface::new(
            a.clone(),
            EvenQuadratic::new(c.clone(), Rational::one())?,
            EvenQuadratic::new(Rational::one() + c * &b2, b2)?,
        )
    }

    /// `(x² − c)(bx² − bc − 1)`.
    pub fn v2(a: &Rational, b: &Rational, c: &Rational) -> Result<ChateletSurface> {
        ChateletSurface::new(
            a.clone(),
            EvenQuadratic::new(Rational::one(), -c)?,
            EvenQuadratic::new(b.clone(), -(b * c) - Rational::one())?,
        )
    }

    pub fn p_at(&self, x: &Rational) -> Rational {
        self.q1.eval(x) * self.q2.eval(x)
    }
}

impl fmt::Display for ChateletSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 - ({})z^2 = [{}][{}]", self.a, self.q1, self.q2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum XCoordinate {
    Finite(Rational),
    Infinity,
}

impl fmt::Display for XCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XCoordinate::Finite(x) => write!(f, "{}", format_rational(x)),
            XCoordinate::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for XCoordinate {
    type Err = Error;

    fn from_str(s: &str) -> Result<XCoordinate> {
        match s.trim() {
            "inf" | "infinity" => Ok(XCoordinate::Infinity),
            t => Ok(XCoordinate::Finite(parse_rational(t)?)),
        }
    }
}

impl Serialize for XCoordinate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for XCoordinate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A local invariant in `{0, 1/2} ⊂ Q/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InvariantValue {
    Zero,
    Half,
}

impl InvariantValue {
    pub fn from_symbol_is_plus(plus: bool) -> InvariantValue {
        if plus {
            InvariantValue::Zero
        } else {
            InvariantValue::Half
        }
    }
}

impl Add for InvariantValue {
    type Output = InvariantValue;

    fn add(self, rhs: InvariantValue) -> InvariantValue {
        if self == rhs {
            InvariantValue::Zero
        } else {
            InvariantValue::Half
        }
    }
}

impl std::iter::Sum for InvariantValue {
    fn sum<I: Iterator<Item = InvariantValue>>(iter: I) -> InvariantValue {
        iter.fold(InvariantValue::Zero, |acc, v| acc + v)
    }
}

impl fmt::Display for InvariantValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvariantValue::Zero => "0",
            InvariantValue::Half => "1/2",
        })
    }
}

impl FromStr for InvariantValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<InvariantValue> {
        match s.trim() {
            "0" => Ok(InvariantValue::Zero),
            "1/2" => Ok(InvariantValue::Half),
            t => Err(Error::Parse(format!("bad invariant value {t:?}"))),
        }
    }
}

impl Serialize for InvariantValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for InvariantValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    V1,
    V2,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::V1 => "v1",
            Kind::V2 => "v2",
        })
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "v1" => Ok(Kind::V1),
            "v2" => Ok(Kind::V2),
            t => Err(Error::Parse(format!("unknown kind {t:?}"))),
        }
    }
}

/// `{Real if a < 0} ∪ {odd p : v_p(a) odd}`.
pub fn s_prime_of(a: &Rational) -> Result<Vec<Place>> {
    let mut out = Vec::new();
    if a.is_negative() {
        out.push(Place::Real);
    }
    for p in odd_support(a)? {
        if crate::arith::val(a, p) % 2 != 0 {
            out.push(Place::Finite(p));
        }
    }
    Ok(out)
}

/// `{odd p : v_p(b) ≠ 0}`.
pub fn s_dprime_of(b: &Rational) -> Result<Vec<Place>> {
    Ok(odd_support(b)?.into_iter().map(Place::Finite).collect())
}

/// The data `(a, b, c, S, S′, S″, v1, v2)` of either family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub kind: Kind,
    #[serde(with = "serde_rational")]
    pub a: Rational,
    #[serde(with = "serde_rational")]
    pub b: Rational,
    #[serde(with = "serde_rational")]
    pub c: Rational,
    pub s: Vec<Place>,
    pub s_prime: Vec<Place>,
    pub s_dprime: Vec<Place>,
    pub v1: u64,
    pub v2: u64,
}

impl Parameters {
    /// Fills in `S′` and `S″` from `a` and `b`.
    pub fn new(kind: Kind, a: Rational, b: Rational, c: Rational, s: &[Place], v1: u64, v2: u64) -> Result<Parameters> {
        if a.is_zero() || b.is_zero() || c.is_zero() {
            return Err(Error::ZeroArgument);
        }
        let s: BTreeSet<Place> = s.iter().copied().collect();
        Ok(Parameters {
            kind,
            s_prime: s_prime_of(&a)?,
            s_dprime: s_dprime_of(&b)?,
            a,
            b,
            c,
            s: s.into_iter().collect(),
            v1,
            v2,
        })
    }

    pub fn surface(&self) -> Result<ChateletSurface> {
        match self.kind {
            Kind::V1 => ChateletSurface::v1(&self.a, &self.b, &self.c),
            Kind::V2 => ChateletSurface::v2(&self.a, &self.b, &self.c),
        }
    }

    /// The finite set on which per-place records are kept.
    pub fn support(&self) -> BTreeSet<Place> {
        let mut out: BTreeSet<Place> = [Place::Real, Place::Finite(2), Place::Finite(self.v1), Place::Finite(self.v2)]
            .into_iter()
            .collect();
        out.extend(self.s.iter().chain(&self.s_prime).chain(&self.s_dprime).copied());
        out
    }
}
