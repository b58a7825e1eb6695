//! Serde adapters storing rationals as `"num/den"` strings.

use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

use super::{format_rational, parse_rational, Rational};

pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let s = String::deserialize(d)?;
    parse_rational(&s).map_err(D::Error::custom)
}
