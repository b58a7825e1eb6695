//! Construction and exact certification of Châtelet surfaces
//! `y² − a·z² = q₁(x)·q₂(x)` over Q whose local Brauer–Manin invariants
//! follow a prescribed pattern, together with the number-theoretic toolkit
//! (valuations, square classes, Hilbert symbols, CRT solving, complete
//! splitting of primes in monogenic number fields) needed to verify them.

pub mod arith;
pub mod certify;
pub mod chatelet;
pub mod construct;
mod error;
pub mod fields;
pub mod hilbert;
mod place;
pub mod worked;

pub use arith::Rational;
pub use error::{Error, Result};
pub use place::{parse_place_list, Place};
