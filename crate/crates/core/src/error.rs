use thiserror::Error;

use crate::place::Place;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("{0} is not an odd prime")]
    NotOddPrime(String),
    #[error("arguments are not coprime")]
    NotCoprime,
    #[error("prime {0} does not fit in 64 bits")]
    PrimeTooLarge(String),
    #[error("inconsistent congruence system: {0}")]
    Inconsistent(String),
    #[error("search exhausted: {0}")]
    Exhausted(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("polynomial is not irreducible over Q: {0}")]
    Reducible(String),
    #[error("irreducibility could not be decided: {0}")]
    IrreducibilityUndetermined(String),
    #[error("a is a square")]
    SquareA,
    #[error("fiber has no local point at {place} over x = {x}")]
    NoLocalPointOnFiber { place: Place, x: String },
    #[error("surface has no local point found at {0}")]
    NotLocallySolvable(Place),
    #[error("rule {case} failed: {condition}")]
    RuleHypothesisFailed { case: String, condition: String },
    #[error("split check failed: {0}")]
    SplitCheckFailed(String),
    #[error("solver exhausted: {0}")]
    SolverExhausted(String),
    #[error("parameter validation failed: {0}")]
    ValidationFailed(String),
    #[error("constancy not proven: {0}")]
    ConstancyNotProven(String),
    #[error("parse error: {0}")]
    Parse(String),
}
