//! Error types shared across modules.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("no power-series expansion in t around t = 0")]
    NoSeriesExpansion,
    #[error("exponent not divisible by f_base = {f_base} in {value}")]
    NonIntegralExponent { f_base: u64, value: String },
    #[error("evaluation hit a pole")]
    Pole,
    #[error("malformed serialized value: {0}")]
    Format(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplittingError {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("base (e={e_base}, f={f_base}) does not divide component (e={e}, f={f})")]
    Divisibility {
        e: u64,
        f: u64,
        e_base: u64,
        f_base: u64,
    },
    #[error("p = {p} is wild for ramification index {e}")]
    WildInput { p: u64, e: u64 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("empty splitting type")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Splitting(#[from] SplittingError),
    #[error("recursion depth {depth} exceeded guard {limit}")]
    DepthExceeded { depth: usize, limit: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Splitting(#[from] SplittingError),
    #[error("instance too large: {patterns} patterns exceed the guard {limit}")]
    TooLarge { patterns: u128, limit: u128 },
    #[error("oracle requires base (1,1)")]
    UnsupportedBase,
    #[error("expansion lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
}
