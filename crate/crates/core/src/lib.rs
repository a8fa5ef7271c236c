//! Exact densities of polynomials over local fields with a prescribed tame
//! splitting type.
//!
//! The crate is organized bottom-up:
//!
//! * [`symbolic`] — exact rational functions in `(p, t)` and in `q`;
//! * [`splitting`] — splitting types and the combinatorics of one recursion step;
//! * [`engine`] — the memoized generating-function recursion and the density assembly;
//! * [`oracle`] — brute-force verification on truncated Teichmüller expansions;
//! * [`cli`] — the command-line surface.

pub mod arith;
pub mod cli;
pub mod engine;
pub mod error;
pub mod oracle;
pub mod splitting;
pub mod symbolic;
