//! Exact symbolic arithmetic: Laurent polynomials with rational exponents,
//! bivariate rational generating functions in `(p, t)`, and their univariate
//! specializations.

pub mod cyclotomic;
pub mod fracpoly;
pub mod genfun;
pub mod json;
pub mod poly;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};

pub use fracpoly::{FracPoly, Var};
pub use genfun::GenFun;
pub use poly::{Mono, Poly, UPoly};

/// Exponents are exact small rationals.
pub type Exp = Ratio<i64>;
/// Coefficients are exact arbitrary-precision rationals.
pub type Rat = BigRational;

pub fn exp(n: i64, d: i64) -> Exp {
    Exp::new(n, d)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}
