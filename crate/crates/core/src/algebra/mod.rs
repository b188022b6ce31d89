//! Exact arithmetic: rationals, dense polynomials in `s` and in `(x, s)`, and
//! fraction-free nullspaces of polynomial matrices.

mod matrix;
mod poly;
mod rational;
mod xspoly;

pub use matrix::{normalize_vector, PolyMatrix};
pub use poly::{content_of, UniPoly, UniPolyS};
pub use rational::{
    int, parse_rational, power_of_two_above, rat, rat_arith, to_complex, to_f64, ArithOp, Rational,
};
pub use xspoly::{Var, XSPoly};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial division left a nonzero remainder")]
    InexactDivision,
    #[error("modulus is constant in x")]
    ConstantModulus,
    #[error("modulus has a zero leading coefficient")]
    ZeroLeadingCoefficient,
    #[error("modulus leading coefficient depends on s")]
    NonConstantLeading,
    #[error("matrix rows must be nonempty and of equal length")]
    NotRectangular,
    #[error("nullspace is zero-dimensional")]
    TrivialNullspace,
    #[error("nullspace has dimension {dim}, expected 1")]
    DegenerateNullspace { dim: usize },
}

/// Serializes a polynomial as its ascending coefficient list, each rational as `p/q`.
pub fn poly_to_strings(p: &UniPoly) -> Vec<String> {
    p.coeffs().iter().map(ToString::to_string).collect()
}

/// Inverse of [`poly_to_strings`].
pub fn poly_from_strings<S: AsRef<str>>(items: &[S]) -> Option<UniPoly> {
    items
        .iter()
        .map(|s| parse_rational(s.as_ref()))
        .collect::<Option<Vec<_>>>()
        .map(UniPoly::new)
}

/// JSON form of a rational: a bare number for integers, `"p/q"` otherwise.
pub fn rational_json(r: &Rational) -> serde_json::Value {
    use std::str::FromStr;
    if r.is_integer() {
        if let Ok(n) = serde_json::Number::from_str(&r.to_string()) {
            return serde_json::Value::Number(n);
        }
    }
    serde_json::Value::String(r.to_string())
}

pub fn poly_json(p: &UniPoly) -> serde_json::Value {
    serde_json::Value::Array(p.coeffs().iter().map(rational_json).collect())
}
