//! Roots of univariate polynomials from power-series expansions of the
//! differential resolvent in the constant term.
//!
//! The pipeline treats the constant term of `a_n x^n + ... + a_1 x + s` as a
//! parameter, builds the linear ODE in `s` satisfied by every root branch,
//! turns it into a coefficient recurrence, expands each branch around `s = 0`
//! and finally evaluates at `s = a_0`. An Aberth iteration checks the result.

pub mod algebra;
pub mod cli;
pub mod oracle;
pub mod resolvent;
pub mod series;
