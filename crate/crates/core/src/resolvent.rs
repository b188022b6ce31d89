//! Differential resolvent of `p(x, s) = a_n x^n + ... + a_1 x + s`.
//!
//! Every root branch `x(s)` satisfies a linear ODE of order `n - 1` with
//! polynomial coefficients:
//!
//! ```text
//! m_1 x^(n-1) + ... + m_{n-1} x' + m_n x + m_{n+1} = 0
//! ```
//!
//! The derivatives are expressed as `N_i(x) / p'(x)^(2i-1)`, the equation is
//! cleared of denominators and reduced modulo `p`, and the `m` vector is the
//! nullspace of the resulting linear system. Shifting `x = y - a_{n-1}/(n a_n)`
//! removes the constant term.

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{int, normalize_vector, poly_json, AlgebraError, PolyMatrix, Rational, UniPoly, XSPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolventError {
    #[error("polynomial degree {0} is below 2")]
    DegreeTooLow(usize),
    #[error("polynomial must have s-free x-coefficients and constant term s")]
    NotParametric,
    #[error("no resolvent of order {0} found")]
    NoResolvent(usize),
    #[error("degenerate polynomial: resolvent system has a {dim}-dimensional solution space")]
    Degenerate { dim: usize },
    #[error("homogenization failed: constant term {residual} survives the shift")]
    HomogenizationFailed { residual: String },
    #[error(transparent)]
    Algebra(AlgebraError),
}

impl From<AlgebraError> for ResolventError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::TrivialNullspace => ResolventError::NoResolvent(0),
            AlgebraError::DegenerateNullspace { dim } => ResolventError::Degenerate { dim },
            other => ResolventError::Algebra(other),
        }
    }
}

/// `d^i x / ds^i = numerator(x) / p'(x)^denominator_exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicitDerivative {
    pub order: usize,
    pub numerator: UniPoly,
    pub denominator_exponent: usize,
}

/// The `x`-part `a_n x^n + ... + a_1 x` of `p(x, s) = a_n x^n + ... + a_1 x + s`.
pub(crate) fn split_parametric(p: &XSPoly) -> Result<UniPoly, ResolventError> {
    let n = p.degree_x().unwrap_or(0);
    if n < 2 {
        return Err(ResolventError::DegreeTooLow(n));
    }
    if p.coeff(0) != UniPoly::var() {
        return Err(ResolventError::NotParametric);
    }
    let mut coeffs = vec![Rational::zero()];
    for k in 1..=n {
        let c = p.coeff(k);
        if !c.is_constant() {
            return Err(ResolventError::NotParametric);
        }
        coeffs.push(c.coeff(0));
    }
    Ok(UniPoly::new(coeffs))
}

/// Numerators of the first `k_max` implicit derivatives, via
/// `N_1 = -1`, `N_{i+1} = -(N_i' p' - (2i - 1) N_i p'')`.
pub fn implicit_derivatives(p: &XSPoly, k_max: usize) -> Result<Vec<ImplicitDerivative>, ResolventError> {
    let xpart = split_parametric(p)?;
    Ok(implicit_derivatives_of(&xpart, k_max))
}

pub(crate) fn implicit_derivatives_of(xpart: &UniPoly, k_max: usize) -> Vec<ImplicitDerivative> {
    let dp = xpart.derivative();
    let ddp = dp.derivative();
    let mut out = Vec::with_capacity(k_max);
    let mut numerator = UniPoly::constant(int(-1));
    for i in 1..=k_max {
        let next = if i < k_max {
            let lhs = &numerator.derivative() * &dp;
            let rhs = (&numerator * &ddp).scale(&int(2 * i as i64 - 1));
            Some(-(&lhs - &rhs))
        } else {
            None
        };
        out.push(ImplicitDerivative {
            order: i,
            numerator: std::mem::take(&mut numerator),
            denominator_exponent: 2 * i - 1,
        });
        if let Some(next) = next {
            numerator = next;
        }
    }
    out
}

/// Linear system in `(m_1, ..., m_{n+1})`: one row per power `x^{n-1}, ..., x^0`
/// of the cleared and reduced resolvent.
pub fn assemble_system(p: &XSPoly, derivs: &[ImplicitDerivative]) -> Result<PolyMatrix, ResolventError> {
    let xpart = split_parametric(p)?;
    let n = xpart.degree().unwrap_or(0);
    if derivs.len() != n - 1 {
        return Err(ResolventError::NoResolvent(n - 1));
    }
    let dp = xpart.derivative();
    let clear = 2 * (n - 1) - 1;
    let mut columns: Vec<UniPoly> = Vec::with_capacity(n + 1);
    for col in 0..n - 1 {
        let d = &derivs[n - 2 - col];
        columns.push(&d.numerator * &dp.pow(clear - d.denominator_exponent));
    }
    let cleared = dp.pow(clear);
    columns.push(&UniPoly::var() * &cleared);
    columns.push(cleared);

    let reduced = columns
        .iter()
        .map(|c| XSPoly::from_x_poly(c).reduce_mod(p))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = (0..n)
        .rev()
        .map(|k| reduced.iter().map(|r| r.coeff(k)).collect())
        .collect();
    Ok(PolyMatrix::new(rows)?)
}

/// Linear ODE `P_r y^(r) + ... + P_0 y = inhomog` with polynomial coefficients in `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolventODE {
    pub order: usize,
    /// `[P_r, ..., P_1, P_0]`.
    pub coeffs: Vec<UniPoly>,
    pub inhomog: UniPoly,
    /// `a_{n-1} / (n a_n)`; the root is `x = y - shift`.
    pub shift: Rational,
    /// Whether the shift has been applied, i.e. the ODE is in `y`.
    pub shifted: bool,
}

impl ResolventODE {
    /// The raw `(m_1, ..., m_{n+1})` vector of the unshifted equation.
    pub fn m_vector(&self) -> Vec<UniPoly> {
        let mut v = self.coeffs.clone();
        v.push(-&self.inhomog);
        v
    }

    pub fn is_homogeneous(&self) -> bool {
        self.inhomog.is_zero()
    }

    /// Leading coefficient `P_r`.
    pub fn leading(&self) -> &UniPoly {
        &self.coeffs[0]
    }

    /// Applies the ODE operator to a truncated series `y = sum c_i s^i`, returning
    /// the product series minus the right-hand side.
    pub fn apply_to_series(&self, series: &[Rational]) -> UniPoly {
        let y = UniPoly::new(series.to_vec());
        let mut total = -&self.inhomog;
        let mut derivative = y;
        for (j, coeff) in self.coeffs.iter().rev().enumerate() {
            if j > 0 {
                derivative = derivative.derivative();
            }
            total = &total + &(coeff * &derivative);
        }
        total
    }
}

impl ResolventODE {
    /// `{order, shift, coefficients}` with coefficient lists ascending in `s`,
    /// ordered from the highest derivative down.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "order": self.order,
            "shift": self.shift.to_string(),
            "coefficients": self.coeffs.iter().map(poly_json).collect::<Vec<_>>(),
        })
    }
}

/// Builds the order `n - 1` resolvent of `p` in the root variable `x`.
pub fn solve_resolvent(p: &XSPoly) -> Result<ResolventODE, ResolventError> {
    let xpart = split_parametric(p)?;
    let n = xpart.degree().unwrap_or(0);
    let derivs = implicit_derivatives_of(&xpart, n - 1);
    let system = assemble_system(p, &derivs)?;
    let m = system.nullspace().map_err(|e| match e {
        AlgebraError::TrivialNullspace => ResolventError::NoResolvent(n - 1),
        other => other.into(),
    })?;
    if m[0].is_zero() {
        return Err(ResolventError::NoResolvent(n - 1));
    }
    let an = xpart.coeff(n);
    let shift = xpart.coeff(n - 1) / (an * int(n as i64));
    let mut coeffs = m;
    let constant = coeffs.pop().expect("n + 1 entries");
    Ok(ResolventODE {
        order: n - 1,
        coeffs,
        inhomog: -constant,
        shift,
        shifted: false,
    })
}

/// `n a_n m_{n+1} - a_{n-1} m_n`, which vanishes for every valid resolvent since
/// the sum of all roots is constant in `s`.
pub fn trace_identity_residual(ode: &ResolventODE, p: &XSPoly) -> Result<UniPoly, ResolventError> {
    let xpart = split_parametric(p)?;
    let n = xpart.degree().unwrap_or(0);
    let m = ode.m_vector();
    let lhs = m[n].scale(&(xpart.coeff(n) * int(n as i64)));
    let rhs = m[n - 1].scale(&xpart.coeff(n - 1));
    Ok(&lhs - &rhs)
}

/// Substitutes `x = y - shift` and checks that the constant term cancels exactly.
pub fn shift_homogenize(ode: &ResolventODE, p: &XSPoly) -> Result<ResolventODE, ResolventError> {
    if ode.shifted {
        return Ok(ode.clone());
    }
    let xpart = split_parametric(p)?;
    let n = xpart.degree().unwrap_or(0);
    let shift = xpart.coeff(n - 1) / (xpart.coeff(n) * int(n as i64));
    let m = ode.m_vector();
    let m_n = &m[n - 1];
    // m_n (y - shift) + m_{n+1}
    let residual = &m[n] - &m_n.scale(&shift);
    if !residual.is_zero() {
        return Err(ResolventError::HomogenizationFailed {
            residual: residual.to_string(),
        });
    }
    let coeffs = normalize_vector(ode.coeffs.clone());
    Ok(ResolventODE {
        order: ode.order,
        coeffs,
        inhomog: UniPoly::zero(),
        shift,
        shifted: true,
    })
}
