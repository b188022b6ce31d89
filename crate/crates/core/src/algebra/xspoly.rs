//! Polynomials in `x` whose coefficients are polynomials in `s`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::poly::UniPoly;
use super::rational::{to_f64, Rational};
use super::AlgebraError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    S,
}

/// Ascending-in-`x` list of `s`-polynomials. The highest stored coefficient is
/// nonzero; the zero polynomial is the empty list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct XSPoly {
    coeffs: Vec<UniPoly>,
}

impl XSPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn new(mut coeffs: Vec<UniPoly>) -> Self {
        while coeffs.last().is_some_and(UniPoly::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// `a_n x^n + ... + a_1 x + s` from the ascending list `[a_1, ..., a_n]`.
    pub fn with_parameter(x_coeffs: &[Rational]) -> Self {
        let mut coeffs = vec![UniPoly::var()];
        coeffs.extend(x_coeffs.iter().cloned().map(UniPoly::constant));
        Self::new(coeffs)
    }

    /// Lifts a polynomial in `x` with rational coefficients.
    pub fn from_x_poly(p: &UniPoly) -> Self {
        Self::new(p.coeffs().iter().cloned().map(UniPoly::constant).collect())
    }

    pub fn coeffs(&self) -> &[UniPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> UniPoly {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree_x(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Rational coefficient of `x^k s^j`.
    pub fn coeff_at(&self, k: usize, j: usize) -> Rational {
        self.coeffs.get(k).map(|c| c.coeff(j)).unwrap_or_else(Rational::zero)
    }

    pub fn derivative(&self, var: Var) -> Self {
        match var {
            Var::X => Self::new(
                self.coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| c.scale(&Rational::from_integer((k as i64).into())))
                    .collect(),
            ),
            Var::S => Self::new(self.coeffs.iter().map(UniPoly::derivative).collect()),
        }
    }

    /// Specialises `s` to a rational value, giving a polynomial in `x`.
    pub fn at_s(&self, s: &Rational) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c.eval(s)).collect())
    }

    /// Numeric `x`-coefficients (ascending) at the rational point `s`.
    pub fn numeric_at_s(&self, s: &Rational) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .map(|c| Complex64::new(to_f64(&c.eval(s)), 0.0))
            .collect()
    }

    /// Numeric value at complex `(x, s)`.
    pub fn eval_complex(&self, x: Complex64, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c.eval_complex(s))
    }

    /// Returns the `x`-polynomial if no coefficient depends on `s`.
    pub fn as_x_poly(&self) -> Option<UniPoly> {
        self.coeffs
            .iter()
            .map(|c| c.is_constant().then(|| c.coeff(0)))
            .collect::<Option<Vec<_>>>()
            .map(UniPoly::new)
    }

    fn check_modulus(p: &XSPoly) -> Result<(usize, Rational), AlgebraError> {
        let n = p.degree_x().ok_or(AlgebraError::ZeroLeadingCoefficient)?;
        if n == 0 {
            return Err(AlgebraError::ConstantModulus);
        }
        let lead = &p.coeffs[n];
        if !lead.is_constant() {
            return Err(AlgebraError::NonConstantLeading);
        }
        Ok((n, lead.coeff(0)))
    }

    /// Reduces modulo `p` by repeatedly rewriting `x^n` as
    /// `-(a_{n-1} x^{n-1} + ... + a_0(s)) / a_n`. The result has `x`-degree below `n`.
    pub fn reduce_mod(&self, p: &XSPoly) -> Result<XSPoly, AlgebraError> {
        let (n, lead) = Self::check_modulus(p)?;
        let Some(deg) = self.degree_x() else {
            return Ok(Self::zero());
        };
        if deg < n {
            return Ok(self.clone());
        }
        let lead_inv = lead.recip();
        let tail: Vec<UniPoly> = p.coeffs[..n].iter().map(|c| -c.scale(&lead_inv)).collect();
        // powers[k] = x^(n+k) mod p, each of x-degree < n.
        let mut power = tail.clone();
        let mut acc: Vec<UniPoly> = self.coeffs[..n].to_vec();
        for k in n..=deg {
            let c = &self.coeffs[k];
            if !c.is_zero() {
                for (a, r) in acc.iter_mut().zip(&power) {
                    *a = &*a + &(c * r);
                }
            }
            if k < deg {
                // x^(k+1) = x * x^k: shift up, then fold the overflow x^n term back.
                let top = power.pop().unwrap_or_default();
                power.insert(0, UniPoly::zero());
                if !top.is_zero() {
                    for (a, r) in power.iter_mut().zip(&tail) {
                        *a = &*a + &(&top * r);
                    }
                }
            }
        }
        Ok(Self::new(acc))
    }

    /// Long division by `p` (leading coefficient constant in `s`).
    pub fn div_rem(&self, p: &XSPoly) -> Result<(XSPoly, XSPoly), AlgebraError> {
        let (n, lead) = Self::check_modulus(p)?;
        let lead_inv = lead.recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= n {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![UniPoly::zero(); rem.len() - n];
        for k in (0..quot.len()).rev() {
            let c = rem[k + n].scale(&lead_inv);
            if c.is_zero() {
                continue;
            }
            for (j, pc) in p.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * pc);
            }
            quot[k] = c;
        }
        rem.truncate(n);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn scale(&self, c: &UniPoly) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn one() -> Self {
        Self::new(vec![UniPoly::constant(Rational::one())])
    }
}

impl Add for &XSPoly {
    type Output = XSPoly;
    fn add(self, rhs: &XSPoly) -> XSPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        XSPoly::new((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl Sub for &XSPoly {
    type Output = XSPoly;
    fn sub(self, rhs: &XSPoly) -> XSPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        XSPoly::new((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl Mul for &XSPoly {
    type Output = XSPoly;
    fn mul(self, rhs: &XSPoly) -> XSPoly {
        if self.is_zero() || rhs.is_zero() {
            return XSPoly::zero();
        }
        let mut out = vec![UniPoly::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        XSPoly::new(out)
    }
}
