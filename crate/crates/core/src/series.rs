//! Power-series expansion of the root branches around `s = 0`.
//!
//! Substituting `y = sum b_i s^i` into the homogeneous resolvent gives a linear
//! recurrence with index-polynomial coefficients; the first `n - 1` Taylor
//! coefficients of a branch seed it and every later coefficient follows.

use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg};

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{int, power_of_two_above, to_complex, Rational, UniPoly, XSPoly};
use crate::oracle::{self, RootEstimate};
use crate::resolvent::{implicit_derivatives_of, split_parametric, ResolventError, ResolventODE};

/// Absolute residual a converged root must reach.
pub const RESIDUAL_TOL: f64 = 1e-8;
pub const DEFAULT_TERMS: usize = 64;
const ABERTH_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("{0} is a multiple root of p(x, 0)")]
    MultipleSeedRoot(String),
    #[error("p'(x) vanishes at seed {0}")]
    SeedFailed(Complex64),
    #[error("s = 0 is a singular point of the resolvent")]
    SingularPoint,
    #[error("resolvent is not homogeneous")]
    NotHomogeneous,
    #[error("recurrence cannot determine the coefficient at index {0}")]
    SingularIndex(usize),
    #[error("expected {expected} seed coefficients, got {got}")]
    SeedCount { expected: usize, got: usize },
    #[error("series diverges at |s| / radius = {rho:.6}")]
    Diverged { rho: f64 },
    #[error("seed root finder failed: {0}")]
    Oracle(#[from] oracle::OracleError),
    #[error(transparent)]
    Resolvent(#[from] ResolventError),
}

/// Divides all coefficients and `a0` by the smallest power of two (at least 1)
/// exceeding every magnitude. The constant term stays the bare parameter `s`.
pub fn normalize_coefficients(
    p: &XSPoly,
    a0: &Rational,
) -> Result<(XSPoly, Rational, Rational), SeriesError> {
    let xpart = split_parametric(p)?;
    let bound = xpart
        .coeffs()
        .iter()
        .chain(std::iter::once(a0))
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    let factor = power_of_two_above(&bound);
    let inv = factor.recip();
    let scaled: Vec<Rational> = xpart.coeffs()[1..].iter().map(|c| c * &inv).collect();
    Ok((XSPoly::with_parameter(&scaled), a0 * &inv, factor))
}

/// A root of `p(x, 0)`: the value of one branch at `s = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Seed {
    pub value: Complex64,
    /// Set for the rational seed `x = 0`.
    pub exact: Option<Rational>,
}

/// Rejects `p` whose `p(x, 0)` has a repeated root.
pub fn check_squarefree(p: &XSPoly) -> Result<(), SeriesError> {
    let xpart = split_parametric(p)?;
    let g = xpart.gcd(&xpart.derivative());
    match g.degree() {
        Some(0) | None => Ok(()),
        Some(1) => Err(SeriesError::MultipleSeedRoot(
            (-g.coeff(0) / g.coeff(1)).to_string(),
        )),
        Some(_) => {
            let roots = oracle::aberth_roots(&g.to_complex_coeffs(), ABERTH_TOL)?;
            let names: Vec<String> = roots.iter().map(|r| format!("{:.6}", r.value)).collect();
            Err(SeriesError::MultipleSeedRoot(names.join(", ")))
        }
    }
}

/// The `n` seeds: the exact root `0`, then the roots of `a_n x^{n-1} + ... + a_1`
/// Newton-polished and ordered by real then imaginary part.
pub fn branch_seeds(p: &XSPoly) -> Result<Vec<Seed>, SeriesError> {
    check_squarefree(p)?;
    let xpart = split_parametric(p)?;
    let cofactor: Vec<Complex64> = xpart.coeffs()[1..].iter().map(to_complex).collect();
    let mut seeds = vec![Seed {
        value: Complex64::zero(),
        exact: Some(Rational::zero()),
    }];
    if cofactor.len() < 2 {
        return Ok(seeds);
    }
    let mut others: Vec<Complex64> = oracle::aberth_roots(&cofactor, ABERTH_TOL)?
        .into_iter()
        .map(|r| {
            let mut z = r.value;
            // Real coefficients: snap numerically real roots onto the axis.
            if z.im.abs() <= 1e-10 * z.norm().max(1.0) {
                z.im = 0.0;
            }
            oracle::newton_polish(&cofactor, z).unwrap_or(z)
        })
        .collect();
    others.sort_by(|a, b| {
        let key = |z: &Complex64| ((z.re * 1e9).round(), (z.im * 1e9).round());
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    seeds.extend(others.into_iter().map(|value| Seed { value, exact: None }));
    Ok(seeds)
}

fn factorial(k: usize) -> Rational {
    (1..=k as i64).fold(Rational::one(), |acc, i| acc * int(i))
}

/// Taylor coefficients `b_0, ..., b_{count-1}` of the branch through `b0`:
/// `b_k = N_k(b0) / (k! p'(b0)^(2k-1))`.
pub fn taylor_seeds(p: &XSPoly, b0: Complex64, count: usize) -> Result<Vec<Complex64>, SeriesError> {
    let xpart = split_parametric(p)?;
    let dp = xpart.derivative().eval_complex(b0);
    if dp.norm() == 0.0 {
        return Err(SeriesError::SeedFailed(b0));
    }
    let derivs = implicit_derivatives_of(&xpart, count.saturating_sub(1));
    let mut out = vec![b0];
    for d in derivs.iter().take(count.saturating_sub(1)) {
        let k = d.order;
        let denom = dp.powi(d.denominator_exponent as i32) * crate::algebra::to_f64(&factorial(k));
        out.push(d.numerator.eval_complex(b0) / denom);
    }
    out.truncate(count);
    Ok(out)
}

/// Exact counterpart of [`taylor_seeds`] for a rational seed.
pub fn taylor_seeds_exact(p: &XSPoly, b0: &Rational, count: usize) -> Result<Vec<Rational>, SeriesError> {
    let xpart = split_parametric(p)?;
    let dp = xpart.derivative().eval(b0);
    if dp.is_zero() {
        return Err(SeriesError::SeedFailed(to_complex(b0)));
    }
    let derivs = implicit_derivatives_of(&xpart, count.saturating_sub(1));
    let mut out = vec![b0.clone()];
    for d in &derivs {
        let denom = num_traits::pow(dp.clone(), d.denominator_exponent) * factorial(d.order);
        out.push(d.numerator.eval(b0) / denom);
    }
    out.truncate(count);
    Ok(out)
}

/// `sum_d q_d(i) b_{i+d} = 0` for all `i >= 0`, with `b_j = 0` for `j < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recurrence {
    pub order: usize,
    /// Offset `d` to the band polynomial `q_d(i)`.
    pub bands: BTreeMap<i64, UniPoly>,
    pub max_offset: i64,
}

impl Recurrence {
    pub fn leading(&self) -> &UniPoly {
        &self.bands[&self.max_offset]
    }

    /// Left-hand side of the recurrence at index `i` for a given coefficient list.
    pub fn residual_at(&self, coeffs: &[Rational], i: usize) -> Rational {
        self.bands
            .iter()
            .filter_map(|(&d, q)| {
                let idx = i as i64 + d;
                (idx >= 0).then(|| q.eval(&int(i as i64)) * coeffs[idx as usize].clone())
            })
            .sum()
    }
}

/// `(i + d)(i + d - 1) ... (i + d - j + 1)` as a polynomial in `i`.
fn falling(d: i64, j: usize) -> UniPoly {
    (0..j as i64).fold(UniPoly::one(), |acc, l| {
        &acc * &UniPoly::new(vec![int(d - l), Rational::one()])
    })
}

/// Matches the coefficient of `s^i` after substituting the series into the ODE.
pub fn extract_recurrence(ode: &ResolventODE) -> Result<Recurrence, SeriesError> {
    if !ode.is_homogeneous() {
        return Err(SeriesError::NotHomogeneous);
    }
    if ode.leading().coeff(0).is_zero() {
        return Err(SeriesError::SingularPoint);
    }
    let order = ode.order;
    let mut bands: BTreeMap<i64, UniPoly> = BTreeMap::new();
    // coeffs are [P_r, ..., P_0]; P_j multiplies y^(j).
    for (idx, pj) in ode.coeffs.iter().enumerate() {
        let j = order - idx;
        for (t, c) in pj.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = j as i64 - t as i64;
            let term = falling(d, j).scale(c);
            let entry = bands.entry(d).or_default();
            *entry = &*entry + &term;
        }
    }
    bands.retain(|_, q| !q.is_zero());
    let max_offset = *bands.keys().next_back().ok_or(SeriesError::SingularPoint)?;
    Ok(Recurrence {
        order,
        bands,
        max_offset,
    })
}

/// Field operations needed to run a recurrence: exact rationals or `Complex64`.
pub trait SeriesScalar:
    Clone + Zero + Add<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn from_rational(r: &Rational) -> Self;
}

impl SeriesScalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl SeriesScalar for Complex64 {
    fn from_rational(r: &Rational) -> Self {
        to_complex(r)
    }
}

/// Coefficients `b_0 ..= b_last` from `max_offset` seeds.
pub fn run_recurrence<T: SeriesScalar>(
    rec: &Recurrence,
    seeds: &[T],
    last: usize,
) -> Result<Vec<T>, SeriesError> {
    let r = rec.max_offset.max(0) as usize;
    if seeds.len() != r {
        return Err(SeriesError::SeedCount {
            expected: r,
            got: seeds.len(),
        });
    }
    let mut b: Vec<T> = seeds.to_vec();
    let mut i = 0usize;
    while b.len() <= last {
        let at = int(i as i64);
        let lead = rec.leading().eval(&at);
        if lead.is_zero() {
            return Err(SeriesError::SingularIndex(i));
        }
        let mut acc = T::zero();
        for (&d, q) in rec.bands.range(..rec.max_offset) {
            let idx = i as i64 + d;
            if idx < 0 {
                continue;
            }
            let w = q.eval(&at);
            if !w.is_zero() {
                acc = acc + T::from_rational(&w) * b[idx as usize].clone();
            }
        }
        b.push(-acc / T::from_rational(&lead));
        i += 1;
    }
    b.truncate(last + 1);
    Ok(b)
}

/// Radius of convergence from the tail: one over the median of
/// `|b_j / b_i|^(1 / (j - i))` across consecutive nonzero coefficients whose
/// later index lies in the last third. Infinite for a vanishing tail, zero when
/// the ratios blow up.
pub fn estimate_radius(coeffs: &[Complex64]) -> f64 {
    let mags: Vec<f64> = coeffs.iter().map(|c| c.norm()).collect();
    let n = mags.len();
    if n == 0 {
        return f64::INFINITY;
    }
    let negligible = |i: usize| {
        let left = if i > 0 { mags[i - 1] } else { 0.0 };
        let right = mags.get(i + 1).copied().unwrap_or(0.0);
        mags[i] == 0.0 || mags[i] <= 1e-12 * left.max(right)
    };
    let nonzero: Vec<usize> = (0..n).filter(|&i| !negligible(i)).collect();
    let tail_start = n - (n / 3).max(1);
    let mut ratios: Vec<f64> = nonzero
        .windows(2)
        .filter(|w| w[1] >= tail_start)
        .map(|w| (mags[w[1]] / mags[w[0]]).powf(1.0 / (w[1] - w[0]) as f64))
        .collect();
    if ratios.is_empty() {
        return f64::INFINITY;
    }
    if ratios.iter().any(|r| !r.is_finite()) {
        return 0.0;
    }
    ratios.sort_by(f64::total_cmp);
    let m = ratios.len();
    let median = if m % 2 == 1 {
        ratios[m / 2]
    } else {
        0.5 * (ratios[m / 2 - 1] + ratios[m / 2])
    };
    if median == 0.0 {
        f64::INFINITY
    } else {
        1.0 / median
    }
}

/// One root branch expanded around `s = 0`. The stored series is in the shifted
/// variable `y = x + shift`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesBranch {
    pub id: usize,
    /// `x(0)`.
    pub seed: Complex64,
    pub exact_seed: Option<Rational>,
    /// `y`-series coefficients that seed the recurrence.
    pub seeds: Vec<Complex64>,
    pub coefficients: Vec<Complex64>,
    pub exact_coefficients: Option<Vec<Rational>>,
    pub shift: Rational,
    pub scale: f64,
    /// `coefficients[i] * scale^i`, the series in `t = s / scale`.
    pub scaled: Vec<Complex64>,
    pub radius_estimate: f64,
}

/// Expands the branch through `seed` to `terms` coefficients. The rational seed
/// is expanded in exact arithmetic.
pub fn expand_branch(
    p: &XSPoly,
    rec: &Recurrence,
    shift: &Rational,
    id: usize,
    seed: &Seed,
    terms: usize,
) -> Result<SeriesBranch, SeriesError> {
    let r = rec.max_offset.max(0) as usize;
    let last = terms.max(r).saturating_sub(1);
    let (seeds, coefficients, exact_coefficients) = match &seed.exact {
        Some(b0) => {
            let mut ys = taylor_seeds_exact(p, b0, r)?;
            ys[0] = &ys[0] + shift;
            let exact = run_recurrence(rec, &ys, last)?;
            let numeric: Vec<Complex64> = exact.iter().map(to_complex).collect();
            (ys.iter().map(to_complex).collect(), numeric, Some(exact))
        }
        None => {
            let mut ys = taylor_seeds(p, seed.value, r)?;
            ys[0] += to_complex(shift);
            let numeric = run_recurrence(rec, &ys, last)?;
            (ys, numeric, None)
        }
    };
    let radius_estimate = estimate_radius(&coefficients);
    Ok(SeriesBranch {
        id,
        seed: seed.value,
        exact_seed: seed.exact.clone(),
        seeds,
        scaled: coefficients.clone(),
        coefficients,
        exact_coefficients,
        shift: shift.clone(),
        scale: 1.0,
        radius_estimate,
    })
}

/// Substitutes `s = e t`: stores `b_i e^i` so that evaluation at `s` uses `t = s / e`.
pub fn rescale(branch: &SeriesBranch, e: f64) -> SeriesBranch {
    assert!(e > 0.0, "scale must be positive");
    let mut out = branch.clone();
    let mut factor = 1.0;
    out.scaled = branch
        .coefficients
        .iter()
        .map(|c| {
            let v = c * factor;
            factor *= e;
            v
        })
        .collect();
    out.scale = e;
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchStatus {
    Converged,
    /// Inside the radius but the truncated series misses the residual target.
    Truncated,
    Diverged,
    SingularIndex,
    SeedFailed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub estimate: RootEstimate,
    pub tail_error: f64,
    pub rho: f64,
    pub status: BranchStatus,
}

/// Sums the branch at `s` and recovers `x = y - shift`. Fails with
/// [`SeriesError::Diverged`] when `|s|` reaches the estimated radius.
pub fn evaluate_branch(branch: &SeriesBranch, s: Complex64, p: &XSPoly) -> Result<Evaluation, SeriesError> {
    let finish = |value: Complex64, tail_error: f64, rho: f64| {
        let residual = p.eval_complex(value, s).norm();
        let status = if residual <= RESIDUAL_TOL {
            BranchStatus::Converged
        } else {
            BranchStatus::Truncated
        };
        Evaluation {
            estimate: RootEstimate {
                value,
                residual,
                branch_id: Some(branch.id),
                oracle_distance: None,
            },
            tail_error,
            rho,
            status,
        }
    };
    if s.norm() == 0.0 {
        return Ok(finish(branch.seed, 0.0, 0.0));
    }
    let rho = s.norm() / branch.radius_estimate;
    if !(rho < 1.0) {
        return Err(SeriesError::Diverged { rho });
    }
    let t = s / branch.scale;
    let y = branch
        .scaled
        .iter()
        .rev()
        .fold(Complex64::zero(), |acc, &c| acc * t + c);
    let last = branch.scaled.len() - 1;
    let last_term = (branch.scaled[last] * t.powi(last as i32)).norm();
    Ok(finish(y - to_complex(&branch.shift), last_term / (1.0 - rho), rho))
}
