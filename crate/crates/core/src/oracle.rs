//! Independent numeric root finder: Aberth–Ehrlich simultaneous iteration and
//! Newton polishing, plus greedy matching of two root lists.
//!
//! Coefficient slices are ascending (`coeffs[k]` multiplies `x^k`).

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

pub const MAX_SWEEPS: usize = 200;
pub const MAX_NEWTON_STEPS: usize = 50;
pub const FLAT_DERIVATIVE: f64 = 1e-30;
/// Roots closer than this are reported as one cluster.
pub const CLUSTER_DISTANCE: f64 = 1e-7;
/// Angular offset of the starting circle, in turns; irrational to avoid symmetric stalls.
const ROTATION: f64 = 0.414_213_562_373_095_1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("polynomial has degree below 1")]
    DegreeTooLow,
    #[error("leading coefficient is zero")]
    ZeroLeading,
    #[error("Aberth iteration did not converge in {sweeps} sweeps (worst residual {worst_residual:e})")]
    NoConvergence { sweeps: usize, worst_residual: f64 },
    #[error("flat derivative at {at}")]
    FlatDerivative { at: Complex64 },
    #[error("Newton iteration did not converge; last iterate {last}")]
    NewtonNoConvergence { last: Complex64 },
}

/// A root approximation with its residual against the polynomial that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct RootEstimate {
    pub value: Complex64,
    pub residual: f64,
    pub branch_id: Option<usize>,
    pub oracle_distance: Option<f64>,
}

impl RootEstimate {
    pub fn new(coeffs: &[Complex64], value: Complex64) -> Self {
        Self {
            value,
            residual: horner(coeffs, value).norm(),
            branch_id: None,
            oracle_distance: None,
        }
    }
}

pub fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// Value and first derivative.
fn horner2(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    coeffs.iter().rev().fold((zero, zero), |(p, dp), &c| (p * x + c, dp * x + p))
}

/// Bound on the rounding error of evaluating the polynomial at `x`.
fn rounding_bound(coeffs: &[Complex64], x: Complex64) -> f64 {
    let r = x.norm();
    let magnitude = coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
    4.0 * f64::EPSILON * magnitude * coeffs.len() as f64
}

fn trimmed(coeffs: &[Complex64]) -> Result<&[Complex64], OracleError> {
    let end = coeffs
        .iter()
        .rposition(|c| c.norm() != 0.0)
        .ok_or(OracleError::DegreeTooLow)?;
    if end == 0 {
        return Err(OracleError::DegreeTooLow);
    }
    Ok(&coeffs[..=end])
}

/// All `n` roots, with multiplicity, by Jacobi-style Aberth sweeps started on a
/// rotated circle of radius `1 + max |a_i / a_n|`.
pub fn aberth_roots(coeffs: &[Complex64], tol: f64) -> Result<Vec<RootEstimate>, OracleError> {
    if coeffs.last().is_some_and(|c| c.norm() == 0.0) {
        return Err(OracleError::ZeroLeading);
    }
    let coeffs = trimmed(coeffs)?;
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let radius = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * (k as f64 + ROTATION) / n as f64))
        .collect();

    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut done = true;
        let next: Vec<Complex64> = (0..n)
            .map(|k| {
                let (p, dp) = horner2(coeffs, z[k]);
                if p.norm() <= rounding_bound(coeffs, z[k]) {
                    return z[k];
                }
                let ratio = p / dp;
                let repulsion: Complex64 = (0..n)
                    .filter(|&j| j != k)
                    .map(|j| (z[k] - z[j]).inv())
                    .sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                let step = if step.is_finite() { step } else { ratio };
                if step.norm() > tol * z[k].norm().max(1.0) {
                    done = false;
                }
                z[k] - step
            })
            .collect();
        z = next;
        if done {
            converged = true;
            break;
        }
    }
    let roots: Vec<RootEstimate> = z.iter().map(|&x| RootEstimate::new(coeffs, x)).collect();
    if !converged {
        let worst_residual = roots.iter().map(|r| r.residual).fold(0.0, f64::max);
        return Err(OracleError::NoConvergence { sweeps, worst_residual });
    }
    Ok(roots)
}

/// Newton refinement from `x0`: at most [`MAX_NEWTON_STEPS`] steps, stopping once
/// `|dx| <= 1e-15 max(1, |x|)` or the residual reaches the rounding floor.
/// The returned point never has a larger residual than `x0`.
pub fn newton_polish(coeffs: &[Complex64], x0: Complex64) -> Result<Complex64, OracleError> {
    let mut x = x0;
    let mut best = (horner(coeffs, x0).norm(), x0);
    for _ in 0..MAX_NEWTON_STEPS {
        let (p, dp) = horner2(coeffs, x);
        if dp.norm() < FLAT_DERIVATIVE {
            return Err(OracleError::FlatDerivative { at: x });
        }
        if p.norm() < best.0 {
            best = (p.norm(), x);
        }
        if p.norm() <= rounding_bound(coeffs, x) {
            return Ok(best.1);
        }
        let dx = p / dp;
        x -= dx;
        if dx.norm() <= 1e-15 * x.norm().max(1.0) {
            let r = horner(coeffs, x).norm();
            return Ok(if r <= best.0 { x } else { best.1 });
        }
    }
    Err(OracleError::NewtonNoConvergence { last: x })
}

/// Groups roots lying within [`CLUSTER_DISTANCE`] of each other; each entry is
/// the cluster centroid and its multiplicity.
pub fn clusters(roots: &[RootEstimate]) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    for r in roots {
        match out
            .iter_mut()
            .find(|(_, members)| members.iter().any(|m| (m - r.value).norm() < CLUSTER_DISTANCE))
        {
            Some((_, members)) => members.push(r.value),
            None => out.push((r.value, vec![r.value])),
        }
    }
    out.into_iter()
        .map(|(_, m)| (m.iter().sum::<Complex64>() / m.len() as f64, m.len()))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootMatching {
    /// `(index in estimates, index in oracle, distance)`.
    pub pairs: Vec<(usize, usize, f64)>,
    pub max_distance: f64,
    /// Oracle roots no estimate was paired with ("not reached by series").
    pub unreached: Vec<usize>,
    pub unmatched_estimates: Vec<usize>,
}

/// Greedy minimum-distance matching: repeatedly pair the closest unused
/// (estimate, oracle) couple until the shorter list is exhausted.
pub fn match_roots(estimates: &[RootEstimate], oracle: &[RootEstimate]) -> RootMatching {
    let mut candidates: Vec<(f64, usize, usize)> = estimates
        .iter()
        .enumerate()
        .flat_map(|(i, e)| {
            oracle
                .iter()
                .enumerate()
                .map(move |(j, o)| ((e.value - o.value).norm(), i, j))
        })
        .collect();
    candidates.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| (a.1.min(a.2), a.1.max(a.2)).cmp(&(b.1.min(b.2), b.1.max(b.2))))
    });
    let mut used_e = vec![false; estimates.len()];
    let mut used_o = vec![false; oracle.len()];
    let mut pairs = Vec::new();
    for (d, i, j) in candidates {
        if used_e[i] || used_o[j] {
            continue;
        }
        used_e[i] = true;
        used_o[j] = true;
        pairs.push((i, j, d));
    }
    pairs.sort_by_key(|&(i, j, _)| (i, j));
    let max_distance = pairs.iter().map(|p| p.2).fold(0.0, f64::max);
    RootMatching {
        pairs,
        max_distance,
        unreached: (0..oracle.len()).filter(|&j| !used_o[j]).collect(),
        unmatched_estimates: (0..estimates.len()).filter(|&i| !used_e[i]).collect(),
    }
}
