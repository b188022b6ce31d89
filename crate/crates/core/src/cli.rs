//! Command-line front end: input parsing, the end-to-end pipeline and the
//! human, JSON and CSV emitters.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Map, Number, Value};
use thiserror::Error;

use crate::algebra::{parse_rational, poly_json, to_complex, to_f64, Rational, XSPoly};
use crate::oracle::{self, RootEstimate};
use crate::resolvent::{shift_homogenize, solve_resolvent, ResolventError, ResolventODE};
use crate::series::{
    branch_seeds, check_squarefree, evaluate_branch, expand_branch, extract_recurrence,
    normalize_coefficients, rescale, BranchStatus, Recurrence, SeriesBranch, SeriesError, DEFAULT_TERMS,
};

/// Largest distance at which a series root counts as matching an oracle root.
pub const ORACLE_MATCH_TOL: f64 = 1e-6;
const ORACLE_TOL: f64 = 1e-12;

#[derive(Parser, Debug)]
#[command(name = "resolvent-roots", version, about = "Polynomial roots via differential resolvents")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve a_n x^n + ... + a_1 x + a_0 = 0.
    Solve(SolveArgs),
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Coefficients a_n ... a_0, whitespace separated, as integers, p/q or decimals.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: String,
    /// Number of series coefficients per branch.
    #[arg(long, default_value_t = DEFAULT_TERMS)]
    pub terms: usize,
    /// `auto` or an explicit positive scale e.
    #[arg(long, default_value = "auto")]
    pub scale: String,
    #[arg(long)]
    pub no_normalize: bool,
    /// Compare every branch root against an Aberth iteration.
    #[arg(long)]
    pub oracle_check: bool,
    /// Write the JSON report to PATH.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Print the homogeneous resolvent as JSON.
    #[arg(long)]
    pub emit_ode: bool,
    /// Write the branch coefficients as CSV to PATH.
    #[arg(long, value_name = "PATH")]
    pub emit_coeffs: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("malformed token '{token}' at position {position}")]
    Malformed { position: usize, token: String },
    #[error("leading coefficient is zero")]
    LeadingZero,
    #[error("degree {0} is below 2")]
    DegreeTooLow(usize),
    #[error("--terms {terms} must be at least the degree {degree}")]
    TooFewTerms { terms: usize, degree: usize },
    #[error("--scale must be 'auto' or a positive number, got '{0}'")]
    BadScale(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleChoice {
    Auto,
    Fixed(f64),
}

impl FromStr for ScaleChoice {
    type Err = InputError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(ScaleChoice::Auto);
        }
        match s.parse::<f64>() {
            Ok(e) if e > 0.0 && e.is_finite() => Ok(ScaleChoice::Fixed(e)),
            _ => Err(InputError::BadScale(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `a_n, ..., a_1, a_0`.
    pub coefficients: Vec<Rational>,
    pub terms: usize,
    pub scale: ScaleChoice,
    pub normalize: bool,
    pub oracle_check: bool,
    pub json: Option<PathBuf>,
    pub emit_ode: bool,
    pub emit_coeffs: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(coefficients: Vec<Rational>) -> Self {
        Self {
            coefficients,
            terms: DEFAULT_TERMS,
            scale: ScaleChoice::Auto,
            normalize: true,
            oracle_check: false,
            json: None,
            emit_ode: false,
            emit_coeffs: None,
        }
    }

    pub fn from_args(args: &SolveArgs) -> Result<Self, InputError> {
        let cfg = Self {
            coefficients: parse_polynomial(&args.coeffs)?,
            terms: args.terms,
            scale: args.scale.parse()?,
            normalize: !args.no_normalize,
            oracle_check: args.oracle_check,
            json: args.json.clone(),
            emit_ode: args.emit_ode,
            emit_coeffs: args.emit_coeffs.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<(), InputError> {
        let degree = self.degree();
        if self.coefficients.first().map_or(true, Zero::is_zero) {
            return Err(InputError::LeadingZero);
        }
        if degree < 2 {
            return Err(InputError::DegreeTooLow(degree));
        }
        if self.terms < degree {
            return Err(InputError::TooFewTerms { terms: self.terms, degree });
        }
        Ok(())
    }
}

/// Parses whitespace-separated exact rationals, highest degree first.
/// Positions in error messages are 1-based.
pub fn parse_polynomial(text: &str) -> Result<Vec<Rational>, InputError> {
    let coeffs = text
        .split_whitespace()
        .enumerate()
        .map(|(i, tok)| {
            parse_rational(tok).ok_or_else(|| InputError::Malformed {
                position: i + 1,
                token: tok.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if coeffs.first().map_or(true, Zero::is_zero) {
        return Err(InputError::LeadingZero);
    }
    if coeffs.len() < 3 {
        return Err(InputError::DegreeTooLow(coeffs.len().saturating_sub(1)));
    }
    Ok(coeffs)
}

pub fn format_polynomial(coeffs: &[Rational]) -> String {
    coeffs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    InputError = 1,
    Degenerate = 2,
    Diverged = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Clone, Debug)]
pub struct BranchReport {
    pub id: usize,
    pub seed: Complex64,
    pub terms: usize,
    pub radius_estimate: f64,
    pub scale_e: f64,
    pub root: Option<RootEstimate>,
    pub tail_error: Option<f64>,
    pub status: BranchStatus,
    pub message: Option<String>,
    pub series: Option<SeriesBranch>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub roots: Vec<RootEstimate>,
    pub max_match_distance: f64,
    pub unreached: Vec<usize>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct Timings {
    pub resolvent: Duration,
    pub branches: Duration,
    pub oracle: Duration,
    pub total: Duration,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub coefficients: Vec<Rational>,
    pub normalization_factor: Rational,
    pub normalized: bool,
    /// The polynomial actually expanded, with the parameter `s` as constant term.
    pub polynomial: XSPoly,
    pub s_value: Rational,
    pub resolvent: Option<ResolventODE>,
    pub recurrence: Option<Recurrence>,
    pub branches: Vec<BranchReport>,
    pub oracle: Option<OracleReport>,
    pub error: Option<String>,
    pub exit_status: ExitStatus,
    pub timings: Timings,
}

impl RunReport {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }
}

fn branch_failure(err: &SeriesError) -> BranchStatus {
    match err {
        SeriesError::Diverged { .. } => BranchStatus::Diverged,
        SeriesError::SingularIndex(_) => BranchStatus::SingularIndex,
        _ => BranchStatus::SeedFailed,
    }
}

fn solve_branch(
    p: &XSPoly,
    rec: &Recurrence,
    shift: &Rational,
    id: usize,
    seed: &crate::series::Seed,
    cfg: &RunConfig,
    s: Complex64,
) -> BranchReport {
    let start = Instant::now();
    let mut report = BranchReport {
        id,
        seed: seed.value,
        terms: cfg.terms,
        radius_estimate: 0.0,
        scale_e: 1.0,
        root: None,
        tail_error: None,
        status: BranchStatus::SeedFailed,
        message: None,
        series: None,
        elapsed: Duration::ZERO,
    };
    let branch = match expand_branch(p, rec, shift, id, seed, cfg.terms) {
        Ok(b) => b,
        Err(e) => {
            report.status = branch_failure(&e);
            report.message = Some(e.to_string());
            report.elapsed = start.elapsed();
            return report;
        }
    };
    let e = match cfg.scale {
        ScaleChoice::Fixed(e) => e,
        ScaleChoice::Auto => {
            let r = branch.radius_estimate;
            if r > 0.0 {
                r.min(1.0)
            } else {
                1.0
            }
        }
    };
    let branch = rescale(&branch, e);
    report.radius_estimate = branch.radius_estimate;
    report.scale_e = e;
    match evaluate_branch(&branch, s, p) {
        Ok(ev) => {
            report.status = ev.status;
            report.tail_error = Some(ev.tail_error);
            if ev.status != BranchStatus::Converged {
                report.message = Some(format!(
                    "residual {:.3e} above tolerance with {} terms (|s|/radius = {:.4})",
                    ev.estimate.residual, cfg.terms, ev.rho
                ));
            }
            report.root = Some(ev.estimate);
        }
        Err(err) => {
            report.status = branch_failure(&err);
            report.message = Some(err.to_string());
        }
    }
    report.series = Some(branch);
    report.elapsed = start.elapsed();
    report
}

/// Runs normalize → resolvent → shift → recurrence → per-branch expansion and
/// evaluation at `a_0` → optional oracle check.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunReport, InputError> {
    cfg.validate()?;
    let t0 = Instant::now();
    let n = cfg.degree();
    let a0 = cfg.coefficients[n].clone();
    let ascending: Vec<Rational> = cfg.coefficients[..n].iter().rev().cloned().collect();
    let raw = XSPoly::with_parameter(&ascending);
    let (polynomial, s_value, factor) = if cfg.normalize {
        normalize_coefficients(&raw, &a0).expect("validated parametric polynomial")
    } else {
        (raw, a0, Rational::from_integer(1.into()))
    };
    let mut report = RunReport {
        coefficients: cfg.coefficients.clone(),
        normalization_factor: factor,
        normalized: cfg.normalize,
        polynomial: polynomial.clone(),
        s_value: s_value.clone(),
        resolvent: None,
        recurrence: None,
        branches: Vec::new(),
        oracle: None,
        error: None,
        exit_status: ExitStatus::Success,
        timings: Timings::default(),
    };
    let p = &polynomial;

    let prepared = (|| -> Result<(ResolventODE, Recurrence, Vec<crate::series::Seed>), String> {
        check_squarefree(p).map_err(|e| format!("degenerate input: {e}"))?;
        let ode = solve_resolvent(p).map_err(|e| resolvent_message(&e))?;
        let ode = shift_homogenize(&ode, p).map_err(|e| resolvent_message(&e))?;
        let rec = extract_recurrence(&ode).map_err(|e| e.to_string())?;
        let seeds = branch_seeds(p).map_err(|e| e.to_string())?;
        Ok((ode, rec, seeds))
    })();
    report.timings.resolvent = t0.elapsed();
    let (ode, rec, seeds) = match prepared {
        Ok(v) => v,
        Err(msg) => {
            report.error = Some(msg);
            report.exit_status = ExitStatus::Degenerate;
            report.timings.total = t0.elapsed();
            return Ok(report);
        }
    };

    let t1 = Instant::now();
    let s = to_complex(&s_value);
    report.branches = seeds
        .par_iter()
        .enumerate()
        .map(|(id, seed)| solve_branch(p, &rec, &ode.shift, id, seed, cfg, s))
        .collect();
    report.timings.branches = t1.elapsed();
    report.resolvent = Some(ode);
    report.recurrence = Some(rec);

    if cfg.oracle_check {
        let t2 = Instant::now();
        report.oracle = Some(oracle_check(p, &s_value, &mut report.branches));
        report.timings.oracle = t2.elapsed();
    }

    report.exit_status = classify(&report);
    report.timings.total = t0.elapsed();
    Ok(report)
}

fn resolvent_message(e: &ResolventError) -> String {
    match e {
        ResolventError::Degenerate { .. } => format!("degenerate polynomial: {e}"),
        _ => e.to_string(),
    }
}

fn oracle_check(p: &XSPoly, s: &Rational, branches: &mut [BranchReport]) -> OracleReport {
    let coeffs = p.numeric_at_s(s);
    let roots = match oracle::aberth_roots(&coeffs, ORACLE_TOL) {
        Ok(r) => r,
        Err(e) => {
            return OracleReport {
                roots: Vec::new(),
                max_match_distance: f64::INFINITY,
                unreached: Vec::new(),
                error: Some(e.to_string()),
            }
        }
    };
    let found: Vec<(usize, RootEstimate)> = branches
        .iter()
        .enumerate()
        .filter_map(|(k, b)| b.root.clone().map(|r| (k, r)))
        .collect();
    let estimates: Vec<RootEstimate> = found.iter().map(|(_, r)| r.clone()).collect();
    let matching = oracle::match_roots(&estimates, &roots);
    for &(i, _, d) in &matching.pairs {
        if let Some(root) = branches[found[i].0].root.as_mut() {
            root.oracle_distance = Some(d);
        }
    }
    OracleReport {
        roots,
        max_match_distance: matching.max_distance,
        unreached: matching.unreached,
        error: None,
    }
}

fn classify(report: &RunReport) -> ExitStatus {
    let statuses = report.branches.iter().map(|b| b.status);
    if statuses
        .clone()
        .any(|s| matches!(s, BranchStatus::SingularIndex | BranchStatus::SeedFailed))
    {
        return ExitStatus::Degenerate;
    }
    if statuses.clone().any(|s| s != BranchStatus::Converged) {
        return ExitStatus::Diverged;
    }
    if let Some(o) = &report.oracle {
        if o.error.is_some() || !o.unreached.is_empty() || !(o.max_match_distance <= ORACLE_MATCH_TOL) {
            return ExitStatus::Diverged;
        }
    }
    ExitStatus::Success
}

/// Floats at 17 significant digits; non-finite values become `null`.
pub fn float_json(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let x = if x == 0.0 { 0.0 } else { x };
    Number::from_str(&format!("{x:.16e}")).map_or(Value::Null, Value::Number)
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": float_json(z.re), "im": float_json(z.im) })
}

fn status_json(s: BranchStatus) -> Value {
    serde_json::to_value(s).expect("unit enum")
}

/// The machine-readable report. Keys always appear in the same order.
pub fn report_json(report: &RunReport) -> Value {
    let mut doc = Map::new();
    doc.insert(
        "input".into(),
        json!({
            "degree": report.degree(),
            "coefficients": report.coefficients.iter().map(ToString::to_string).collect::<Vec<_>>(),
        }),
    );
    doc.insert(
        "normalization".into(),
        json!({
            "factor": report.normalization_factor.to_string(),
            "applied": report.normalized,
        }),
    );
    let resolvent = match &report.resolvent {
        Some(ode) => json!({
            "order": ode.order,
            "shift": ode.shift.to_string(),
            "coefficients_s": ode.coeffs.iter().map(poly_json).collect::<Vec<_>>(),
            "homogeneous": ode.is_homogeneous(),
        }),
        None => json!({
            "order": Value::Null,
            "shift": Value::Null,
            "coefficients_s": Value::Null,
            "homogeneous": false,
        }),
    };
    doc.insert("resolvent".into(), resolvent);
    let branches: Vec<Value> = report
        .branches
        .iter()
        .map(|b| {
            json!({
                "id": b.id,
                "seed": complex_json(b.seed),
                "terms": b.terms,
                "radius_estimate": float_json(b.radius_estimate),
                "scale_e": float_json(b.scale_e),
                "root": b.root.as_ref().map_or(Value::Null, |r| complex_json(r.value)),
                "residual": b.root.as_ref().map_or(Value::Null, |r| float_json(r.residual)),
                "status": status_json(b.status),
            })
        })
        .collect();
    doc.insert("branches".into(), Value::Array(branches));
    let oracle = report.oracle.as_ref().map_or(Value::Null, |o| {
        json!({
            "roots": o.roots.iter().map(|r| complex_json(r.value)).collect::<Vec<_>>(),
            "max_match_distance": float_json(o.max_match_distance),
        })
    });
    doc.insert("oracle".into(), oracle);
    doc.insert("exit_status".into(), json!(report.exit_status.code()));
    doc.insert(
        "error".into(),
        report.error.as_ref().map_or(Value::Null, |e| Value::String(e.clone())),
    );
    Value::Object(doc)
}

fn csv_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:?}")
}

/// `branch_id,i,re,im`, one row per stored `y`-series coefficient.
pub fn coefficients_csv(report: &RunReport) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["branch_id", "i", "re", "im"])?;
    for b in &report.branches {
        let Some(series) = &b.series else { continue };
        for (i, c) in series.coefficients.iter().enumerate() {
            w.write_record([b.id.to_string(), i.to_string(), csv_float(c.re), csv_float(c.im)])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

pub fn summary(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "polynomial (degree {}): {}",
        report.degree(),
        format_polynomial(&report.coefficients)
    );
    if report.normalized {
        let _ = writeln!(out, "normalized by {}; s = {}", report.normalization_factor, report.s_value);
    } else {
        let _ = writeln!(out, "s = {}", report.s_value);
    }
    if let Some(ode) = &report.resolvent {
        let terms: Vec<String> = ode
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| format!("{c}·y^({})", ode.order - k))
            .collect();
        let _ = writeln!(out, "resolvent (order {}, shift {}): {} = 0", ode.order, ode.shift, terms.join(" + "));
    }
    for b in &report.branches {
        let _ = write!(
            out,
            "branch {}: seed {:.10}, radius ≈ {:.6}, e = {:.6}, ",
            b.id, b.seed, b.radius_estimate, b.scale_e
        );
        match &b.root {
            Some(r) => {
                let _ = write!(out, "root {:.12}, residual {:.3e}, ", r.value, r.residual);
            }
            None => out.push_str("no root, "),
        }
        let _ = write!(out, "{:?}", b.status);
        if let Some(m) = &b.message {
            let _ = write!(out, " ({m})");
        }
        let _ = writeln!(out, " [{:.2?}]", b.elapsed);
    }
    if let Some(o) = &report.oracle {
        match &o.error {
            Some(e) => {
                let _ = writeln!(out, "oracle failed: {e}");
            }
            None => {
                let _ = writeln!(
                    out,
                    "oracle: max match distance {:.3e}, {} root(s) not reached by series",
                    o.max_match_distance,
                    o.unreached.len()
                );
            }
        }
    }
    if let Some(e) = &report.error {
        let _ = writeln!(out, "error: {e}");
    }
    let t = &report.timings;
    let _ = writeln!(
        out,
        "timings: resolvent {:.2?}, branches {:.2?}, oracle {:.2?}, total {:.2?}",
        t.resolvent, t.branches, t.oracle, t.total
    );
    let _ = writeln!(out, "exit status {}", report.exit_status.code());
    out
}

#[derive(Debug, Error)]
#[error("cannot write {path}: {source}")]
pub struct OutputError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

fn write_file(path: &Path, contents: &str) -> Result<(), OutputError> {
    fs::write(path, contents).map_err(|source| OutputError {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the optional JSON and CSV files and returns the text for stdout.
pub fn emit_outputs(report: &RunReport, cfg: &RunConfig) -> Result<String, OutputError> {
    let mut stdout = summary(report);
    if let Some(path) = &cfg.json {
        let text = serde_json::to_string_pretty(&report_json(report)).expect("serializable");
        write_file(path, &(text + "\n"))?;
    }
    if let Some(path) = &cfg.emit_coeffs {
        let text = coefficients_csv(report).map_err(|e| OutputError {
            path: path.clone(),
            source: std::io::Error::other(e),
        })?;
        write_file(path, &text)?;
    }
    if cfg.emit_ode {
        match &report.resolvent {
            Some(ode) => {
                stdout.push_str(&serde_json::to_string(&ode.to_json()).expect("serializable"));
                stdout.push('\n');
            }
            None => stdout.push_str("null\n"),
        }
    }
    Ok(stdout)
}

/// Numeric coefficients of the expanded polynomial at its evaluation point.
pub fn evaluated_coefficients(report: &RunReport) -> Vec<f64> {
    report
        .polynomial
        .at_s(&report.s_value)
        .coeffs()
        .iter()
        .map(to_f64)
        .collect()
}
