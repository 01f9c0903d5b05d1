//! Method dispatch, grid files, and cross-method comparison.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::closedform::{
    eval_integral_with, validate, Branch, EvalOptions, EvalRequest, EvalResult, Method, Parameters, Violation,
};
use crate::error::{Error, Result};
use crate::mellin::{contour_eval, residue_series};
use crate::oracle::{oscillatory_integral, QuadConfig, MU_LIMIT};

/// tau values in this open band around 1 are refused by sweeps and grids.
pub const RESONANCE_BAND: (f64, f64) = (0.999, 1.001);

/// Extra relative slack allowed when comparing methods.
pub const AGREEMENT_REL: f64 = 1e-7;

pub fn in_resonance_band(tau: f64) -> bool {
    tau > RESONANCE_BAND.0 && tau < RESONANCE_BAND.1
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "closed" => Ok(Method::ClosedForm),
            "contour" => Ok(Method::ContourQuad),
            "residue" => Ok(Method::ResidueSeries),
            "oracle" => Ok(Method::Oracle),
            other => Err(format!("unknown method '{other}' (expected closed, contour, residue or oracle)")),
        }
    }
}

pub const ALL_METHODS: [Method; 4] = [Method::ClosedForm, Method::ContourQuad, Method::ResidueSeries, Method::Oracle];

/// Evaluates the full integral with one method.
pub fn evaluate(method: Method, req: &EvalRequest, rel_tol: f64) -> Result<EvalResult> {
    let v = validate(req);
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    let tau = req.tau();
    let scale = req.a.powf(-req.params.mu - 1.0);
    let scaled = |r: EvalResult| EvalResult { value: r.value * scale, abs_err_est: r.abs_err_est * scale, ..r };
    match method {
        Method::ClosedForm => {
            let opts = EvalOptions { rel_tol, ..EvalOptions::default() };
            eval_integral_with(req, &opts)
        }
        Method::ContourQuad => contour_eval(&req.params, tau).map(scaled),
        Method::ResidueSeries => residue_series(&req.params, tau, Branch::from_tau(tau), 20_000).map(scaled),
        Method::Oracle => oscillatory_integral(req, &QuadConfig::default()),
    }
}

/// Largest pairwise |difference| among successful results.
pub fn max_deviation(results: &[EvalResult]) -> f64 {
    let mut m = 0.0f64;
    for (i, x) in results.iter().enumerate() {
        for y in &results[i + 1..] {
            m = m.max((x.value - y.value).abs());
        }
    }
    m
}

/// True when two results agree within their combined error estimates plus
/// 1e-7 |value|.
pub fn agree(x: &EvalResult, y: &EvalResult) -> bool {
    let tol = x.abs_err_est + y.abs_err_est + AGREEMENT_REL * x.value.abs().max(y.value.abs());
    (x.value - y.value).abs() <= tol
}

/// Parsed grid file.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct GridSpec {
    pub mu_values: Vec<f64>,
    pub alpha_values: Vec<f64>,
    pub beta_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub delta_values: Vec<f64>,
    pub tau_values: Vec<f64>,
    /// explicit (alpha, beta, gamma, delta) tuples, combined with every mu and tau
    pub orders: Vec<[f64; 4]>,
    /// explicit points (params, tau)
    pub points: Vec<(Parameters, f64)>,
    pub methods: Vec<Method>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "grid file: {}", self.message)
        } else {
            write!(f, "grid file line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for GridError {}

fn numbers(s: &str, line: usize) -> std::result::Result<Vec<f64>, GridError> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| GridError { line, message: format!("'{t}' is not a finite number") })
        })
        .collect()
}

impl GridSpec {
    /// Parses `key = v1, v2, ...` lines; `#` starts a comment.
    pub fn parse(text: &str) -> std::result::Result<GridSpec, GridError> {
        let mut g = GridSpec::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            let (key, val) = body
                .split_once('=')
                .ok_or_else(|| GridError { line, message: format!("expected 'key = values', got '{body}'") })?;
            let key = key.trim();
            let val = val.trim();
            if val.is_empty() {
                return Err(GridError { line, message: format!("no values for '{key}'") });
            }
            match key {
                "mu" => g.mu_values.extend(numbers(val, line)?),
                "alpha" => g.alpha_values.extend(numbers(val, line)?),
                "beta" => g.beta_values.extend(numbers(val, line)?),
                "gamma" => g.gamma_values.extend(numbers(val, line)?),
                "delta" => g.delta_values.extend(numbers(val, line)?),
                "tau" => {
                    let v = numbers(val, line)?;
                    if let Some(t) = v.iter().find(|t| !(**t > 0.0)) {
                        return Err(GridError { line, message: format!("tau must be positive (got {t})") });
                    }
                    g.tau_values.extend(v);
                }
                "orders" => {
                    let v = numbers(val, line)?;
                    if v.len() != 4 {
                        return Err(GridError { line, message: "orders needs exactly 4 values".into() });
                    }
                    g.orders.push([v[0], v[1], v[2], v[3]]);
                }
                "point" => {
                    let v = numbers(val, line)?;
                    if v.len() != 6 || !(v[5] > 0.0) {
                        return Err(GridError {
                            line,
                            message: "point needs mu, alpha, beta, gamma, delta, tau with tau > 0".into(),
                        });
                    }
                    g.points.push((Parameters::new(v[0], v[1], v[2], v[3], v[4]), v[5]));
                }
                "methods" => {
                    for m in val.split(',') {
                        let m: Method = m.parse().map_err(|e| GridError { line, message: e })?;
                        if !g.methods.contains(&m) {
                            g.methods.push(m);
                        }
                    }
                }
                other => return Err(GridError { line, message: format!("unknown key '{other}'") }),
            }
        }
        if g.methods.is_empty() {
            g.methods = vec![Method::ClosedForm, Method::ContourQuad, Method::ResidueSeries, Method::Oracle];
        }
        if g.expand().is_empty() {
            return Err(GridError { line: 0, message: "grid defines no points".into() });
        }
        Ok(g)
    }

    /// All (params, tau) points in file order.
    pub fn expand(&self) -> Vec<(Parameters, f64)> {
        let mut out = Vec::new();
        let mut tuples: Vec<[f64; 4]> = self.orders.clone();
        for &a in &self.alpha_values {
            for &b in &self.beta_values {
                for &c in &self.gamma_values {
                    for &d in &self.delta_values {
                        tuples.push([a, b, c, d]);
                    }
                }
            }
        }
        for &mu in &self.mu_values {
            for t in &tuples {
                for &tau in &self.tau_values {
                    out.push((Parameters::new(mu, t[0], t[1], t[2], t[3]), tau));
                }
            }
        }
        out.extend(self.points.iter().copied());
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Pass,
    Fail,
    SkippedDegenerate,
    SkippedInvalid,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::SkippedDegenerate => "skipped: degenerate",
            Outcome::SkippedInvalid => "skipped: invalid",
        })
    }
}

/// Result of running all requested methods at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub params: Parameters,
    pub tau: f64,
    pub outcome: Outcome,
    pub results: Vec<EvalResult>,
    pub errors: Vec<(Method, String)>,
    pub max_deviation: f64,
    pub note: String,
}

/// Runs one point at a = 1, b = tau.
pub fn run_point(params: Parameters, tau: f64, methods: &[Method], rel_tol: f64) -> PointReport {
    let mut rep = PointReport {
        params,
        tau,
        outcome: Outcome::Pass,
        results: Vec::new(),
        errors: Vec::new(),
        max_deviation: 0.0,
        note: String::new(),
    };
    if in_resonance_band(tau) {
        rep.outcome = Outcome::SkippedInvalid;
        rep.note = "resonance-band".into();
        return rep;
    }
    let req = EvalRequest { params, a: 1.0, b: tau };
    let v = validate(&req);
    if !v.is_empty() {
        rep.outcome = if v.iter().any(|x| matches!(x, Violation::Degenerate { .. })) {
            Outcome::SkippedDegenerate
        } else {
            Outcome::SkippedInvalid
        };
        rep.note = v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ");
        return rep;
    }
    for &m in methods {
        if m == Method::Oracle && params.mu > MU_LIMIT {
            continue;
        }
        match evaluate(m, &req, rel_tol) {
            Ok(r) => rep.results.push(r),
            Err(e) => rep.errors.push((m, e.to_string())),
        }
    }
    rep.max_deviation = max_deviation(&rep.results);
    let mut bad = Vec::new();
    for (i, x) in rep.results.iter().enumerate() {
        for y in &rep.results[i + 1..] {
            if !agree(x, y) {
                bad.push(format!("{}-{}", x.method, y.method));
            }
        }
    }
    if !rep.errors.is_empty() || !bad.is_empty() {
        rep.outcome = Outcome::Fail;
        let mut parts: Vec<String> = rep.errors.iter().map(|(m, e)| format!("{m}: {e}")).collect();
        if !bad.is_empty() {
            parts.push(format!("disagreement {}", bad.join(",")));
        }
        rep.note = parts.join("; ");
    }
    rep
}

/// Runs every grid point in parallel; the output keeps grid order.
pub fn run_grid(grid: &GridSpec, rel_tol: f64) -> Vec<PointReport> {
    grid.expand()
        .into_par_iter()
        .map(|(p, tau)| run_point(p, tau, &grid.methods, rel_tol))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped_degenerate: usize,
    pub skipped_invalid: usize,
}

pub fn summarize(reports: &[PointReport]) -> Summary {
    let mut s = Summary::default();
    for r in reports {
        match r.outcome {
            Outcome::Pass => s.pass += 1,
            Outcome::Fail => s.fail += 1,
            Outcome::SkippedDegenerate => s.skipped_degenerate += 1,
            Outcome::SkippedInvalid => s.skipped_invalid += 1,
        }
    }
    s
}

/// The grid bundled with the crate.
pub const ACCEPTANCE_GRID: &str = include_str!("../acceptance.grid");
