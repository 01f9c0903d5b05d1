//! Closed-form evaluation of
//! int_0^inf x^mu J_alpha(ax) J_beta(ax) J_gamma(bx) J_delta(bx) dx
//! as a sum of three gamma-prefactor x 6F5 terms on each side of tau = b/a = 1.
//!
//! The integral equals a^(-mu-1) I(mu, tau). For tau < 1 the three terms come
//! from the pole families at u = mu/2 - k, (mu-1)/2 - k and -(gamma+delta)/2 - k
//! of the Mellin–Barnes integrand; for tau > 1 from (alpha+beta+mu+1)/2 + k,
//! 1/2 + k and 1 + k. See FORMULA_NOTES.md for the term tables.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergeom::{sum_pfq_regularized, GammaSeriesPattern, PFQSpec, DEFAULT_K_MAX, DEFAULT_REL_TOL};
use crate::mellin::{build_integrand, enumerate_pole_families, find_collisions, Collision, Direction, INT_TOL};
use crate::specfun::bessel::MAX_ORDER;
use crate::specfun::gamma::ln_gamma_signed;

/// Exponent and orders of the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Parameters {
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "gamma")]
    pub gamma_: f64,
    pub delta: f64,
}

impl Parameters {
    pub fn new(mu: f64, alpha: f64, beta: f64, gamma_: f64, delta: f64) -> Self {
        Parameters { mu, alpha, beta, gamma_, delta }
    }

    /// Exchanges (alpha, beta) with (gamma, delta).
    pub fn swap_pairs(&self) -> Self {
        Parameters { mu: self.mu, alpha: self.gamma_, beta: self.delta, gamma_: self.alpha, delta: self.beta }
    }

    /// Exponent of x in the integrand near x = 0, plus one.
    pub fn small_x_exponent(&self) -> f64 {
        self.mu + self.alpha + self.beta + self.gamma_ + self.delta + 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalRequest {
    #[serde(flatten)]
    pub params: Parameters,
    pub a: f64,
    pub b: f64,
}

impl EvalRequest {
    pub fn tau(&self) -> f64 {
        self.b / self.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    ClosedForm,
    ContourQuad,
    ResidueSeries,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::ClosedForm => "closed",
            Method::ContourQuad => "contour",
            Method::ResidueSeries => "residue",
            Method::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    TauBelowOne,
    TauAboveOne,
}

impl Branch {
    pub fn from_tau(tau: f64) -> Branch {
        if tau < 1.0 {
            Branch::TauBelowOne
        } else {
            Branch::TauAboveOne
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Terms (or quadrature nodes / panels) used per series.
    pub terms_used: Vec<usize>,
    pub slow_convergence: bool,
    /// Terms dropped because a reciprocal gamma vanished.
    pub vanished_terms: usize,
    /// |Im| of the raw contour integral relative to |value|; 0 elsewhere.
    pub imag_residue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalResult {
    pub value: f64,
    pub abs_err_est: f64,
    pub method: Method,
    pub branch: Branch,
    pub diagnostics: Diagnostics,
}

/// Reasons a request cannot be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    InvalidInput(String),
    ConvergenceAtInfinity { mu: f64 },
    ConvergenceAtZero { exponent: f64 },
    Resonance,
    Degenerate { point: f64 },
    ContourInfeasible { left_max: f64, right_min: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidInput(s) => write!(f, "invalid input: {s}"),
            Violation::ConvergenceAtInfinity { mu } => {
                write!(f, "diverges at infinity: the integral converges when mu < 2 (mu = {mu})")
            }
            Violation::ConvergenceAtZero { exponent } => write!(
                f,
                "diverges at zero: the integral converges when mu+alpha+beta+gamma+delta+1 > 0 (got {exponent})"
            ),
            Violation::Resonance => write!(f, "resonance: a = b (tau = 1) is excluded"),
            Violation::Degenerate { point } => {
                write!(f, "degenerate parameters: pole families collide at u = {point} (double pole)")
            }
            Violation::ContourInfeasible { left_max, right_min } => write!(
                f,
                "no contour separates the pole families (left max {left_max} >= right min {right_min})"
            ),
        }
    }
}

fn validate_params(p: &Parameters, out: &mut Vec<Violation>) {
    let vals = [p.mu, p.alpha, p.beta, p.gamma_, p.delta];
    if vals.iter().any(|v| !v.is_finite()) {
        out.push(Violation::InvalidInput("parameters must be finite".into()));
        return;
    }
    if vals[1..].iter().any(|v| v.abs() > MAX_ORDER) {
        out.push(Violation::InvalidInput(format!("Bessel orders must satisfy |nu| <= {MAX_ORDER}")));
    }
    if !(p.mu < 2.0) {
        out.push(Violation::ConvergenceAtInfinity { mu: p.mu });
    }
    if !(p.small_x_exponent() > 0.0) {
        out.push(Violation::ConvergenceAtZero { exponent: p.small_x_exponent() });
    }
    let ig = build_integrand(p);
    let fams = enumerate_pole_families(&ig);
    let left_max = fams
        .iter()
        .filter(|f| f.direction == Direction::Left)
        .map(|f| f.base)
        .fold(f64::NEG_INFINITY, f64::max);
    let right_min = fams
        .iter()
        .filter(|f| f.direction == Direction::Right)
        .map(|f| f.base)
        .fold(f64::INFINITY, f64::min);
    if !(left_max < right_min - 2.0 * INT_TOL) {
        out.push(Violation::ContourInfeasible { left_max, right_min });
    }
    for c in find_collisions(&ig) {
        if !c.cancelled {
            out.push(Violation::Degenerate { point: c.point });
        }
    }
}

/// Checks the convergence conditions, resonance and pole structure.
pub fn validate(req: &EvalRequest) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(req.a > 0.0 && req.a.is_finite() && req.b > 0.0 && req.b.is_finite()) {
        out.push(Violation::InvalidInput(format!("a and b must be positive and finite (a = {}, b = {})", req.a, req.b)));
    } else if req.a == req.b {
        out.push(Violation::Resonance);
    }
    validate_params(&req.params, &mut out);
    out
}

/// All overlapping pole-family pairs. A collision whose `cancelled` flag
/// is set leaves every pole simple and is harmless.
pub fn detect_degeneracy(p: &Parameters) -> Vec<Collision> {
    find_collisions(&build_integrand(p))
}

/// Nearby parameter set for exploring a degenerate point (mu shifted by
/// 1e-5). Results for it only approximate the degenerate integral.
pub fn suggest_perturbation(p: &Parameters) -> Parameters {
    Parameters { mu: p.mu + 1e-5, ..*p }
}

/// One of the three closed-form terms:
/// scale * tau^power_of_tau * prod Gamma(num) / prod Gamma(den) * F,
/// where F is the 6F5 in `pfq` with its first `n_reg` lower parameters
/// regularized. `pattern` is the residue series the term sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedTerm {
    pub power_of_tau: f64,
    pub scale: f64,
    pub pattern: GammaSeriesPattern,
    pub num_gammas: Vec<f64>,
    pub den_gammas: Vec<f64>,
    pub pfq: PFQSpec,
    pub n_reg: usize,
}

fn snap(v: f64) -> f64 {
    if v < INT_TOL && (v - v.round()).abs() <= INT_TOL {
        v.round()
    } else {
        v
    }
}

#[allow(clippy::too_many_arguments)]
fn term(
    power: f64,
    scale: f64,
    g: [f64; 3],
    m: [f64; 2],
    q: [f64; 3],
    p: [f64; 3],
    z: f64,
    num: Vec<f64>,
    den: Vec<f64>,
    reg: &[f64],
    lower_plain: &[f64],
) -> ClosedTerm {
    let s = |v: Vec<f64>| v.into_iter().map(snap).collect::<Vec<_>>();
    let upper: Vec<f64> = g.iter().copied().chain(p.iter().map(|x| 1.0 - x)).collect();
    let lower: Vec<f64> = reg.iter().chain(lower_plain).copied().chain(m.iter().map(|x| 1.0 - x)).collect();
    ClosedTerm {
        power_of_tau: power,
        scale,
        pattern: GammaSeriesPattern {
            ascending_num: s(g.to_vec()),
            descending_num: s(m.to_vec()),
            ascending_den: s(q.to_vec()),
            descending_den: s(p.to_vec()),
            argument: -z,
        },
        num_gammas: s(num),
        den_gammas: s(den),
        pfq: PFQSpec { upper: s(upper), lower: s(lower), argument: z },
        n_reg: reg.len(),
    }
}

/// The three terms for the given branch at ratio `tau`.
pub fn build_terms(p: &Parameters, branch: Branch, tau: f64) -> Vec<ClosedTerm> {
    let (mu, al, be, ga, de) = (p.mu, p.alpha, p.beta, p.gamma_, p.delta);
    let two = |e: f64| 2f64.powf(e);
    match branch {
        Branch::TauBelowOne => {
            let z = tau * tau;
            let q1 = [(-ga + de - mu + 2.0) / 2.0, (ga + de - mu + 2.0) / 2.0, (ga - de - mu + 2.0) / 2.0];
            let q2 = [(-ga + de - mu + 3.0) / 2.0, (ga + de - mu + 3.0) / 2.0, (ga - de - mu + 3.0) / 2.0];
            let p3 = [
                (al + be - mu - ga - de + 1.0) / 2.0,
                (-al + be - mu - ga - de + 1.0) / 2.0,
                (al - be - mu - ga - de + 1.0) / 2.0,
            ];
            vec![
                term(
                    -mu,
                    two(mu - 1.0),
                    [(al + be + 1.0) / 2.0, (1.0 - mu) / 2.0, 1.0 - mu / 2.0],
                    [0.5, (ga + de + mu) / 2.0],
                    q1,
                    [(-al + be + 1.0) / 2.0, (al + be + 1.0) / 2.0, (al - be + 1.0) / 2.0],
                    z,
                    vec![1.0 - mu, (ga + de + mu) / 2.0],
                    vec![(al - be + 1.0) / 2.0, (-al + be + 1.0) / 2.0],
                    &q1,
                    &[],
                ),
                term(
                    1.0 - mu,
                    -two(mu - 1.0),
                    [(2.0 - mu) / 2.0, (al + be + 2.0) / 2.0, (3.0 - mu) / 2.0],
                    [-0.5, (ga + de + mu - 1.0) / 2.0],
                    q2,
                    [(-al + be) / 2.0, (al + be) / 2.0, (al - be) / 2.0],
                    z,
                    vec![2.0 - mu, (al + be + 2.0) / 2.0, (ga + de + mu - 1.0) / 2.0],
                    vec![(al + be) / 2.0, (al - be) / 2.0, (-al + be) / 2.0],
                    &q2,
                    &[],
                ),
                term(
                    ga + de,
                    two(mu),
                    [(al + be + mu + ga + de + 1.0) / 2.0, (ga + de + 2.0) / 2.0, (ga + de + 1.0) / 2.0],
                    [(-ga - de - mu) / 2.0, (-ga - de - mu + 1.0) / 2.0],
                    [de + 1.0, ga + de + 1.0, ga + 1.0],
                    p3,
                    z,
                    vec![-ga - de - mu, (al + be + mu + ga + de + 1.0) / 2.0],
                    p3.to_vec(),
                    &[ga + 1.0, de + 1.0],
                    &[ga + de + 1.0],
                ),
            ]
        }
        Branch::TauAboveOne => {
            let z = 1.0 / (tau * tau);
            let p1 = [
                (-ga + de - al - be - mu + 1.0) / 2.0,
                (ga + de - al - be - mu + 1.0) / 2.0,
                (ga - de - al - be - mu + 1.0) / 2.0,
            ];
            let q2 = [(-al + be - mu + 2.0) / 2.0, (al + be - mu + 2.0) / 2.0, (al - be - mu + 2.0) / 2.0];
            let q3 = [(-al + be - mu + 3.0) / 2.0, (al + be - mu + 3.0) / 2.0, (al - be - mu + 3.0) / 2.0];
            vec![
                term(
                    -(al + be + mu + 1.0),
                    two(mu),
                    [(al + be + 1.0) / 2.0, (al + be + 2.0) / 2.0, (ga + de + al + be + mu + 1.0) / 2.0],
                    [(1.0 - al - be - mu) / 2.0, (-al - be - mu) / 2.0],
                    [be + 1.0, al + be + 1.0, al + 1.0],
                    p1,
                    z,
                    vec![-al - be - mu, (al + be + ga + de + mu + 1.0) / 2.0],
                    p1.to_vec(),
                    &[be + 1.0, al + 1.0],
                    &[al + be + 1.0],
                ),
                term(
                    -1.0,
                    two(mu - 1.0),
                    [(1.0 - mu) / 2.0, (2.0 - mu) / 2.0, (ga + de + 1.0) / 2.0],
                    [(al + be + mu) / 2.0, 0.5],
                    q2,
                    [(-ga + de + 1.0) / 2.0, (ga + de + 1.0) / 2.0, (ga - de + 1.0) / 2.0],
                    z,
                    vec![1.0 - mu, (al + be + mu) / 2.0],
                    vec![(-ga + de + 1.0) / 2.0, (ga - de + 1.0) / 2.0],
                    &q2,
                    &[],
                ),
                term(
                    -2.0,
                    -two(mu - 1.0),
                    [(2.0 - mu) / 2.0, (3.0 - mu) / 2.0, (ga + de + 2.0) / 2.0],
                    [(al + be + mu - 1.0) / 2.0, -0.5],
                    q3,
                    [(-ga + de) / 2.0, (ga + de) / 2.0, (ga - de) / 2.0],
                    z,
                    vec![2.0 - mu, (al + be + mu - 1.0) / 2.0, (ga + de + 2.0) / 2.0],
                    vec![(ga - de) / 2.0, (ga + de) / 2.0, (-ga + de) / 2.0],
                    &q3,
                    &[],
                ),
            ]
        }
    }
}

/// prod Gamma(num) / prod Gamma(den) with pole counting; `None` when a
/// denominator pole outnumbers the numerator poles (the term vanishes).
fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<Option<f64>> {
    let is_pole = |x: f64| x < INT_TOL && (x - x.round()).abs() <= INT_TOL;
    let np = num.iter().filter(|&&x| is_pole(x)).count();
    let dp = den.iter().filter(|&&x| is_pole(x)).count();
    if dp > np {
        return Ok(None);
    }
    if np > 0 {
        return Err(Error::DegenerateParameters(format!(
            "prefactor numerator gamma at a pole ({:?})",
            num.iter().filter(|&&x| is_pole(x)).collect::<Vec<_>>()
        )));
    }
    let mut log = 0.0;
    let mut sign = 1.0;
    for &x in num {
        let (l, s) = ln_gamma_signed(x);
        log += l;
        sign *= s;
    }
    for &x in den {
        let (l, s) = ln_gamma_signed(x);
        log -= l;
        sign *= s;
    }
    Ok(Some(sign * log.exp()))
}

/// Series controls for the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalOptions {
    pub rel_tol: f64,
    pub k_max: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { rel_tol: DEFAULT_REL_TOL, k_max: DEFAULT_K_MAX }
    }
}

/// Value of one term plus its absolute error, or `None` if it vanishes.
pub fn eval_term(t: &ClosedTerm, tau: f64, opts: &EvalOptions) -> Result<Option<(f64, f64, usize, bool)>> {
    let Some(pref) = gamma_ratio(&t.num_gammas, &t.den_gammas)? else {
        return Ok(None);
    };
    let s = sum_pfq_regularized(&t.pfq, t.n_reg, opts.rel_tol, opts.k_max).map_err(|e| match e {
        Error::InvalidSpec(m) => Error::DegenerateParameters(m),
        e => e,
    })?;
    let factor = t.scale * tau.powf(t.power_of_tau) * pref;
    Ok(Some((factor * s.value, (factor * s.abs_err_est).abs(), s.terms_used, s.converged)))
}

pub fn eval_scaled_with(p: &Parameters, tau: f64, opts: &EvalOptions) -> Result<EvalResult> {
    let mut v = Vec::new();
    validate_params(p, &mut v);
    if !(tau > 0.0) || !tau.is_finite() {
        v.push(Violation::InvalidInput(format!("tau = {tau} must be positive and finite")));
    } else if tau == 1.0 {
        v.push(Violation::Resonance);
    }
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    let branch = Branch::from_tau(tau);
    let terms = build_terms(p, branch, tau);
    let mut value = 0.0;
    let mut err = 0.0;
    let mut abs_sum = 0.0;
    let mut used = Vec::with_capacity(3);
    let mut vanished = 0;
    let mut all_converged = true;
    for t in &terms {
        match eval_term(t, tau, opts)? {
            Some((x, e, n, conv)) => {
                value += x;
                err += e;
                abs_sum += x.abs();
                used.push(n);
                all_converged &= conv;
            }
            None => {
                vanished += 1;
                used.push(0);
            }
        }
    }
    let z = terms[0].pfq.argument;
    err += 64.0 * f64::EPSILON * abs_sum;
    if !err.is_finite() || !value.is_finite() {
        return Err(Error::NoConvergence(format!("closed form not finite at tau = {tau}")));
    }
    Ok(EvalResult {
        value,
        abs_err_est: err,
        method: Method::ClosedForm,
        branch,
        diagnostics: Diagnostics {
            terms_used: used,
            slow_convergence: z > 0.95 || !all_converged,
            vanished_terms: vanished,
            imag_residue: 0.0,
        },
    })
}

/// I(mu, tau) from the closed form.
pub fn eval_scaled(p: &Parameters, tau: f64) -> Result<EvalResult> {
    eval_scaled_with(p, tau, &EvalOptions::default())
}

pub fn eval_integral_with(req: &EvalRequest, opts: &EvalOptions) -> Result<EvalResult> {
    let v = validate(req);
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    let r = eval_scaled_with(&req.params, req.tau(), opts)?;
    let s = req.a.powf(-req.params.mu - 1.0);
    Ok(EvalResult { value: r.value * s, abs_err_est: r.abs_err_est * s, ..r })
}

/// The full integral a^(-mu-1) I(mu, b/a).
pub fn eval_integral(req: &EvalRequest) -> Result<EvalResult> {
    eval_integral_with(req, &EvalOptions::default())
}

/// Residue-series value of a single term, (1/2pi) tau^power * sum_k pattern
/// terms; used to check a term against its own series.
pub fn term_residue_normalization() -> f64 {
    1.0 / (2.0 * PI)
}
