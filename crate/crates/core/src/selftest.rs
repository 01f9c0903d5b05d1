//! Fast built-in checks: the half-order golden law, the gamma-series to
//! 6F5 conversion, special-function identities and pole bookkeeping.

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use serde::Serialize;

use crate::closedform::{build_terms, eval_integral, validate, Branch, EvalRequest, Parameters};
use crate::crosscheck::GridSpec;
use crate::hypergeom::{direct_pattern_sum, pattern_to_pfq, sum_pfq};
use crate::mellin::{build_integrand, choose_contour, enumerate_pole_families, Direction};
use crate::oracle::{oscillatory_integral, QuadConfig};
use crate::specfun::bessel::bessel_j;
use crate::specfun::gamma::gamma_real;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64, what: &str) -> Check {
    Check { name, passed: worst <= tol, detail: format!("worst {what} {worst:.3e} (limit {tol:.0e})") }
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// mu = 0 and all orders 1/2 give 1/(pi max(a, b)).
pub fn golden_half_order() -> Check {
    let params = Parameters::new(0.0, 0.5, 0.5, 0.5, 0.5);
    let mut worst_closed = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut failure = None;
    for (a, b) in [(2.0, 1.0), (1.0, 2.0), (1.0, 3.0), (5.0, 4.0), (4.0, 5.0)] {
        let req = EvalRequest { params, a, b };
        let want = 1.0 / (PI * f64::max(a, b));
        match (eval_integral(&req), oscillatory_integral(&req, &QuadConfig::default())) {
            (Ok(c), Ok(o)) => {
                worst_closed = worst_closed.max(rel(c.value, want));
                worst_oracle = worst_oracle.max(rel(o.value, want));
            }
            (c, o) => failure = Some(format!("a={a} b={b}: {:?} {:?}", c.err(), o.err())),
        }
    }
    let passed = failure.is_none() && worst_closed <= 1e-8 && worst_oracle <= 1e-6;
    Check {
        name: "golden half-order law",
        passed,
        detail: failure.unwrap_or_else(|| {
            format!("closed rel err {worst_closed:.2e} (limit 1e-8), oracle rel err {worst_oracle:.2e} (limit 1e-6)")
        }),
    }
}

/// Random parameter sets that pass validation on both branches.
pub fn random_valid_params(rng: &mut StdRng, count: usize) -> Vec<(Parameters, f64, f64)> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = Parameters::new(
            rng.random_range(-0.9..0.85),
            rng.random_range(0.0..2.5),
            rng.random_range(0.0..2.5),
            rng.random_range(0.0..2.5),
            rng.random_range(0.0..2.5),
        );
        let lo = rng.random_range(0.15..0.9);
        let hi = 1.0 / rng.random_range(0.15..0.9);
        if validate(&EvalRequest { params: p, a: 1.0, b: lo }).is_empty() {
            out.push((p, lo, hi));
        }
    }
    out
}

/// Each residue-series pattern summed directly equals its 6F5 form.
pub fn pattern_conversion() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let mut worst = 0.0f64;
    let mut problem = None;
    for (p, lo, hi) in random_valid_params(&mut rng, 20) {
        for (branch, tau) in [(Branch::TauBelowOne, lo), (Branch::TauAboveOne, hi)] {
            for t in build_terms(&p, branch, tau) {
                let direct = direct_pattern_sum(&t.pattern, 600);
                let via = pattern_to_pfq(&t.pattern)
                    .and_then(|(pre, spec)| sum_pfq(&spec, 1e-14, 20_000).map(|s| pre * s.value));
                match (direct, via) {
                    (Ok(d), Ok(v)) => worst = worst.max(rel(v, d)),
                    (d, v) => problem = Some(format!("{p:?} tau={tau}: {:?} / {:?}", d.err(), v.err())),
                }
            }
        }
    }
    match problem {
        Some(p) => Check { name: "gamma-series to 6F5 conversion", passed: false, detail: p },
        None => check("gamma-series to 6F5 conversion", worst, 1e-9, "relative difference over 120 series"),
    }
}

/// Duplication formula, Bessel recurrence and exact half-integer gammas.
pub fn specfun_identities() -> Vec<Check> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let mut worst_dup = 0.0f64;
    let mut n = 0;
    while n < 200 {
        let z: f64 = rng.random_range(-15.0..40.0);
        let (Ok(g2), Ok(g1), Ok(gh)) = (gamma_real(2.0 * z), gamma_real(z), gamma_real(z + 0.5)) else {
            continue;
        };
        let rhs = 2f64.powf(2.0 * z - 1.0) / PI.sqrt() * g1 * gh;
        worst_dup = worst_dup.max(rel(rhs, g2));
        n += 1;
    }

    let mut worst_rec = 0.0f64;
    let mut rec_error = None;
    let orders = [-7.5, -3.3, -1.0, -0.5, 0.0, 0.25, 0.5, 1.0, 1.5, 2.5, 4.0, 7.3, 12.0, 18.5];
    let xs = [0.05, 0.5, 1.0, 2.5, 5.0, 9.7, 15.0, 30.0, 64.0, 150.0, 400.0];
    for &nu in &orders {
        for &x in &xs {
            match (bessel_j(nu - 1.0, x), bessel_j(nu, x), bessel_j(nu + 1.0, x)) {
                (Ok(jm), Ok(j), Ok(jp)) => {
                    let lhs = jm + jp;
                    let rhs = 2.0 * nu / x * j;
                    let scale = jm.abs().max(jp.abs()).max(rhs.abs());
                    worst_rec = worst_rec.max((lhs - rhs).abs() / scale);
                }
                (a, b, c) => rec_error = Some(format!("nu={nu} x={x}: {:?} {:?} {:?}", a.err(), b.err(), c.err())),
            }
        }
    }

    let sqrt_pi = PI.sqrt();
    let half = gamma_real(0.5).map(|g| rel(g, sqrt_pi)).unwrap_or(f64::INFINITY);
    let minus_half = gamma_real(-0.5).map(|g| rel(g, -2.0 * sqrt_pi)).unwrap_or(f64::INFINITY);

    vec![
        check("gamma duplication formula", worst_dup, 1e-12, "relative error over 200 points"),
        match rec_error {
            Some(e) => Check { name: "Bessel three-term recurrence", passed: false, detail: e },
            None => check("Bessel three-term recurrence", worst_rec, 1e-10, "scaled residual"),
        },
        check("Gamma(1/2), Gamma(-1/2)", half.max(minus_half), 1e-15, "relative error"),
    ]
}

/// Pole families match the integrand's structure and every valid grid
/// point gets a separating contour.
pub fn pole_bookkeeping(grid: &GridSpec) -> Check {
    let p = Parameters::new(0.3, 1.1, 0.7, 0.4, 0.9);
    let ig = build_integrand(&p);
    let fams = enumerate_pole_families(&ig);
    let mut left: Vec<String> = Vec::new();
    let mut right: Vec<String> = Vec::new();
    for f in &fams {
        let s = f.describe(&ig);
        match f.direction {
            Direction::Left => left.push(s),
            Direction::Right => right.push(s),
        }
    }
    left.sort();
    right.sort();
    let want_left = ["u = (mu-1)/2 - k", "u = -(gamma+delta)/2 - k", "u = mu/2 - k"];
    let want_right = ["u = (alpha+beta+mu+1)/2 + k", "u = 1 + k", "u = 1/2 + k"];
    if left != want_left || right != want_right {
        return Check {
            name: "pole bookkeeping",
            passed: false,
            detail: format!("families {left:?} / {right:?}"),
        };
    }
    let bases_ok = fams.iter().all(|f| {
        let want = match ig.factors[f.source].symbol {
            "-mu/2" => p.mu / 2.0,
            "(1-mu)/2" => (p.mu - 1.0) / 2.0,
            "(gamma+delta)/2" => -(p.gamma_ + p.delta) / 2.0,
            "1" => 1.0,
            "1/2" => 0.5,
            _ => (p.alpha + p.beta + p.mu + 1.0) / 2.0,
        };
        (f.base - want).abs() < 1e-15
    });
    let mut checked = 0;
    for (params, tau) in grid.expand() {
        if !validate(&EvalRequest { params, a: 1.0, b: tau }).is_empty() {
            continue;
        }
        let ig = build_integrand(&params);
        let fams = enumerate_pole_families(&ig);
        let Ok(spec) = choose_contour(&fams, 0.0) else {
            return Check { name: "pole bookkeeping", passed: false, detail: format!("no contour for {params:?}") };
        };
        for f in &fams {
            for k in 0..=50 {
                let u = f.pole(k);
                let ok = match f.direction {
                    Direction::Left => u < spec.c,
                    Direction::Right => u > spec.c,
                };
                if !ok {
                    return Check {
                        name: "pole bookkeeping",
                        passed: false,
                        detail: format!("pole {u} on the wrong side of c = {} for {params:?}", spec.c),
                    };
                }
            }
        }
        checked += 1;
    }
    Check {
        name: "pole bookkeeping",
        passed: bases_ok,
        detail: format!("6 families match symbolically; contour separates poles (k <= 50) at {checked} grid points"),
    }
}

/// The checks run by `fourbessel selftest`.
pub fn run_all(grid: &GridSpec) -> Vec<Check> {
    let mut out = vec![golden_half_order(), pattern_conversion()];
    out.extend(specfun_identities());
    out.push(pole_bookkeeping(grid));
    out
}
