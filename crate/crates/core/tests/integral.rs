use std::f64::consts::PI;

use fourbessel::closedform::{eval_integral, eval_scaled, suggest_perturbation};
use fourbessel::crosscheck::{GridSpec, ACCEPTANCE_GRID};
use fourbessel::mellin::{
    build_integrand, choose_contour, contour_eval, enumerate_pole_families, integrand_eval, mellin_transform_check,
    residue_series,
};
use fourbessel::oracle::{bessel_product_integral, oscillatory_integral, QuadConfig};
use fourbessel::{validate, Branch, Error, EvalRequest, Parameters, Violation};
use num_complex::Complex64;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn grid_points() -> Vec<(Parameters, f64)> {
    GridSpec::parse(ACCEPTANCE_GRID).unwrap().expand()
}

fn grid_params() -> impl Strategy<Value = Parameters> {
    let pts: Vec<Parameters> = grid_points().into_iter().map(|(p, _)| p).collect();
    prop::sample::select(pts)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_scale_covariance(p in grid_params(), tau in 0.2f64..5.0, lambda in 0.1f64..10.0) {
        prop_assume!((tau - 1.0).abs() > 0.01);
        let r1 = eval_integral(&EvalRequest { params: p, a: 1.3, b: 1.3 * tau }).unwrap();
        let r2 = eval_integral(&EvalRequest { params: p, a: 1.3 * lambda, b: 1.3 * tau * lambda }).unwrap();
        prop_assert!(rel(r2.value, r1.value * lambda.powf(-p.mu - 1.0)) <= 1e-12);
    }

    #[test]
    fn half_order_law(tau in 0.05f64..20.0) {
        prop_assume!((tau - 1.0).abs() > 1e-3);
        let p = Parameters::new(0.0, 0.5, 0.5, 0.5, 0.5);
        let v = eval_scaled(&p, tau).unwrap().value;
        prop_assert!(rel(v, 1.0 / (PI * tau.max(1.0))) <= 1e-8);
    }

    #[test]
    fn integrand_conjugate_symmetry(p in grid_params(), t in 0.0f64..30.0, tau in 0.2f64..5.0) {
        let ig = build_integrand(&p);
        let spec = choose_contour(&enumerate_pole_families(&ig), 0.0).unwrap();
        let u = Complex64::new(spec.c, t);
        let f = integrand_eval(&ig, u, tau).unwrap();
        let g = integrand_eval(&ig, u.conj(), tau).unwrap();
        prop_assert!((f - g.conj()).norm() <= 1e-14 * f.norm().max(1e-300));
    }
}

#[test]
fn residue_matches_contour_on_grid() {
    let mut n = 0;
    for (p, tau) in grid_points().into_iter().step_by(7) {
        let c = contour_eval(&p, tau).unwrap();
        let r = residue_series(&p, tau, Branch::from_tau(tau), 20_000).unwrap();
        let tol = c.abs_err_est + r.abs_err_est;
        assert!((c.value - r.value).abs() <= tol, "{p:?} tau={tau}: {} vs {} (tol {tol:e})", c.value, r.value);
        n += 1;
    }
    assert!(n >= 40);
}

#[test]
fn both_branches_agree_with_oracle() {
    let p = Parameters::new(-0.5, 0.25, 1.0, 0.5, 0.25);
    for tau in [0.3, 0.7, 1.4, 3.0] {
        let req = EvalRequest { params: p, a: 1.0, b: tau };
        let c = eval_integral(&req).unwrap();
        let o = oscillatory_integral(&req, &QuadConfig::default()).unwrap();
        assert!(rel(c.value, o.value) <= 1e-8, "tau={tau}: {} vs {}", c.value, o.value);
        assert_eq!(c.branch, Branch::from_tau(tau));
    }
}

fn oracle_cases() -> Vec<EvalRequest> {
    grid_points()
        .into_iter()
        .step_by(11)
        .filter(|(p, _)| p.mu <= 0.9)
        .map(|(p, tau)| EvalRequest { params: p, a: 1.0, b: tau })
        .collect()
}

#[test]
fn oracle_head_split_invariance() {
    for req in oracle_cases() {
        let x0 = 10f64.max(10.0 / req.a.min(req.b));
        let base = oscillatory_integral(&req, &QuadConfig::default()).unwrap();
        for f in [0.75, 1.25] {
            let cfg = QuadConfig { head_cutoff: Some(x0 * f), ..QuadConfig::default() };
            let moved = oscillatory_integral(&req, &cfg).unwrap();
            let tol = 2.0 * base.abs_err_est.max(moved.abs_err_est);
            assert!((moved.value - base.value).abs() <= tol, "{req:?} x0*{f}: {} vs {} (tol {tol:e})", moved.value, base.value);
        }
    }
}

#[test]
fn oracle_panel_budget_robust() {
    for req in oracle_cases() {
        let base = oscillatory_integral(&req, &QuadConfig::default()).unwrap();
        let cfg = QuadConfig { max_panels: 40_000, ..QuadConfig::default() };
        let more = oscillatory_integral(&req, &cfg).unwrap();
        assert!((more.value - base.value).abs() <= base.abs_err_est, "{req:?}");
    }
}

#[test]
fn oracle_scale_covariance() {
    for req in oracle_cases().into_iter().take(10) {
        let base = oscillatory_integral(&req, &QuadConfig::default()).unwrap();
        for lambda in [0.5, 3.0] {
            let s = EvalRequest { params: req.params, a: req.a * lambda, b: req.b * lambda };
            let r = oscillatory_integral(&s, &QuadConfig::default()).unwrap();
            let k = lambda.powf(-req.params.mu - 1.0);
            let tol = 3.0 * (r.abs_err_est + k * base.abs_err_est);
            assert!((r.value - k * base.value).abs() <= tol, "{req:?} lambda={lambda}");
        }
    }
}

#[test]
fn oracle_half_order_head_positive() {
    for (a, b) in [(1.0, 0.5), (2.0, 3.0), (1.0, 4.0)] {
        let f = [(0.5, a), (0.5, a), (0.5, b), (0.5, b)];
        let r = bessel_product_integral(0.0, &f, 10.0, &QuadConfig::default()).unwrap();
        assert!(r.head >= 0.0);
        assert!(rel(r.value, 1.0 / (PI * f64::max(a, b))) <= 1e-8);
    }
}

#[test]
fn oracle_rejects_large_mu() {
    let req = EvalRequest { params: Parameters::new(0.95, 0.25, 1.0, 0.5, 0.25), a: 1.0, b: 0.5 };
    assert!(matches!(oscillatory_integral(&req, &QuadConfig::default()), Err(Error::UnsupportedMu(_))));
}

#[test]
fn validation_reports_each_condition() {
    let ok = Parameters::new(0.0, 0.5, 0.5, 0.5, 0.5);
    let v = validate(&EvalRequest { params: Parameters { mu: 2.5, ..ok }, a: 1.0, b: 0.5 });
    assert!(v.iter().any(|x| matches!(x, Violation::ConvergenceAtInfinity { .. })));
    let v = validate(&EvalRequest { params: Parameters::new(-3.0, 0.0, 0.25, 0.5, 0.0), a: 1.0, b: 0.5 });
    assert!(v.iter().any(|x| matches!(x, Violation::ConvergenceAtZero { .. })));
    let v = validate(&EvalRequest { params: ok, a: 2.0, b: 2.0 });
    assert_eq!(v, vec![Violation::Resonance]);
    let v = validate(&EvalRequest { params: ok, a: -1.0, b: 2.0 });
    assert!(v.iter().any(|x| matches!(x, Violation::InvalidInput(_))));
    let v = validate(&EvalRequest { params: Parameters { gamma_: 1.0, delta: 1.0, ..ok }, a: 1.0, b: 0.5 });
    assert!(v.iter().any(|x| matches!(x, Violation::Degenerate { .. })));
    assert!(validate(&EvalRequest { params: ok, a: 1.0, b: 0.5 }).is_empty());
}

#[test]
fn perturbation_leaves_degeneracy() {
    let p = Parameters::new(0.0, 0.5, 0.5, 1.0, 1.0);
    let q = suggest_perturbation(&p);
    assert_eq!(q.mu, 1e-5);
    assert!(validate(&EvalRequest { params: q, a: 1.0, b: 0.5 }).is_empty());
    assert!(eval_integral(&EvalRequest { params: p, a: 1.0, b: 0.5 }).is_err());
}

#[test]
fn mellin_strip() {
    assert!(matches!(mellin_transform_check(1.2, 0.5, 0.5), Err(Error::StripViolation { .. })));
    assert!(matches!(mellin_transform_check(0.2, -0.5, -0.5), Err(Error::StripViolation { .. })));
    let c = mellin_transform_check(0.4, 0.5, 1.5).unwrap();
    assert!(c.abs_diff <= 1e-7);
}
