//! Python bindings for the four-Bessel integral evaluators.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use fourbessel::crosscheck::{self, GridSpec, ACCEPTANCE_GRID};
use fourbessel::{closedform, selftest, Error, EvalRequest, Method};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Invalid(_) | Error::DomainError(_) | Error::NonFinite(_) | Error::UnsupportedOrder(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Parameter set (mu, alpha, beta, gamma, delta).
#[pyclass(name = "Parameters", from_py_object)]
#[derive(Clone, Copy)]
struct PyParameters {
    inner: fourbessel::Parameters,
}

#[pymethods]
impl PyParameters {
    #[new]
    fn new(mu: f64, alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        PyParameters { inner: fourbessel::Parameters::new(mu, alpha, beta, gamma, delta) }
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma_
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    /// Exchanges (alpha, beta) with (gamma, delta).
    fn swap_pairs(&self) -> Self {
        PyParameters { inner: self.inner.swap_pairs() }
    }

    /// Problems that prevent evaluation at scales a, b; empty when valid.
    fn validate(&self, a: f64, b: f64) -> Vec<String> {
        closedform::validate(&EvalRequest { params: self.inner, a, b }).iter().map(|v| v.to_string()).collect()
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("Parameters(mu={}, alpha={}, beta={}, gamma={}, delta={})", p.mu, p.alpha, p.beta, p.gamma_, p.delta)
    }
}

#[pyclass(name = "EvalResult", frozen)]
struct PyEvalResult {
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    abs_err_est: f64,
    #[pyo3(get)]
    method: String,
    #[pyo3(get)]
    branch: String,
    #[pyo3(get)]
    terms_used: Vec<usize>,
    #[pyo3(get)]
    slow_convergence: bool,
}

#[pymethods]
impl PyEvalResult {
    fn __repr__(&self) -> String {
        format!(
            "EvalResult(value={:e}, abs_err_est={:e}, method='{}', branch='{}')",
            self.value, self.abs_err_est, self.method, self.branch
        )
    }
}

impl From<fourbessel::EvalResult> for PyEvalResult {
    fn from(r: fourbessel::EvalResult) -> Self {
        PyEvalResult {
            value: r.value,
            abs_err_est: r.abs_err_est,
            method: r.method.to_string(),
            branch: r.branch.to_string(),
            terms_used: r.diagnostics.terms_used,
            slow_convergence: r.diagnostics.slow_convergence,
        }
    }
}

/// Integral of x^mu J_alpha(ax) J_beta(ax) J_gamma(bx) J_delta(bx) over (0, inf).
///
/// method is one of "closed", "contour", "residue", "oracle".
#[pyfunction]
#[pyo3(signature = (params, a, b, method = "closed", rel_tol = 1e-12))]
fn evaluate(py: Python<'_>, params: PyParameters, a: f64, b: f64, method: &str, rel_tol: f64) -> PyResult<PyEvalResult> {
    let m: Method = method.parse().map_err(PyValueError::new_err)?;
    let req = EvalRequest { params: params.inner, a, b };
    py.detach(|| crosscheck::evaluate(m, &req, rel_tol)).map(Into::into).map_err(to_py_err)
}

/// Dimensionless I(mu, tau) with a = 1, b = tau, from the closed form.
#[pyfunction]
fn eval_scaled(params: PyParameters, tau: f64) -> PyResult<PyEvalResult> {
    let req = EvalRequest { params: params.inner, a: 1.0, b: tau };
    let v = closedform::validate(&req);
    if !v.is_empty() {
        return Err(to_py_err(Error::Invalid(v)));
    }
    closedform::eval_scaled(&params.inner, tau).map(Into::into).map_err(to_py_err)
}

/// Runs a grid (the bundled acceptance grid by default).
///
/// Returns a dict with pass/fail/skip counts and the notes of failing points.
#[pyfunction]
#[pyo3(signature = (grid_text = None, rel_tol = 1e-12))]
fn crosscheck_grid(py: Python<'_>, grid_text: Option<&str>, rel_tol: f64) -> PyResult<Py<PyAny>> {
    let grid = GridSpec::parse(grid_text.unwrap_or(ACCEPTANCE_GRID)).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let reports = py.detach(|| crosscheck::run_grid(&grid, rel_tol));
    let s = crosscheck::summarize(&reports);
    let failures: Vec<String> = reports
        .iter()
        .filter(|r| r.outcome == crosscheck::Outcome::Fail)
        .map(|r| format!("{:?} tau={}: {}", r.params, r.tau, r.note))
        .collect();
    let d = pyo3::types::PyDict::new(py);
    d.set_item("points", reports.len())?;
    d.set_item("pass", s.pass)?;
    d.set_item("fail", s.fail)?;
    d.set_item("skipped_degenerate", s.skipped_degenerate)?;
    d.set_item("skipped_invalid", s.skipped_invalid)?;
    d.set_item("failures", failures)?;
    Ok(d.into_any().unbind())
}

/// Built-in checks as (name, passed, detail) tuples.
#[pyfunction(name = "selftest")]
fn selftest_py(py: Python<'_>) -> Vec<(String, bool, String)> {
    let grid = GridSpec::parse(ACCEPTANCE_GRID).expect("bundled grid parses");
    py.detach(|| selftest::run_all(&grid))
        .into_iter()
        .map(|c| (c.name.to_string(), c.passed, c.detail))
        .collect()
}

#[pymodule]
fn fourbessel_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParameters>()?;
    m.add_class::<PyEvalResult>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(eval_scaled, m)?)?;
    m.add_function(wrap_pyfunction!(crosscheck_grid, m)?)?;
    m.add_function(wrap_pyfunction!(selftest_py, m)?)?;
    Ok(())
}
