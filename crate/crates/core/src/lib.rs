//! Evaluation of int_0^inf x^mu J_alpha(ax) J_beta(ax) J_gamma(bx) J_delta(bx) dx
//! by closed-form hypergeometric sums, Mellin–Barnes contour quadrature,
//! residue series, and direct oscillatory quadrature.

pub mod closedform;
pub mod crosscheck;
pub mod error;
pub mod hypergeom;
pub mod mellin;
pub mod oracle;
pub mod quad;
pub mod selftest;
pub mod specfun;

pub use closedform::{
    eval_integral, eval_scaled, validate, Branch, EvalRequest, EvalResult, Method, Parameters, Violation,
};
pub use error::{Error, Result};
