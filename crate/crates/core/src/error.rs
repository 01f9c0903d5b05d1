use thiserror::Error;

use crate::closedform::Violation;

/// Errors raised across the evaluation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function evaluated at a pole (argument {0})")]
    PoleArgument(f64),

    #[error("argument outside the domain: {0}")]
    DomainError(String),

    #[error("Bessel order {0} outside the supported range |nu| <= 20")]
    UnsupportedOrder(f64),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid hypergeometric series: {0}")]
    InvalidSpec(String),

    #[error("invalid gamma-series pattern: {0}")]
    InvalidPattern(String),

    #[error("numerator gamma at a pole in series term k = {k} (argument {arg})")]
    NumeratorPole { k: usize, arg: f64 },

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("no contour separates the pole families (left max {left_max}, right min {right_min})")]
    ContourInfeasible { left_max: f64, right_min: f64 },

    #[error("contour point within 1e-9 of a pole of the integrand")]
    NearPole,

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("oracle quadrature only supports mu <= 0.9 (got {0})")]
    UnsupportedMu(f64),

    #[error("s = {s} outside the Mellin strip ({lo}, {hi})")]
    StripViolation { s: f64, lo: f64, hi: f64 },

    #[error("invalid request: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
