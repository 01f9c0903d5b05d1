//! Special functions on which everything else is built.

pub mod bessel;
pub mod gamma;

pub use bessel::bessel_j;
pub use gamma::{
    gamma_real, ln_gamma_signed, log_gamma_complex, pochhammer, recip_gamma_real, sinpi, POLE_TOL,
};

/// Complex point used for the contour variable.
pub type ComplexPoint = num_complex::Complex64;
