//! Bessel functions of the first kind, real order, nonnegative real argument.
//!
//! Three regimes:
//!
//! * ascending power series for `x <= max(2, |nu|/2)`;
//! * Hankel asymptotic expansion for `x >= max(25, nu^2)`;
//! * Steed's continued-fraction method (CF1 + CF2) in between, which also
//!   yields `Y_nu` so negative non-integer orders can be reflected.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::gamma::{recip_gamma_real, sinpi};

/// Largest supported |order|.
pub const MAX_ORDER: f64 = 20.0;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 100_000;

/// Upper end of the power-series regime.
pub fn series_limit(nu: f64) -> f64 {
    2.0_f64.max(0.5 * nu.abs())
}

/// Lower end of the Hankel asymptotic regime.
pub fn asymptotic_limit(nu: f64) -> f64 {
    25.0_f64.max(nu * nu)
}

/// J_nu(x) for real order |nu| <= 20 and x >= 0.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !nu.is_finite() || !x.is_finite() {
        return Err(Error::NonFinite("Bessel argument"));
    }
    if nu.abs() > MAX_ORDER {
        return Err(Error::UnsupportedOrder(nu));
    }
    if x < 0.0 {
        return Err(Error::DomainError(format!("Bessel J requires x >= 0, got {x}")));
    }
    let is_int = nu == nu.round();
    if nu < 0.0 && is_int {
        let n = -nu;
        let v = bessel_j(n, x)?;
        return Ok(if (n as i64) % 2 == 0 { v } else { -v });
    }
    if x == 0.0 {
        return if nu == 0.0 {
            Ok(1.0)
        } else if nu > 0.0 {
            Ok(0.0)
        } else {
            Err(Error::DomainError(format!("J_{nu}(0) is unbounded")))
        };
    }
    if x <= series_limit(nu) {
        return Ok(bessel_j_series(nu, x));
    }
    if x >= asymptotic_limit(nu) {
        return Ok(bessel_j_hankel(nu, x));
    }
    if nu >= 0.0 {
        Ok(bessel_jy_steed(nu, x).0)
    } else {
        // J_{-v} = cos(v pi) J_v - sin(v pi) Y_v
        let v = -nu;
        let (j, y) = bessel_jy_steed(v, x);
        Ok(sinpi(v + 0.5) * j - sinpi(v) * y)
    }
}

/// Ascending series sum_k (-1)^k (x/2)^(2k+nu) / (k! Gamma(k+nu+1)).
pub fn bessel_j_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    // leading term, shifted past a Gamma pole for negative non-integer nu
    let lead = half.powf(nu);
    let mut term = lead * recip_gamma_real(nu + 1.0);
    let mut sum = term;
    let mut k = 1.0;
    loop {
        let denom = k * (k + nu);
        if denom == 0.0 {
            break;
        }
        term *= q / denom;
        sum += term;
        if term.abs() <= EPS * sum.abs() && k > 2.0 {
            break;
        }
        if k > 500.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

/// Coefficients a_k(nu) = prod_{j=1..k} (4 nu^2 - (2j-1)^2) / (k! 8^k) of the
/// Hankel expansion, k = 0..n.
pub fn hankel_coefficients(nu: f64, n: usize) -> Vec<f64> {
    let m = 4.0 * nu * nu;
    let mut out = Vec::with_capacity(n + 1);
    let mut a = 1.0;
    out.push(a);
    for k in 1..=n {
        let odd = (2 * k - 1) as f64;
        a *= (m - odd * odd) / (8.0 * k as f64);
        out.push(a);
    }
    out
}

/// Large-argument expansion sqrt(2/(pi x)) (P cos chi - Q sin chi).
pub fn bessel_j_hankel(nu: f64, x: f64) -> f64 {
    let m = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        a *= (m - odd * odd) / (8.0 * k as f64 * x);
        if a == 0.0 {
            break;
        }
        if a.abs() > prev {
            // asymptotic series started to diverge
            break;
        }
        prev = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 * p.abs().max(q.abs()) {
            break;
        }
    }
    let phase = (0.5 * nu + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// J_nu(x) and Y_nu(x) for nu >= 0, x >= 2 by Steed's method.
pub fn bessel_jy_steed(nu: f64, x: f64) -> (f64, f64) {
    debug_assert!(nu >= 0.0 && x > 0.0);
    let nl = (nu - x + 1.5).floor().max(0.0) as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: J'_nu / J_nu by modified Lentz
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            break;
        }
    }

    // downward recurrence to order xmu
    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let t = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * t - rjl;
        rjl = t;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    // CF2: p + iq by Steed's algorithm
    let mut a = 0.25 - xmu2;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for i in 2..MAXIT {
        a += 2.0 * (i - 1) as f64;
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di = -di / den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            break;
        }
    }
    let gam = (p - f) / q;
    let mut rjmu = (w / ((p - f) * gam + q)).sqrt();
    if rjl < 0.0 {
        rjmu = -rjmu;
    }
    let mut rymu = rjmu * gam;
    let rymup = rymu * (p + q / gam);
    let mut ry1 = xmu * xi * rymu - rymup;
    let scale = rjmu / rjl;
    let rj = rjl1 * scale;
    for i in 1..=nl {
        let t = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = t;
    }
    (rj, rymu)
}

/// J_{1/2}(x) = sqrt(2/(pi x)) sin x.
pub fn bessel_j_half(x: f64) -> f64 {
    (2.0 / (PI * x)).sqrt() * x.sin()
}
