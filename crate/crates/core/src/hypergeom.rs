//! Generalized hypergeometric series and the conversion of gamma-product
//! series into prefactor x pFq form.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::gamma::{gamma_real, ln_gamma_signed, pole_index, pochhammer, recip_gamma_real};

pub const DEFAULT_REL_TOL: f64 = 1e-12;
pub const DEFAULT_K_MAX: usize = 20_000;

/// Number of consecutive negligible terms required before stopping.
const SMALL_RUN: usize = 3;

/// pFq descriptor: upper parameters, lower parameters, argument.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PFQSpec {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub argument: f64,
}

impl PFQSpec {
    /// Validates the parameter lists.
    ///
    /// A lower parameter at a nonpositive integer `-M` is only accepted when an
    /// upper parameter `-N` with `N <= M` terminates the series first.
    pub fn new(upper: Vec<f64>, lower: Vec<f64>, argument: f64) -> Result<Self> {
        let spec = PFQSpec { upper, lower, argument };
        spec.check(0)?;
        Ok(spec)
    }

    /// Validation with the first `n_reg` lower parameters regularized
    /// (those may sit at nonpositive integers).
    fn check(&self, n_reg: usize) -> Result<()> {
        if self.upper.iter().chain(&self.lower).any(|v| !v.is_finite()) || !self.argument.is_finite() {
            return Err(Error::InvalidSpec("non-finite parameter".into()));
        }
        let stop = self.terminating_degree();
        for &b in &self.lower[n_reg..] {
            if let Some(m) = pole_index(b) {
                match stop {
                    Some(n) if n <= m => {}
                    _ => {
                        return Err(Error::InvalidSpec(format!(
                            "lower parameter {b} is a nonpositive integer"
                        )))
                    }
                }
            }
        }
        let p = self.upper.len();
        let q = self.lower.len();
        if stop.is_none() && self.argument != 0.0 {
            if p > q + 1 {
                return Err(Error::InvalidSpec(format!("{p}F{q} diverges for z != 0")));
            }
            if p == q + 1 && self.argument.abs() > 1.0 {
                return Err(Error::InvalidSpec(format!(
                    "|z| = {} > 1 outside the disc of convergence",
                    self.argument.abs()
                )));
            }
        }
        Ok(())
    }

    /// Degree of the polynomial when some upper parameter is a nonpositive
    /// integer.
    pub fn terminating_degree(&self) -> Option<u64> {
        self.upper.iter().filter_map(|&a| pole_index(a)).min()
    }
}

/// Outcome of a series summation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesResult {
    pub value: f64,
    pub abs_err_est: f64,
    pub terms_used: usize,
    pub converged: bool,
}

/// Sums pFq(upper; lower; z) by the term-ratio recurrence.
pub fn sum_pfq(spec: &PFQSpec, rel_tol: f64, k_max: usize) -> Result<SeriesResult> {
    sum_pfq_regularized(spec, 0, rel_tol, k_max)
}

/// Sums the pFq series with the first `n_reg` lower parameters regularized,
/// i.e. each (b)_k in the denominator replaced by Gamma(b + k).
///
/// Regularization keeps the series finite when one of those lower parameters
/// is a nonpositive integer; the leading terms then vanish identically.
pub fn sum_pfq_regularized(spec: &PFQSpec, n_reg: usize, rel_tol: f64, k_max: usize) -> Result<SeriesResult> {
    if rel_tol < 1e-14 || k_max < 1 || n_reg > spec.lower.len() {
        return Err(Error::InvalidSpec("rel_tol must be >= 1e-14 and k_max >= 1".into()));
    }
    spec.check(n_reg)?;
    // canonical parameter order makes the rounding independent of how the
    // caller listed them
    let mut upper = spec.upper.clone();
    upper.sort_by(f64::total_cmp);
    let mut lower = spec.lower.clone();
    lower[..n_reg].sort_by(f64::total_cmp);
    lower[n_reg..].sort_by(f64::total_cmp);
    let spec = &PFQSpec { upper, lower, argument: spec.argument };
    let (reg, plain) = spec.lower.split_at(n_reg);
    let z = spec.argument;

    // first index at which every regularized Gamma(b + k) is finite
    let k0 = reg
        .iter()
        .filter_map(|&b| pole_index(b).map(|m| m + 1))
        .max()
        .unwrap_or(0) as usize;
    if let Some(n) = spec.terminating_degree() {
        if (n as usize) < k0 {
            return Ok(SeriesResult { value: 0.0, abs_err_est: 0.0, terms_used: 0, converged: true });
        }
    }

    let mut term = if k0 == 0 {
        reg.iter().map(|&b| recip_gamma_real(b)).product::<f64>()
    } else {
        let kf = k0 as u32;
        let mut t = z.powi(kf as i32) / gamma_real(k0 as f64 + 1.0)?;
        for &a in &spec.upper {
            t *= pochhammer(a, kf).0;
        }
        for &b in plain {
            t /= pochhammer(b, kf).0;
        }
        for &b in reg {
            t *= recip_gamma_real(b + k0 as f64);
        }
        t
    };
    let mut sum = term;
    let mut terms_used = 1;
    let mut small_run = 0;
    let mut last_ratio = 0.0_f64;
    let geometric_floor = if spec.upper.len() == spec.lower.len() + 1 { z.abs() } else { 0.0 };
    // polynomials are summed to the end
    let terminating = spec.terminating_degree().is_some_and(|n| (n as usize) < k0 + k_max);

    let mut k = k0;
    loop {
        if term == 0.0 && k > k0 {
            // an upper parameter hit zero: the series terminated exactly
            return Ok(SeriesResult { value: sum, abs_err_est: 0.0, terms_used, converged: true });
        }
        if k + 1 - k0 >= k_max {
            let est = tail_bound(term, last_ratio.max(geometric_floor));
            return Ok(SeriesResult { value: sum, abs_err_est: est, terms_used, converged: false });
        }
        let kf = k as f64;
        let mut num = z / (kf + 1.0);
        let mut zero = false;
        for &a in &spec.upper {
            if a + kf == 0.0 || pole_index(a + kf) == Some(0) {
                zero = true;
            }
            num *= a + kf;
        }
        if zero {
            return Ok(SeriesResult { value: sum, abs_err_est: 0.0, terms_used, converged: true });
        }
        for &b in spec.lower.iter() {
            num /= b + kf;
        }
        let next = term * num;
        if term != 0.0 {
            last_ratio = (next / term).abs();
        }
        term = next;
        sum += term;
        terms_used += 1;
        k += 1;
        if term.abs() <= rel_tol * sum.abs() {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= SMALL_RUN && !terminating {
            let est = tail_bound(term, last_ratio.max(geometric_floor));
            let converged = est <= rel_tol * sum.abs().max(1.0);
            return Ok(SeriesResult { value: sum, abs_err_est: est, terms_used, converged });
        }
    }
}

fn tail_bound(last_term: f64, ratio: f64) -> f64 {
    if ratio < 1.0 {
        last_term.abs() * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

/// Summation schema sum_k z^k/k! prod Gamma(k+g) prod Gamma(m-k) /
/// (prod Gamma(k+q) prod Gamma(p-k)).
///
/// The residue series carry their alternating sign inside `argument`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaSeriesPattern {
    /// g_i, gammas Gamma(k + g_i) in the numerator
    pub ascending_num: Vec<f64>,
    /// m_i, gammas Gamma(m_i - k) in the numerator
    pub descending_num: Vec<f64>,
    /// q_i, gammas Gamma(k + q_i) in the denominator
    pub ascending_den: Vec<f64>,
    /// p_i, gammas Gamma(p_i - k) in the denominator
    pub descending_den: Vec<f64>,
    pub argument: f64,
}

impl GammaSeriesPattern {
    pub fn is_finite(&self) -> bool {
        self.ascending_num
            .iter()
            .chain(&self.descending_num)
            .chain(&self.ascending_den)
            .chain(&self.descending_den)
            .all(|v| v.is_finite())
            && self.argument.is_finite()
    }
}

/// Rewrites a gamma-product series as prefactor x pFq.
///
/// Gamma(m - k) = Gamma(m) (-1)^k / (1-m)_k and
/// 1/Gamma(p - k) = (-1)^k (1-p)_k / Gamma(p), so the upper list gains the
/// 1 - p_i, the lower list gains the 1 - m_i, and the argument picks up
/// (-1)^(N_m - N_p).
pub fn pattern_to_pfq(p: &GammaSeriesPattern) -> Result<(f64, PFQSpec)> {
    if !p.is_finite() {
        return Err(Error::InvalidPattern("non-finite entry".into()));
    }
    let mut prefactor = 1.0;
    for &g in p.ascending_num.iter().chain(&p.descending_num) {
        prefactor *= gamma_real(g).map_err(|_| Error::InvalidPattern(format!("numerator Gamma({g}) at a pole")))?;
    }
    for &q in &p.ascending_den {
        if pole_index(q).is_some() {
            return Err(Error::InvalidPattern(format!("ascending denominator {q} is a nonpositive integer")));
        }
        prefactor *= recip_gamma_real(q);
    }
    for &d in &p.descending_den {
        prefactor *= recip_gamma_real(d);
    }
    let upper: Vec<f64> = p
        .ascending_num
        .iter()
        .copied()
        .chain(p.descending_den.iter().map(|d| 1.0 - d))
        .collect();
    let lower: Vec<f64> = p
        .ascending_den
        .iter()
        .copied()
        .chain(p.descending_num.iter().map(|m| 1.0 - m))
        .collect();
    let sign_exp = p.descending_num.len() + p.descending_den.len();
    let argument = if sign_exp % 2 == 0 { p.argument } else { -p.argument };
    let spec = PFQSpec::new(upper, lower, argument).map_err(|e| Error::InvalidPattern(e.to_string()))?;
    Ok((prefactor, spec))
}

/// Value of the k-th term of the pattern series computed from raw gammas.
///
/// Poles are counted: a term with more denominator poles than numerator
/// poles vanishes; a numerator pole that is not cancelled that way is an
/// error.
pub fn pattern_term(p: &GammaSeriesPattern, k: usize) -> Result<f64> {
    let kf = k as f64;
    let mut log_mag = 0.0;
    let mut sign = 1.0;
    let mut num_poles = 0usize;
    let mut den_poles = 0usize;
    let mut pole_arg = 0.0;
    for arg in p.ascending_num.iter().map(|g| g + kf).chain(p.descending_num.iter().map(|m| m - kf)) {
        if pole_index(arg).is_some() {
            num_poles += 1;
            pole_arg = arg;
            continue;
        }
        let (l, s) = ln_gamma_signed(arg);
        log_mag += l;
        sign *= s;
    }
    for arg in p.ascending_den.iter().map(|q| q + kf).chain(p.descending_den.iter().map(|d| d - kf)) {
        if pole_index(arg).is_some() {
            den_poles += 1;
            continue;
        }
        let (l, s) = ln_gamma_signed(arg);
        log_mag -= l;
        sign *= s;
    }
    if den_poles > num_poles {
        return Ok(0.0);
    }
    if num_poles > 0 {
        return Err(Error::NumeratorPole { k, arg: pole_arg });
    }
    if p.argument == 0.0 {
        return Ok(if k == 0 { sign * log_mag.exp() } else { 0.0 });
    }
    let (lf, _) = ln_gamma_signed(kf + 1.0);
    log_mag += kf * p.argument.abs().ln() - lf;
    if p.argument < 0.0 && k % 2 == 1 {
        sign = -sign;
    }
    Ok(sign * log_mag.exp())
}

/// Sum of the pattern series for k = 0..=k_last, each term from raw gammas.
pub fn direct_pattern_sum(p: &GammaSeriesPattern, k_last: usize) -> Result<f64> {
    let mut s = 0.0;
    for k in 0..=k_last {
        s += pattern_term(p, k)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(u: &[f64], l: &[f64], z: f64) -> PFQSpec {
        PFQSpec::new(u.to_vec(), l.to_vec(), z).unwrap()
    }

    #[test]
    fn zero_argument() {
        let r = sum_pfq(&spec(&[1.5, 2.0, 0.3, 1.0, 1.0, 1.0], &[2.5, 1.0, 1.0, 3.0, 0.7], 0.0), 1e-12, 100).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.converged);
        assert!(r.terms_used <= 2);
    }

    #[test]
    fn zero_upper_terminates() {
        let r = sum_pfq(&spec(&[0.0, 2.0, 3.0, 1.0, 1.0, 1.0], &[2.5, 1.0, 1.0, 3.0, 0.7], 0.9), 1e-12, 100).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.abs_err_est, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn polynomial_case() {
        // 2F1(-2, 1; 1; z) = (1 - z)^2
        let r = sum_pfq(&spec(&[-2.0, 1.0], &[1.0], 0.3), 1e-12, 100).unwrap();
        assert!((r.value - 0.49).abs() < 1e-15);
    }

    #[test]
    fn invalid_lower() {
        assert!(matches!(
            PFQSpec::new(vec![1.0, 1.0], vec![-2.0], 0.5),
            Err(Error::InvalidSpec(_))
        ));
        // terminates before reaching the bad denominator
        assert!(PFQSpec::new(vec![-1.0, 1.0], vec![-2.0], 0.5).is_ok());
        assert!(matches!(PFQSpec::new(vec![1.0, 1.0], vec![2.0], 1.5), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn exponential() {
        // 1F1(1; 1; z) = e^z
        let r = sum_pfq(&spec(&[1.0], &[1.0], 0.3), 1e-14, 100).unwrap();
        assert!((r.value - 0.3_f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn not_converged_flag() {
        let r = sum_pfq(&spec(&[1.0, 1.0], &[2.0], 0.999), 1e-14, 50).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn regularized_matches_plain() {
        let s = spec(&[0.3, 1.7, 2.2], &[1.4, 0.6], 0.4);
        let plain = sum_pfq(&s, 1e-14, 1000).unwrap().value;
        let reg = sum_pfq_regularized(&s, 1, 1e-14, 1000).unwrap().value;
        assert!((reg - plain * recip_gamma_real(1.4)).abs() < 1e-14);
    }

    #[test]
    fn regularized_at_nonpositive_lower() {
        // sum_{k>=2} (a)_k z^k / (k! Gamma(k - 1)) for 1F~1(a; -1; z)
        let s = PFQSpec { upper: vec![0.5], lower: vec![-1.0], argument: 0.3 };
        let got = sum_pfq_regularized(&s, 1, 1e-14, 1000).unwrap().value;
        let mut want = 0.0;
        for k in 2..60 {
            want += pochhammer(0.5, k).0 * 0.3_f64.powi(k as i32)
                / (gamma_real(k as f64 + 1.0).unwrap() * gamma_real(k as f64 - 1.0).unwrap());
        }
        assert!((got - want).abs() < 1e-15, "{got} {want}");
    }

    #[test]
    fn pattern_exponential() {
        let p = GammaSeriesPattern {
            ascending_num: vec![1.0],
            descending_num: vec![],
            ascending_den: vec![1.0],
            descending_den: vec![],
            argument: 0.3,
        };
        let (pre, s) = pattern_to_pfq(&p).unwrap();
        assert_eq!(pre, 1.0);
        assert_eq!(s.upper, vec![1.0]);
        assert_eq!(s.lower, vec![1.0]);
        let via = pre * sum_pfq(&s, 1e-14, 200).unwrap().value;
        let direct = direct_pattern_sum(&p, 40).unwrap();
        assert!((via - direct).abs() < 1e-13);
        assert!((direct - 0.3_f64.exp()).abs() < 1e-13);
    }

    #[test]
    fn descending_den_pole_kills_tail() {
        let p = GammaSeriesPattern {
            ascending_num: vec![],
            descending_num: vec![],
            ascending_den: vec![],
            descending_den: vec![1.0],
            argument: 0.7,
        };
        let (pre, s) = pattern_to_pfq(&p).unwrap();
        assert_eq!(s.upper, vec![0.0]);
        assert_eq!(pre * sum_pfq(&s, 1e-12, 50).unwrap().value, 1.0);
        assert_eq!(direct_pattern_sum(&p, 10).unwrap(), 1.0);
    }

    #[test]
    fn numerator_pole_detected() {
        let p = GammaSeriesPattern {
            ascending_num: vec![],
            descending_num: vec![1.0],
            ascending_den: vec![],
            descending_den: vec![],
            argument: 0.2,
        };
        assert!(matches!(direct_pattern_sum(&p, 3), Err(Error::NumeratorPole { k: 1, .. })));
        // an extra denominator pole cancels it
        let q = GammaSeriesPattern { descending_den: vec![1.0, 1.0], ..p };
        assert!(direct_pattern_sum(&q, 5).is_ok());
    }

    #[test]
    fn pattern_rejects_pole_prefactor() {
        let p = GammaSeriesPattern {
            ascending_num: vec![-1.0],
            descending_num: vec![],
            ascending_den: vec![],
            descending_den: vec![],
            argument: 0.2,
        };
        assert!(matches!(pattern_to_pfq(&p), Err(Error::InvalidPattern(_))));
    }

    #[test]
    fn single_term_when_k_zero() {
        let p = GammaSeriesPattern {
            ascending_num: vec![0.5, 2.5],
            descending_num: vec![0.3],
            ascending_den: vec![1.5],
            descending_den: vec![0.25],
            argument: 0.6,
        };
        let want = gamma_real(0.5).unwrap() * gamma_real(2.5).unwrap() * gamma_real(0.3).unwrap()
            / (gamma_real(1.5).unwrap() * gamma_real(0.25).unwrap());
        assert!((direct_pattern_sum(&p, 0).unwrap() - want).abs() < 1e-13 * want.abs());
        let z = GammaSeriesPattern { argument: 0.0, ..p };
        assert!((direct_pattern_sum(&z, 10).unwrap() - want).abs() < 1e-13 * want.abs());
    }
}
