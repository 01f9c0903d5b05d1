use fourbessel::hypergeom::{direct_pattern_sum, pattern_to_pfq, sum_pfq, GammaSeriesPattern, PFQSpec};
use proptest::prelude::*;

fn pattern() -> impl Strategy<Value = GammaSeriesPattern> {
    (
        prop::collection::vec(0.1f64..1.0, 3),
        prop::collection::vec(-0.9f64..-0.1, 2),
        prop::collection::vec(1.0f64..3.0, 3),
        prop::collection::vec(0.5f64..1.5, 3),
        -0.9f64..0.9,
    )
        .prop_map(|(an, dn, ad, dd, z)| GammaSeriesPattern {
            ascending_num: an,
            descending_num: dn,
            ascending_den: ad,
            descending_den: dd,
            argument: z,
        })
}

fn sum(u: &[f64], l: &[f64], z: f64) -> f64 {
    sum_pfq(&PFQSpec::new(u.to_vec(), l.to_vec(), z).unwrap(), 1e-14, 10_000).unwrap().value
}

proptest! {
    #[test]
    fn pattern_matches_pfq(p in pattern()) {
        let direct = direct_pattern_sum(&p, 200).unwrap();
        let (pre, spec) = pattern_to_pfq(&p).unwrap();
        prop_assert_eq!(spec.upper.len(), 6);
        prop_assert_eq!(spec.lower.len(), 5);
        let via = pre * sum_pfq(&spec, 1e-14, 10_000).unwrap().value;
        prop_assert!((direct - via).abs() <= 1e-9 * direct.abs().max(1.0), "{} vs {}", direct, via);
    }

    #[test]
    fn permutation_invariance(
        u in prop::collection::vec(0.1f64..3.0, 6),
        l in prop::collection::vec(0.5f64..4.0, 5),
        z in -0.9f64..0.9,
        ru in 0usize..720,
        rl in 0usize..120,
    ) {
        let base = sum(&u, &l, z);
        let mut pu = u.clone();
        let mut pl = l.clone();
        // decode permutation indices
        let mut r = ru;
        for i in (1..pu.len()).rev() {
            pu.swap(i, r % (i + 1));
            r /= i + 1;
        }
        let mut r = rl;
        for i in (1..pl.len()).rev() {
            pl.swap(i, r % (i + 1));
            r /= i + 1;
        }
        let other = sum(&pu, &pl, z);
        prop_assert!((base - other).abs() <= 1e-14 * base.abs().max(1.0), "{} vs {}", base, other);
    }

    #[test]
    fn terminating_polynomial(n in 0u32..8, b in 0.5f64..3.0, z in -2.0f64..2.0) {
        // 1F1(-n; b; z) via the explicit finite sum
        let spec = PFQSpec::new(vec![-(n as f64)], vec![b], z).unwrap();
        let r = sum_pfq(&spec, 1e-14, 1000).unwrap();
        prop_assert!(r.terms_used as u32 <= n + 1);
        let mut t = 1.0;
        let mut s = 1.0;
        for k in 0..n {
            let kf = k as f64;
            t *= (kf - n as f64) / (b + kf) * z / (kf + 1.0);
            s += t;
        }
        prop_assert!((r.value - s).abs() <= 1e-13 * s.abs().max(1.0));
        prop_assert_eq!(r.abs_err_est, 0.0);
    }
}

#[test]
fn elementary_reductions() {
    let z: f64 = 0.37;
    // 1F0(a;;z) = (1-z)^-a
    assert!((sum(&[1.5], &[], z) - (1.0 - z).powf(-1.5)).abs() < 1e-14);
    // 2F1(1,1;2;z) = -ln(1-z)/z
    assert!((sum(&[1.0, 1.0], &[2.0], z) + (1.0 - z).ln() / z).abs() < 1e-14);
    // 0F0 = exp
    assert!((sum(&[], &[], -1.3) - (-1.3f64).exp()).abs() < 1e-14);
}

#[test]
fn error_estimate_bounds_truncation() {
    // 2F1(1,1;2;z) near the edge of the disc: reported bound covers the error
    let z: f64 = 0.95;
    let exact = -(1.0 - z).ln() / z;
    let r = sum_pfq(&PFQSpec::new(vec![1.0, 1.0], vec![2.0], z).unwrap(), 1e-10, 100_000).unwrap();
    assert!((r.value - exact).abs() <= r.abs_err_est.max(1e-15));
    let r = sum_pfq(&PFQSpec::new(vec![1.0, 1.0], vec![2.0], z).unwrap(), 1e-4, 100_000).unwrap();
    assert!((r.value - exact).abs() <= r.abs_err_est);
}

#[test]
fn divergent_spec_rejected() {
    assert!(PFQSpec::new(vec![1.0, 1.0, 1.0], vec![1.0], 0.1).is_err());
    assert!(PFQSpec::new(vec![1.0, 1.0], vec![2.0], 1.5).is_err());
    assert!(PFQSpec::new(vec![1.0], vec![-2.0], 0.5).is_err());
    assert!(PFQSpec::new(vec![-1.0], vec![-2.0], 0.5).is_ok());
}
