//! Property tests over randomized inputs.

use keyhole_emi::constellation::{make_qam, Constellation};
use keyhole_emi::curve::db_to_linear;
use keyhole_emi::emi_analytic::{QuadratureDomain, SstQuadrature, DEFAULT_LAGUERRE_ORDER};
use keyhole_emi::keyhole_channel::ChannelConfig;
use keyhole_emi::scalar_info::AwgnChannel;
use keyhole_emi::specfun::{bessel_k, integrate_adaptive};
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn generic_constellation() -> impl Strategy<Value = Constellation> {
    prop::collection::vec(((-1.0f64..1.0, -1.0f64..1.0), 0.1f64..1.0), 3..7).prop_filter_map(
        "distinct points",
        |pts| {
            let points: Vec<Complex64> = pts
                .iter()
                .map(|&((re, im), _)| Complex64::new(re, im))
                .collect();
            let total: f64 = pts.iter().map(|p| p.1).sum();
            let probs = pts.iter().map(|p| p.1 / total).collect();
            Constellation::new(points, Some(probs), "generic").ok()
        },
    )
}

fn quadratures() -> &'static (SstQuadrature, SstQuadrature) {
    static Q: OnceLock<(SstQuadrature, SstQuadrature)> = OnceLock::new();
    Q.get_or_init(|| {
        let c = make_qam(4, None).unwrap();
        let cfg = ChannelConfig::reference();
        (
            SstQuadrature::no_csit(&c, &cfg, DEFAULT_LAGUERRE_ORDER).unwrap(),
            SstQuadrature::csit(&c, &cfg, DEFAULT_LAGUERRE_ORDER).unwrap(),
        )
    })
}

/// `e^z K_ν(z) = ∫₀^∞ e^{−z(cosh t − 1)} cosh(νt) dt`.
fn scaled_bessel_by_integral(nu: f64, z: f64) -> f64 {
    let f = |t: f64| (-z * (t.cosh() - 1.0) + nu * t).exp() * 0.5 * (1.0 + (-2.0 * nu * t).exp());
    let peak = (nu / z).asinh();
    let mut upper = peak + 1.0;
    while z * (upper.cosh() - 1.0) - nu * upper < 60.0 + (-z * (peak.cosh() - 1.0) + nu * peak) {
        upper += 1.0;
    }
    integrate_adaptive(f, 0.0, upper, &[peak], 1e-13, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn bessel_matches_integral_representation(nu in 0.0f64..8.0, z in 0.05f64..40.0) {
        let direct = bessel_k(nu, z).unwrap() * z.exp();
        let integral = scaled_bessel_by_integral(nu, z);
        prop_assert!(((direct - integral) / integral).abs() < 1e-8, "ν = {nu}, z = {z}: {direct} vs {integral}");
    }

    #[test]
    fn rotation_leaves_information_measures(c in generic_constellation(), theta in -3.2f64..3.2, db in -10.0f64..25.0) {
        let t = db_to_linear(db);
        let a = AwgnChannel::new(&c);
        let b = AwgnChannel::new(&c.rotated(theta));
        prop_assert!((a.mi(t) - b.mi(t)).abs() < 1e-10);
        prop_assert!((a.mmse(t) - b.mmse(t)).abs() < 1e-10);
    }

    #[test]
    fn mmse_is_bounded_and_nonincreasing(c in generic_constellation(), db in -10.0f64..25.0) {
        let a = AwgnChannel::new(&c);
        let t = db_to_linear(db);
        let (m0, m1) = (a.mmse(t), a.mmse(t * 1.2));
        prop_assert!((0.0..=1.0).contains(&m0));
        prop_assert!(m1 <= m0 + 1e-12);
    }

    #[test]
    fn mutual_information_is_concave(c in generic_constellation(), db in -10.0f64..20.0) {
        let a = AwgnChannel::new(&c);
        let t = db_to_linear(db);
        let h = 0.05 * t;
        let second = a.mi(t + h) - 2.0 * a.mi(t) + a.mi(t - h);
        prop_assert!(second <= 1e-8);
        prop_assert!(a.mi(t) <= c.entropy() + 1e-12);
    }

    #[test]
    fn csit_dominates_and_curves_rise(db in -10.0f64..40.0) {
        let (nc, cs) = quadratures();
        let t = db_to_linear(db);
        let (a, b) = (nc.emi(t, QuadratureDomain::Auto).unwrap(), cs.emi(t, QuadratureDomain::Auto).unwrap());
        prop_assert!(b >= a - 1e-9);
        prop_assert!(a <= 2.0 && b <= 2.0);
        let later = nc.emi(t * 1.1, QuadratureDomain::Auto).unwrap();
        prop_assert!(later >= a - 1e-12);
    }
}
