//! Monte Carlo consistency against independent numerical integration.

use keyhole_emi::constellation::make_qam;
use keyhole_emi::curve::{db_to_linear, snr_grid};
use keyhole_emi::exec::{with_workers, ExecPolicy};
use keyhole_emi::keyhole_channel::{ChannelConfig, FOperatorExpansion};
use keyhole_emi::scalar_info::AwgnChannel;
use keyhole_emi::simulate::{emi_sst_mc, emi_sst_mc_with, Scheme, SimulationPlan};
use keyhole_emi::specfun::integrate_adaptive;

fn plan(scheme: Scheme, grid: Vec<f64>, realizations: usize, seed: u64) -> SimulationPlan {
    SimulationPlan::new(
        make_qam(4, None).unwrap(),
        ChannelConfig::reference(),
        scheme,
        grid,
        realizations,
        seed,
    )
    .unwrap()
}

#[test]
fn no_csit_curve_matches_density_integral() {
    let cfg = ChannelConfig::reference();
    let exp = FOperatorExpansion::new(&cfg).unwrap();
    let ch = AwgnChannel::new(&make_qam(4, None).unwrap());
    let grid = vec![-5.0, 5.0, 15.0];
    let mc = emi_sst_mc(&plan(Scheme::SstNoCsit, grid.clone(), 100_000, 3)).unwrap();
    let breaks: Vec<f64> = (-6..=2).map(|k| 10f64.powi(k)).collect();
    for (i, &db) in grid.iter().enumerate() {
        let snr = db_to_linear(db);
        let f = |x: f64| {
            if x > 0.0 {
                ch.mi(snr * x / cfg.n_t as f64) * exp.pdf_s1(x).unwrap()
            } else {
                0.0
            }
        };
        let reference = integrate_adaptive(f, 0.0, 400.0, &breaks, 1e-10, 1e-14);
        let se = mc.stderr_at(i);
        assert!(
            (mc.emi_bits[i] - reference).abs() <= 3.0 * se,
            "{db} dB: MC {} ± {se} vs {reference}",
            mc.emi_bits[i]
        );
    }
}

#[test]
fn stderr_halves_when_realizations_quadruple() {
    for scheme in [Scheme::SstNoCsit, Scheme::SstCsit] {
        let small = emi_sst_mc(&plan(scheme, vec![0.0, 10.0], 20_000, 5)).unwrap();
        let large = emi_sst_mc(&plan(scheme, vec![0.0, 10.0], 80_000, 5)).unwrap();
        for i in 0..2 {
            let ratio = small.stderr_at(i) / large.stderr_at(i);
            assert!(
                (ratio - 2.0).abs() <= 0.4,
                "{scheme:?} point {i}: ratio {ratio}"
            );
        }
    }
}

#[test]
fn curves_ignore_worker_count() {
    let p = plan(Scheme::SstCsit, snr_grid(-10.0, 30.0, 4.0), 30_000, 9);
    let reference = emi_sst_mc_with(&p, ExecPolicy::Sequential).unwrap();
    for workers in [1, 2, 5] {
        let c = with_workers(Some(workers), || emi_sst_mc_with(&p, ExecPolicy::Parallel))
            .unwrap()
            .unwrap();
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            serde_json::to_string(&reference).unwrap()
        );
    }
}

#[test]
fn different_seeds_differ() {
    let a = emi_sst_mc(&plan(Scheme::SstNoCsit, vec![10.0], 5_000, 1)).unwrap();
    let b = emi_sst_mc(&plan(Scheme::SstNoCsit, vec![10.0], 5_000, 2)).unwrap();
    assert_ne!(a.emi_bits, b.emi_bits);
}
