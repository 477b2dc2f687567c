//! Monte Carlo single-stream EMI and high-SNR slope fitting.
//!
//! Each realization draws its channel from its own substream `(seed, index)`,
//! and per-SNR reductions run in index order with compensated summation, so
//! curves are bit-identical across worker counts.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constellation::Constellation;
use crate::curve::{db_to_linear, CurveMeta, EmiCurve, Method};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, ExecPolicy};
use crate::keyhole_channel::{sample_full_rank, sample_realization, ChannelConfig};
use crate::scalar_info::AwgnChannel;
use crate::stats::mean_stderr_by;

pub const MIN_REALIZATIONS: usize = 1000;
pub const MIN_FIT_POINTS: usize = 4;
/// A windowed point is resolved when its gap exceeds this many standard errors.
pub const RESOLUTION_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    SstNoCsit,
    SstCsit,
    GaussianSstNoCsit,
    GaussianSstCsit,
}

impl Scheme {
    pub fn is_gaussian(self) -> bool {
        matches!(self, Scheme::GaussianSstNoCsit | Scheme::GaussianSstCsit)
    }

    pub fn is_csit(self) -> bool {
        matches!(self, Scheme::SstCsit | Scheme::GaussianSstCsit)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::SstNoCsit => "sst-no-csit",
            Scheme::SstCsit => "sst-csit",
            Scheme::GaussianSstNoCsit => "gaussian-sst-no-csit",
            Scheme::GaussianSstCsit => "gaussian-sst-csit",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationPlan {
    pub constellation: Constellation,
    pub config: ChannelConfig,
    pub scheme: Scheme,
    pub snr_db_grid: Vec<f64>,
    pub realizations: usize,
    pub seed: u64,
}

impl SimulationPlan {
    pub fn new(
        constellation: Constellation,
        config: ChannelConfig,
        scheme: Scheme,
        snr_db_grid: Vec<f64>,
        realizations: usize,
        seed: u64,
    ) -> Result<Self> {
        if realizations < MIN_REALIZATIONS {
            return Err(Error::InvalidParameter(format!(
                "realizations = {realizations} must be >= {MIN_REALIZATIONS}"
            )));
        }
        validate_grid(&snr_db_grid)?;
        Ok(Self {
            constellation,
            config,
            scheme,
            snr_db_grid,
            realizations,
            seed,
        })
    }
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("SNR grid is empty".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "SNR grid must be finite and sorted".into(),
        ));
    }
    Ok(())
}

/// Effective gain of one realization: the scalar SNR is `γ̄ · gain`.
fn keyhole_gain(cfg: &ChannelConfig, csit: bool, seed: u64, index: u64) -> f64 {
    let h = sample_realization(cfg, seed, index);
    if csit {
        h.s2()
    } else {
        h.s1() / cfg.n_t as f64
    }
}

/// `λ_max(H^H H)` (MRT) or `‖H 1‖²/N_t` (uniform beamforming).
pub fn matrix_gain(h: &DMatrix<Complex64>, csit: bool) -> f64 {
    if csit {
        (h.adjoint() * h).symmetric_eigenvalues().max()
    } else {
        let row_sums = h.column_sum();
        row_sums.norm_squared() / h.ncols() as f64
    }
}

/// Per-SNR mean and stderr over `gains`, reduced in index order.
fn curve_from_gains(
    gains: &[f64],
    channel: Option<&AwgnChannel>,
    grid: &[f64],
    policy: ExecPolicy,
) -> (Vec<f64>, Vec<f64>) {
    let rows = map_indexed(policy, grid.len(), |i| {
        let snr = db_to_linear(grid[i]);
        // per-realization gap keeps the high-SNR tail relatively accurate
        let (mean, se) = match channel {
            Some(ch) => mean_stderr_by(gains.len(), |k| ch.gap_interp(snr * gains[k])),
            None => mean_stderr_by(gains.len(), |k| {
                (snr * gains[k]).ln_1p() / std::f64::consts::LN_2
            }),
        };
        match channel {
            Some(ch) => ((ch.entropy() - mean).clamp(0.0, ch.entropy()), se),
            None => (mean, se),
        }
    });
    rows.into_iter().unzip()
}

fn mc_curve(
    label: &str,
    scheme: &str,
    channel: Option<&AwgnChannel>,
    gains: &[f64],
    grid: &[f64],
    seed: u64,
    policy: ExecPolicy,
) -> EmiCurve {
    let (emi, se) = curve_from_gains(gains, channel, grid, policy);
    let entropy = channel.map_or(f64::INFINITY, |c| c.entropy());
    let mut meta = CurveMeta::new(scheme, label, entropy);
    meta.realizations = Some(gains.len());
    meta.seed = Some(seed);
    EmiCurve {
        snr_db: grid.to_vec(),
        emi_bits: emi,
        method: Method::MonteCarlo,
        stderr_bits: Some(se),
        meta,
    }
}

pub fn emi_sst_mc(plan: &SimulationPlan) -> Result<EmiCurve> {
    emi_sst_mc_with(plan, ExecPolicy::default())
}

pub fn emi_sst_mc_with(plan: &SimulationPlan, policy: ExecPolicy) -> Result<EmiCurve> {
    validate_grid(&plan.snr_db_grid)?;
    let cfg = plan.config;
    let csit = plan.scheme.is_csit();
    let gains = map_indexed(policy, plan.realizations, |i| {
        keyhole_gain(&cfg, csit, plan.seed, i as u64)
    });
    let channel = (!plan.scheme.is_gaussian()).then(|| AwgnChannel::shared(&plan.constellation));
    let label = if plan.scheme.is_gaussian() {
        "gaussian"
    } else {
        plan.constellation.label()
    };
    let mut curve = mc_curve(
        label,
        plan.scheme.as_str(),
        channel.as_deref(),
        &gains,
        &plan.snr_db_grid,
        plan.seed,
        policy,
    );
    curve.meta.config = Some(cfg);
    Ok(curve)
}

/// Least-squares line through `(log10 γ̄, log10 gap)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits the high-SNR gap `entropy − EMI` over the inclusive window `window_db`.
pub fn fit_diversity(
    curve: &EmiCurve,
    entropy: f64,
    window_db: (f64, f64),
) -> Result<DiversityFit> {
    let (lo, hi) = window_db;
    if !(lo < hi) {
        return Err(Error::DegenerateWindow(format!(
            "window [{lo}, {hi}] dB is empty"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &db) in curve.snr_db.iter().enumerate() {
        if db < lo || db > hi {
            continue;
        }
        let gap = entropy - curve.emi_bits[i];
        let se = curve.stderr_at(i);
        if !(gap > 0.0) || gap <= RESOLUTION_FACTOR * se {
            return Err(Error::WindowUnresolvable(format!(
                "gap {gap:.3e} at {db} dB not above {RESOLUTION_FACTOR} x stderr {se:.3e}"
            )));
        }
        xs.push(db / 10.0);
        ys.push(gap.log10());
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateWindow(format!(
            "{} grid points in [{lo}, {hi}] dB, need {MIN_FIT_POINTS}",
            xs.len()
        )));
    }
    Ok(least_squares(&xs, &ys))
}

pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> DiversityFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    DiversityFit {
        slope,
        intercept,
        r_squared,
    }
}

/// Fit windows for [`rank_contrast_report`]. The keyhole CSIT window needs
/// about 10^7 realizations to resolve; with `N_t = N_r` its gap carries a
/// `ln γ̄` factor, so the local slope only approaches −2 slowly (−1.7 at 24 dB).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankContrastWindows {
    pub keyhole_csit: (f64, f64),
    pub keyhole_no_csit: (f64, f64),
    pub full_rank_no_csit: (f64, f64),
    pub full_rank_csit: (f64, f64),
}

impl Default for RankContrastWindows {
    fn default() -> Self {
        Self {
            keyhole_csit: (24.0, 32.0),
            keyhole_no_csit: (24.0, 36.0),
            full_rank_no_csit: (14.0, 24.0),
            full_rank_csit: (8.0, 14.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankContrastCase {
    pub curve: EmiCurve,
    pub window_db: (f64, f64),
    /// `None` when the window is unresolvable at this sample size.
    pub fit: Option<DiversityFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankContrastReport {
    pub keyhole_csit: RankContrastCase,
    pub keyhole_no_csit: RankContrastCase,
    pub full_rank_no_csit: RankContrastCase,
    pub full_rank_csit: RankContrastCase,
}

/// Rayleigh (`m = 1`) keyhole versus full-rank i.i.d. channel, MRT or uniform beamforming with MRC.
#[allow(clippy::too_many_arguments)]
pub fn rank_contrast_report(
    c: &Constellation,
    n_t: usize,
    n_r: usize,
    snr_db_grid: &[f64],
    seed: u64,
    realizations: usize,
    windows: RankContrastWindows,
    policy: ExecPolicy,
) -> Result<RankContrastReport> {
    validate_grid(snr_db_grid)?;
    if realizations < MIN_REALIZATIONS {
        return Err(Error::InvalidParameter(format!(
            "realizations = {realizations} must be >= {MIN_REALIZATIONS}"
        )));
    }
    let cfg = ChannelConfig::new(n_t, n_r, 1.0, 1.0)?;
    let channel = AwgnChannel::shared(c);
    let case = |scheme: &str, gains: Vec<f64>, window: (f64, f64)| {
        let mut curve = mc_curve(
            c.label(),
            scheme,
            Some(&channel),
            &gains,
            snr_db_grid,
            seed,
            policy,
        );
        curve.meta.config = Some(cfg);
        let fit = fit_diversity(&curve, channel.entropy(), window).ok();
        RankContrastCase {
            curve,
            window_db: window,
            fit,
        }
    };
    let keyhole = |csit: bool| {
        map_indexed(policy, realizations, |i| {
            keyhole_gain(&cfg, csit, seed, i as u64)
        })
    };
    let full = |csit: bool| {
        map_indexed(policy, realizations, |i| {
            matrix_gain(&sample_full_rank(n_r, n_t, seed, i as u64), csit)
        })
    };
    Ok(RankContrastReport {
        keyhole_csit: case("keyhole-csit", keyhole(true), windows.keyhole_csit),
        keyhole_no_csit: case("keyhole-no-csit", keyhole(false), windows.keyhole_no_csit),
        full_rank_no_csit: case("full-rank-no-csit", full(false), windows.full_rank_no_csit),
        full_rank_csit: case("full-rank-csit", full(true), windows.full_rank_csit),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::make_qam;

    fn plan(scheme: Scheme, grid: Vec<f64>, n: usize, seed: u64) -> SimulationPlan {
        SimulationPlan::new(
            make_qam(4, None).unwrap(),
            ChannelConfig::reference(),
            scheme,
            grid,
            n,
            seed,
        )
        .unwrap()
    }

    #[test]
    fn plan_validation() {
        let c = make_qam(4, None).unwrap();
        let cfg = ChannelConfig::reference();
        assert!(SimulationPlan::new(c.clone(), cfg, Scheme::SstCsit, vec![0.0], 999, 1).is_err());
        assert!(SimulationPlan::new(c.clone(), cfg, Scheme::SstCsit, vec![], 1000, 1).is_err());
        assert!(SimulationPlan::new(c, cfg, Scheme::SstCsit, vec![2.0, 1.0], 1000, 1).is_err());
    }

    #[test]
    fn synthetic_power_law_recovers_itself() {
        let grid: Vec<f64> = (0..=20).map(|i| 2.0 * i as f64).collect();
        let (ga, gd, h) = (2.0f64, 3.0f64, 2.0);
        let curve = EmiCurve {
            emi_bits: grid
                .iter()
                .map(|&d| h - (ga * db_to_linear(d)).powf(-gd))
                .collect(),
            snr_db: grid,
            method: Method::Asymptotic,
            stderr_bits: None,
            meta: CurveMeta::new("synthetic", "none", h),
        };
        let fit = fit_diversity(&curve, h, (0.0, 6.0)).unwrap();
        assert!((fit.slope + 3.0).abs() < 1e-9);
        assert!(fit.r_squared > 1.0 - 1e-12);
        assert!((fit.intercept + gd * ga.log10()).abs() < 1e-9);
        assert!(matches!(
            fit_diversity(&curve, h, (0.0, 5.0)),
            Err(Error::DegenerateWindow(_))
        ));
        assert!(matches!(
            fit_diversity(&curve, h, (5.0, 5.0)),
            Err(Error::DegenerateWindow(_))
        ));
    }

    #[test]
    fn unresolvable_window() {
        let curve = emi_sst_mc(&plan(
            Scheme::SstCsit,
            vec![30.0, 32.0, 34.0, 36.0],
            1000,
            3,
        ))
        .unwrap();
        assert!(matches!(
            fit_diversity(&curve, 2.0, (30.0, 36.0)),
            Err(Error::WindowUnresolvable(_))
        ));
    }

    #[test]
    fn deterministic_across_policies() {
        let p = plan(Scheme::SstNoCsit, vec![-4.0, 6.0, 16.0], 2000, 11);
        let a = emi_sst_mc_with(&p, ExecPolicy::Sequential).unwrap();
        let b = emi_sst_mc_with(&p, ExecPolicy::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gaussian_exceeds_finite_alphabet() {
        let g = emi_sst_mc(&plan(Scheme::GaussianSstCsit, vec![30.0], 2000, 5)).unwrap();
        let q = emi_sst_mc(&plan(Scheme::SstCsit, vec![30.0], 2000, 5)).unwrap();
        assert!(g.emi_bits[0] > q.emi_bits[0] + 5.0);
        assert!(g.entropy().is_infinite());
    }

    #[test]
    fn matrix_gain_rank_one_matches_keyhole() {
        let cfg = ChannelConfig::reference();
        let h = sample_realization(&cfg, 9, 4);
        let m = h.matrix();
        assert!((matrix_gain(&m, true) / h.s2() - 1.0).abs() < 1e-12);
        assert!((matrix_gain(&m, false) / (h.s1() / 2.0) - 1.0).abs() < 1e-12);
    }
}
