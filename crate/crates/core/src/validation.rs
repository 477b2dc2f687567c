//! The acceptance suite, shared by the `acceptance` test target and the
//! `validate` command.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constellation::{make_qam, product, Constellation};
use crate::curve::{db_to_linear, snr_grid, EmiCurve};
use crate::emi_analytic::{
    asymptotic_csit_with, asymptotic_no_csit_with, QuadratureDomain, SstQuadrature,
    DEFAULT_LAGUERRE_ORDER,
};
use crate::emi_mst::{
    emi_mst_with, f_lower, f_upper, mmse_bounds_mst, mmse_mst, mst_diversity_report, solve_d_star,
    MstOptions, Precoder, PrecoderScheme, DEFAULT_SEARCH_BUDGET,
};
use crate::error::Result;
use crate::exec::{with_workers, ExecPolicy};
use crate::keyhole_channel::{pdf_s2, sample_realization, ChannelConfig, FOperatorExpansion};
use crate::rng::{stream, Purpose};
use crate::scalar_info::{AwgnChannel, MmseMellinEvaluator};
use crate::simulate::{
    emi_sst_mc_with, fit_diversity, rank_contrast_report, RankContrastWindows, Scheme,
    SimulationPlan,
};
use crate::specfun::integrate_adaptive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Quick,
    Full,
}

impl Scale {
    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Scale::Quick => quick,
            Scale::Full => full,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    pub scale: Scale,
    pub seed: u64,
    pub policy: ExecPolicy,
}

impl ValidationOptions {
    pub fn new(scale: Scale) -> Self {
        Self {
            scale,
            seed: 1,
            policy: ExecPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "criterion {:2} {status} {}: {}",
            self.id, self.name, self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "analytic vs MC, no CSIT"),
    (2, "analytic vs MC, CSIT"),
    (3, "analytic diversity orders"),
    (4, "gap-law constants"),
    (5, "saturation and ordering"),
    (6, "I-MMSE identity"),
    (7, "channel statistics"),
    (8, "MST diversity contrast"),
    (9, "MMSE sandwich"),
    (10, "rank-deficiency contrast"),
    (11, "determinism across workers"),
];

type Check = Result<(bool, String)>;

pub fn run_criterion(id: u8, opts: &ValidationOptions) -> CriterionOutcome {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map_or("unknown", |(_, n)| n)
        .to_string();
    let result = match id {
        1 => analytic_vs_mc(opts, false),
        2 => analytic_vs_mc(opts, true),
        3 => diversity_orders(),
        4 => gap_law(),
        5 => saturation_and_ordering(opts),
        6 => i_mmse(opts),
        7 => channel_statistics(opts),
        8 => mst_diversity(opts),
        9 => sandwich(opts),
        10 => rank_contrast(opts),
        11 => determinism(opts),
        _ => Ok((false, "no such criterion".into())),
    };
    let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionOutcome {
        id,
        name,
        passed,
        detail,
    }
}

pub fn run_all(opts: &ValidationOptions) -> Vec<CriterionOutcome> {
    CRITERIA
        .iter()
        .map(|&(id, _)| run_criterion(id, opts))
        .collect()
}

fn qam4() -> Constellation {
    make_qam(4, None).expect("4-QAM is valid")
}

fn mc_plan(
    scheme: Scheme,
    grid: Vec<f64>,
    realizations: usize,
    seed: u64,
) -> Result<SimulationPlan> {
    SimulationPlan::new(
        qam4(),
        ChannelConfig::reference(),
        scheme,
        grid,
        realizations,
        seed,
    )
}

fn analytic(csit: bool, grid: &[f64], policy: ExecPolicy) -> Result<EmiCurve> {
    let c = qam4();
    let cfg = ChannelConfig::reference();
    let q = if csit {
        SstQuadrature::csit(&c, &cfg, DEFAULT_LAGUERRE_ORDER)?
    } else {
        SstQuadrature::no_csit(&c, &cfg, DEFAULT_LAGUERRE_ORDER)?
    };
    q.curve(&c, grid, QuadratureDomain::Auto, policy)
}

fn analytic_vs_mc(opts: &ValidationOptions, csit: bool) -> Check {
    let grid = snr_grid(-10.0, 30.0, 2.0);
    let an = analytic(csit, &grid, opts.policy)?;
    let scheme = if csit {
        Scheme::SstCsit
    } else {
        Scheme::SstNoCsit
    };
    let realizations = opts.scale.pick(20_000, 100_000);
    let mc = emi_sst_mc_with(
        &mc_plan(scheme, grid.clone(), realizations, opts.seed)?,
        opts.policy,
    )?;
    let mut worst = (f64::NEG_INFINITY, 0.0, 0.0, 0.0);
    for (i, &db) in grid.iter().enumerate() {
        let dev = (an.emi_bits[i] - mc.emi_bits[i]).abs();
        let tol = 0.02f64.max(3.0 * mc.stderr_at(i));
        if dev / tol > worst.0 {
            worst = (dev / tol, dev, tol, db);
        }
    }
    let passed = worst.0 <= 1.0;
    Ok((
        passed,
        format!(
            "{realizations} realizations, worst |Δ| = {:.2e} vs tolerance {:.2e} at {} dB",
            worst.1, worst.2, worst.3
        ),
    ))
}

fn diversity_orders() -> Check {
    let nc = analytic(false, &snr_grid(25.0, 40.0, 1.0), ExecPolicy::default())?;
    let cs = analytic(true, &snr_grid(18.0, 26.0, 1.0), ExecPolicy::default())?;
    let f_nc = fit_diversity(&nc, nc.entropy(), (25.0, 40.0))?;
    let f_cs = fit_diversity(&cs, cs.entropy(), (18.0, 26.0))?;
    let passed = (f_nc.slope + 1.0).abs() <= 0.1 && (f_cs.slope + 4.0).abs() <= 0.3;
    Ok((
        passed,
        format!(
            "no-CSIT slope {:.4} (target −1 ± 0.1), CSIT slope {:.4} (target −4 ± 0.3)",
            f_nc.slope, f_cs.slope
        ),
    ))
}

/// Deepest 1 dB grid point up to 60 dB whose gap exceeds 1e-9 bits.
fn deepest_resolvable(q: &SstQuadrature) -> Result<(f64, f64)> {
    let mut last = None;
    for db in 0..=60 {
        let snr = db_to_linear(db as f64);
        let g = q.gap(snr, QuadratureDomain::Auto)?;
        if g > 1e-9 {
            last = Some((db as f64, g));
        }
    }
    Ok(last.unwrap_or((0.0, f64::NAN)))
}

fn gap_law() -> Check {
    let c = qam4();
    let cfg = ChannelConfig::reference();
    let ev = MmseMellinEvaluator::new(&c)?;
    let mut parts = Vec::new();
    let mut passed = true;
    for csit in [false, true] {
        let (q, law) = if csit {
            (
                SstQuadrature::csit(&c, &cfg, DEFAULT_LAGUERRE_ORDER)?,
                asymptotic_csit_with(&ev, &cfg)?,
            )
        } else {
            (
                SstQuadrature::no_csit(&c, &cfg, DEFAULT_LAGUERRE_ORDER)?,
                asymptotic_no_csit_with(&ev, &cfg)?,
            )
        };
        let (db, gap) = deepest_resolvable(&q)?;
        let ratio = gap / law.gap(db_to_linear(db));
        passed &= (0.9..=1.1).contains(&ratio);
        parts.push(format!(
            "{}: ratio {ratio:.4} at {db} dB (G_a = {:.5}, G_d = {})",
            if csit { "CSIT" } else { "no-CSIT" },
            law.array_gain,
            law.diversity_order
        ));
    }
    Ok((passed, parts.join("; ")))
}

fn saturation_and_ordering(opts: &ValidationOptions) -> Check {
    let grid = snr_grid(-10.0, 40.0, 2.0);
    let nc = analytic(false, &grid, opts.policy)?;
    let cs = analytic(true, &grid, opts.policy)?;
    let h = nc.entropy();
    let realizations = opts.scale.pick(20_000, 100_000);
    let mc_grid = snr_grid(-10.0, 30.0, 2.0);
    let mc_nc = emi_sst_mc_with(
        &mc_plan(Scheme::SstNoCsit, mc_grid.clone(), realizations, opts.seed)?,
        opts.policy,
    )?;
    let mc_cs = emi_sst_mc_with(
        &mc_plan(Scheme::SstCsit, mc_grid.clone(), realizations, opts.seed)?,
        opts.policy,
    )?;

    let bounded = [&nc, &cs, &mc_nc, &mc_cs]
        .iter()
        .all(|c| c.emi_bits.iter().all(|&e| e <= h));
    let sat_gap = h - cs.emi_bits[grid.len() - 1];
    let saturates = sat_gap < 1e-3;

    let mut gauss_ok = true;
    for (g, f) in [
        (Scheme::GaussianSstNoCsit, Scheme::SstNoCsit),
        (Scheme::GaussianSstCsit, Scheme::SstCsit),
    ] {
        let gc = emi_sst_mc_with(
            &mc_plan(g, vec![30.0], realizations, opts.seed)?,
            opts.policy,
        )?;
        let fc = emi_sst_mc_with(
            &mc_plan(f, vec![30.0], realizations, opts.seed)?,
            opts.policy,
        )?;
        gauss_ok &= gc.emi_bits[0] > fc.emi_bits[0];
    }

    let analytic_order = (0..grid.len()).all(|i| cs.emi_bits[i] >= nc.emi_bits[i] - 1e-9);
    let mc_order = (0..mc_grid.len()).all(|i| {
        let se = (mc_cs.stderr_at(i).powi(2) + mc_nc.stderr_at(i).powi(2)).sqrt();
        mc_cs.emi_bits[i] - mc_nc.emi_bits[i] >= -3.0 * se
    });

    // MST against SST with matching transmitter knowledge at 10 dB
    let pc = product(&qam4(), 2)?;
    let cfg = ChannelConfig::reference();
    let mst_opts = MstOptions {
        search_budget: DEFAULT_SEARCH_BUDGET,
        policy: opts.policy,
    };
    let sst10 =
        |csit: bool| -> Result<f64> { Ok(analytic(csit, &[10.0], opts.policy)?.emi_bits[0]) };
    let mst_r = opts.scale.pick(2_000, 10_000);
    let mut mst_ok = true;
    let mut mst_detail = Vec::new();
    for (scheme, csit) in [
        (PrecoderScheme::Uniform, false),
        (PrecoderScheme::Mrt, true),
        (PrecoderScheme::MaxDmin, true),
    ] {
        let m = emi_mst_with(&pc, &cfg, scheme, &[10.0], mst_r, 1000, opts.seed, mst_opts)?;
        let s = sst10(csit)?;
        mst_ok &= m.emi_bits[0] - 3.0 * m.stderr_at(0) > s;
        mst_detail.push(format!(
            "{} {:.3} vs {:.3}",
            scheme.as_str(),
            m.emi_bits[0],
            s
        ));
    }
    let passed = bounded && saturates && gauss_ok && analytic_order && mc_order && mst_ok;
    Ok((
        passed,
        format!(
            "bounded {bounded}, CSIT gap at 40 dB {sat_gap:.2e}, gaussian > 4-QAM {gauss_ok}, CSIT >= no-CSIT analytic {analytic_order} MC {mc_order}, MST > SST at 10 dB {mst_ok} ({})",
            mst_detail.join(", ")
        ),
    ))
}

/// A random alphabet of 3 to 8 points with random probabilities.
fn random_constellation<R: Rng>(rng: &mut R, k: usize) -> Result<Constellation> {
    let m = rng.random_range(3..=8);
    let points: Vec<Complex64> = (0..m)
        .map(|_| {
            Complex64::new(
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            )
        })
        .collect();
    let raw: Vec<f64> = (0..m).map(|_| 0.2 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    Constellation::new(
        points,
        Some(raw.iter().map(|p| p / total).collect()),
        format!("random-{k}"),
    )
}

fn i_mmse(opts: &ValidationOptions) -> Check {
    let mut rng = stream(opts.seed, Purpose::Misc, 6);
    let mut worst = (0.0f64, String::new());
    let mut passed = true;
    for k in 0..20 {
        let c = match k % 4 {
            0 => make_qam([4, 16, 64][k / 4 % 3], None)?,
            1 => {
                let p: Vec<f64> = (0..4).map(|_| 0.5 + rng.random::<f64>()).collect();
                let s: f64 = p.iter().sum();
                make_qam(4, Some(p.iter().map(|x| x / s).collect()))?
            }
            _ => random_constellation(&mut rng, k)?,
        };
        let ch = AwgnChannel::new(&c);
        let snr = db_to_linear(rng.random::<f64>() * 30.0 - 10.0);
        let h = 1e-3 * snr;
        let fd = (ch.mi(snr + h) - ch.mi(snr - h)) / (2.0 * h) * std::f64::consts::LN_2;
        let direct = ch.mmse(snr);
        let err = (fd - direct).abs();
        let tol = 1e-5f64.max(1e-3 * direct.abs());
        passed &= err <= tol;
        if err / tol > worst.0 {
            worst = (err / tol, format!("{} at γ = {snr:.3}", c.label()));
        }
    }
    Ok((
        passed,
        format!(
            "20 pairs, worst error/tolerance {:.3} ({})",
            worst.0, worst.1
        ),
    ))
}

/// Tabulated CDF on a geometric grid, linear in between.
struct CdfTable {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl CdfTable {
    fn new(pdf: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Self {
        let ratio = (hi / lo).powf(1.0 / n as f64);
        let mut xs = vec![0.0];
        let mut fs = vec![0.0];
        let mut acc = integrate_adaptive(&pdf, 0.0, lo, &[], 1e-10, 1e-15);
        let mut x = lo;
        xs.push(lo);
        fs.push(acc);
        for _ in 0..n {
            let next = x * ratio;
            acc += integrate_adaptive(&pdf, x, next, &[], 1e-10, 1e-15);
            xs.push(next);
            fs.push(acc);
            x = next;
        }
        Self { xs, fs }
    }

    fn at(&self, x: f64) -> f64 {
        match self.xs.partition_point(|&v| v <= x) {
            0 => 0.0,
            i if i == self.xs.len() => *self.fs.last().unwrap(),
            i => {
                let (x0, x1) = (self.xs[i - 1], self.xs[i]);
                let t = (x - x0) / (x1 - x0);
                self.fs[i - 1] + t * (self.fs[i] - self.fs[i - 1])
            }
        }
    }

    fn ks(&self, samples: &mut [f64]) -> f64 {
        samples.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        samples
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = self.at(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }
}

fn channel_statistics(opts: &ValidationOptions) -> Check {
    let cfg = ChannelConfig::reference();
    let exp = FOperatorExpansion::new(&cfg)?;
    let breaks: Vec<f64> = (-6..=3).map(|k| 10f64.powi(k)).collect();
    let pb = |x: f64| exp.pdf_b(x).unwrap_or(f64::NAN);
    let ps1 = |x: f64| {
        if x > 0.0 {
            exp.pdf_s1(x).unwrap_or(f64::NAN)
        } else {
            0.0
        }
    };
    let ps2 = |x: f64| {
        if x > 0.0 {
            pdf_s2(&cfg, x).unwrap_or(f64::NAN)
        } else {
            0.0
        }
    };
    let ib = integrate_adaptive(pb, 0.0, 2000.0, &breaks, 1e-12, 0.0);
    let is1 = integrate_adaptive(ps1, 0.0, 2000.0, &breaks, 1e-12, 0.0);
    let is2 = integrate_adaptive(ps2, 0.0, 2000.0, &breaks, 1e-12, 0.0);
    let norm_ok =
        (ib - 1.0).abs() <= 1e-6 && (is1 - 1.0).abs() <= 1e-6 && (is2 - 1.0).abs() <= 1e-8;

    let n = opts.scale.pick(200_000, 1_000_000);
    let draws: Vec<_> = crate::exec::map_indexed(opts.policy, n, |i| {
        let h = sample_realization(&cfg, opts.seed, i as u64);
        (h.b(), h.s1(), h.s2())
    });
    let mut b: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let mut s1: Vec<f64> = draws.iter().map(|d| d.1).collect();
    let mut s2: Vec<f64> = draws.iter().map(|d| d.2).collect();
    let ks_b = CdfTable::new(pb, 1e-8, 200.0, 4000).ks(&mut b);
    let ks_s1 = CdfTable::new(ps1, 1e-8, 500.0, 4000).ks(&mut s1);
    let ks_s2 = CdfTable::new(ps2, 1e-8, 500.0, 4000).ks(&mut s2);
    let ks_ok = ks_b < 0.005 && ks_s1 < 0.005 && ks_s2 < 0.005;
    Ok((
        norm_ok && ks_ok,
        format!(
            "integrals B {:.2e}, S1 {:.2e}, S2 {:.2e} off 1; KS over {n} samples B {ks_b:.4}, S1 {ks_s1:.4}, S2 {ks_s2:.4}",
            ib - 1.0,
            is1 - 1.0,
            is2 - 1.0
        ),
    ))
}

/// Fit windows (dB) used by criterion 8.
pub const MST_WINDOWS: [(PrecoderScheme, (f64, f64)); 3] = [
    (PrecoderScheme::Uniform, (18.0, 30.0)),
    (PrecoderScheme::Mrt, (14.0, 26.0)),
    (PrecoderScheme::MaxDmin, (12.0, 21.0)),
];

fn mst_diversity(opts: &ValidationOptions) -> Check {
    let pc = product(&qam4(), 2)?;
    let cfg = ChannelConfig::reference();
    let realizations = opts.scale.pick(6_000, 10_000);
    let mst_opts = MstOptions {
        search_budget: DEFAULT_SEARCH_BUDGET,
        policy: opts.policy,
    };
    let mut passed = true;
    let mut parts = Vec::new();
    for (scheme, window) in MST_WINDOWS {
        let r = mst_diversity_report(
            &pc,
            &cfg,
            scheme,
            window,
            3.0,
            realizations,
            1000,
            opts.seed,
            mst_opts,
        )?;
        let ok = match scheme {
            PrecoderScheme::MaxDmin => r.fit.slope <= -2.0,
            _ => (r.fit.slope + 1.0).abs() <= 0.25,
        };
        passed &= ok;
        parts.push(format!(
            "{} {:.3} over {:?} dB",
            scheme.as_str(),
            r.fit.slope,
            window
        ));
    }
    Ok((
        passed,
        format!(
            "{realizations} channels x 1000 noise samples: {}",
            parts.join(", ")
        ),
    ))
}

fn sandwich(opts: &ValidationOptions) -> Check {
    let pc = product(&qam4(), 2)?;
    let cfg = ChannelConfig::reference();
    let d = solve_d_star(&pc, DEFAULT_SEARCH_BUDGET, opts.seed)?;
    let mut rng = stream(opts.seed, Purpose::Misc, 9);
    let noise = opts.scale.pick(4_000, 10_000);
    let schemes = [
        PrecoderScheme::Uniform,
        PrecoderScheme::Mrt,
        PrecoderScheme::MaxDmin,
    ];
    let mut inside = 0;
    for i in 0..50u64 {
        let h = sample_realization(&cfg, opts.seed ^ 0x5a5a, i);
        let p = Precoder::for_scheme(schemes[i as usize % 3], &h, Some(&d))?;
        let snr = db_to_linear(rng.random::<f64>() * 20.0 - 10.0);
        let (lo, hi) = mmse_bounds_mst(&pc, &h, &p, snr);
        let m = mmse_mst(&pc, &h, &p, snr, noise, opts.seed.wrapping_add(i))?;
        if lo <= hi && m.value >= lo - 3.0 * m.stderr && m.value <= hi + 3.0 * m.stderr {
            inside += 1;
        }
    }
    let origin = f_lower(0.0) == 1.0 && f_upper(0.0) == 0.5;
    Ok((
        inside == 50 && origin,
        format!("{inside}/50 draws inside [lower − 3σ, upper + 3σ] (SNR log-uniform on [−10, 10] dB); f_l(0) = 1 and f_u(0) = ½: {origin}"),
    ))
}

fn rank_contrast(opts: &ValidationOptions) -> Check {
    let grid = snr_grid(14.0, 36.0, 2.0);
    let windows = RankContrastWindows::default();
    let r = rank_contrast_report(
        &qam4(),
        2,
        2,
        &grid,
        opts.seed,
        10_000_000,
        windows,
        opts.policy,
    )?;
    let slope = |c: &crate::simulate::RankContrastCase| c.fit.map(|f| f.slope);
    let kc = slope(&r.keyhole_csit);
    let fr = slope(&r.full_rank_no_csit);
    let kn = slope(&r.keyhole_no_csit);
    let within =
        |s: Option<f64>, target: f64, tol: f64| s.is_some_and(|s| (s - target).abs() <= tol);
    let passed = within(kc, -2.0, 0.3) && within(fr, -2.0, 0.3) && within(kn, -1.0, 0.2);
    let show = |s: Option<f64>| s.map_or("unresolvable".to_string(), |s| format!("{s:.3}"));
    Ok((
        passed,
        format!(
            "10^7 realizations: keyhole CSIT {} over {:?}, full-rank no-CSIT {} over {:?}, keyhole no-CSIT {} over {:?}",
            show(kc),
            windows.keyhole_csit,
            show(fr),
            windows.full_rank_no_csit,
            show(kn),
            windows.keyhole_no_csit
        ),
    ))
}

fn determinism(opts: &ValidationOptions) -> Check {
    let run = |workers: usize| -> Result<Vec<String>> {
        with_workers(Some(workers), || -> Result<Vec<String>> {
            let policy = ExecPolicy::default();
            let grid = snr_grid(-10.0, 30.0, 5.0);
            let mut out = Vec::new();
            for scheme in [Scheme::SstNoCsit, Scheme::SstCsit] {
                let c =
                    emi_sst_mc_with(&mc_plan(scheme, grid.clone(), 20_000, opts.seed)?, policy)?;
                out.push(serde_json::to_string(&c).expect("curves serialize"));
            }
            out.push(
                serde_json::to_string(&analytic(false, &grid, policy)?).expect("curves serialize"),
            );
            let pc = product(&qam4(), 2)?;
            let m = emi_mst_with(
                &pc,
                &ChannelConfig::reference(),
                PrecoderScheme::MaxDmin,
                &grid,
                200,
                1000,
                opts.seed,
                MstOptions {
                    search_budget: DEFAULT_SEARCH_BUDGET,
                    policy,
                },
            )?;
            out.push(serde_json::to_string(&m).expect("curves serialize"));
            Ok(out)
        })?
    };
    let one = run(1)?;
    let four = run(4)?;
    let sequential = with_workers(None, || -> Result<String> {
        let c = emi_sst_mc_with(
            &mc_plan(
                Scheme::SstCsit,
                snr_grid(-10.0, 30.0, 5.0),
                20_000,
                opts.seed,
            )?,
            ExecPolicy::Sequential,
        )?;
        Ok(serde_json::to_string(&c).expect("curves serialize"))
    })??;
    let passed = one == four && one[1] == sequential;
    Ok((
        passed,
        format!(
            "{} outputs compared across 1 and 4 workers and the sequential path",
            one.len()
        ),
    ))
}
