//! Multi-stream transmission over the keyhole channel: Monte Carlo MI over
//! the noise, the three precoders, minimum-distance search, and the MMSE
//! sandwich bounds.
//!
//! For `H = h_r h_t^H` every received difference `H P b` is parallel to
//! `h_r`, so only the noise component along `h_r` matters. Each realization
//! therefore reduces to a scalar model `y = √γ̄ u_g + n`, `n ~ CN(0, 1)`, with
//! `u_g = ‖h_r‖ h_t^H P x_g`, and the MI is estimated through the gap
//! `H − I = Σ_g p_g E log₂(1 + Σ_{g'≠g} (p_{g'}/p_g) e^{|n|² − |n + √γ̄(u_g − u_{g'})|²})`,
//! whose per-sample variance vanishes at high SNR.

use std::collections::HashMap;
use std::f64::consts::LN_2;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::constellation::ProductConstellation;
use crate::curve::{db_to_linear, CurveMeta, EmiCurve, Method};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, ExecPolicy};
use crate::keyhole_channel::{sample_realization, ChannelConfig, KeyholeRealization};
use crate::rng::{stream, Purpose};
use crate::simulate::{least_squares, validate_grid, DiversityFit};
use crate::specfun::{integrate_adaptive, q_function};
use crate::stats::{mean_stderr, mean_stderr_by, CompensatedSum};

pub const MIN_NOISE_SAMPLES: usize = 1000;
pub const MIN_SEARCH_BUDGET: usize = 10_000;
pub const DEFAULT_SEARCH_BUDGET: usize = 20_000;
pub const MAX_SEARCH_STREAMS: usize = 4;
// Pair terms below e^{-SKIP_EXPONENT} relative to the self term are dropped.
const SKIP_EXPONENT: f64 = 42.0;
// Objective evaluations per search start.
const EVALS_PER_START: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecoderScheme {
    Uniform,
    Mrt,
    MaxDmin,
}

impl PrecoderScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            PrecoderScheme::Uniform => "uniform",
            PrecoderScheme::Mrt => "mrt",
            PrecoderScheme::MaxDmin => "max-dmin",
        }
    }

    /// Stream count the scheme implies, `None` when free.
    pub fn required_streams(self, cfg: &ChannelConfig) -> Option<usize> {
        match self {
            PrecoderScheme::Uniform => Some(cfg.n_t),
            PrecoderScheme::Mrt => Some(cfg.n_r),
            PrecoderScheme::MaxDmin => None,
        }
    }
}

/// `N_t × N` precoder with `tr(P P^H) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub scheme: PrecoderScheme,
    pub matrix: DMatrix<Complex64>,
}

impl Precoder {
    /// `I_{N_t}/√N_t`.
    pub fn uniform(n_t: usize) -> Self {
        let s = Complex64::from((n_t as f64).sqrt().recip());
        Self {
            scheme: PrecoderScheme::Uniform,
            matrix: DMatrix::from_diagonal_element(n_t, n_t, s),
        }
    }

    /// `H^H / √tr(H^H H)`; the zero channel gets the zero matrix.
    pub fn mrt(h: &KeyholeRealization) -> Self {
        let hm = h.matrix();
        let norm = hm.norm();
        let matrix = if norm > 0.0 {
            hm.adjoint().unscale(norm)
        } else {
            DMatrix::zeros(hm.ncols(), hm.nrows())
        };
        Self {
            scheme: PrecoderScheme::Mrt,
            matrix,
        }
    }

    /// Rank one `h_t d*^H / ‖h_t‖`.
    pub fn max_dmin(h: &KeyholeRealization, d_star: &DStarSolution) -> Self {
        let nt = h.h_t.len();
        let norm = h.norm_t2().sqrt();
        let matrix = DMatrix::from_fn(nt, d_star.vector.len(), |i, j| {
            if norm > 0.0 {
                h.h_t[i] * d_star.vector[j].conj() / norm
            } else {
                Complex64::from(0.0)
            }
        });
        Self {
            scheme: PrecoderScheme::MaxDmin,
            matrix,
        }
    }

    pub fn for_scheme(
        scheme: PrecoderScheme,
        h: &KeyholeRealization,
        d_star: Option<&DStarSolution>,
    ) -> Result<Self> {
        match scheme {
            PrecoderScheme::Uniform => Ok(Self::uniform(h.h_t.len())),
            PrecoderScheme::Mrt => Ok(Self::mrt(h)),
            PrecoderScheme::MaxDmin => d_star.map(|d| Self::max_dmin(h, d)).ok_or_else(|| {
                Error::InvalidParameter("max-dmin precoder needs a d_star solution".into())
            }),
        }
    }

    pub fn stream_count(&self) -> usize {
        self.matrix.ncols()
    }

    /// `tr(P P^H)`.
    pub fn power(&self) -> f64 {
        self.matrix.norm_squared()
    }

    fn check(&self, h: &KeyholeRealization, pc: &ProductConstellation) -> Result<()> {
        if self.matrix.nrows() != h.h_t.len() || self.stream_count() != pc.streams() {
            return Err(Error::InvalidParameter(format!(
                "precoder is {}x{}, channel has N_t = {} and the constellation {} streams",
                self.matrix.nrows(),
                self.stream_count(),
                h.h_t.len(),
                pc.streams()
            )));
        }
        Ok(())
    }
}

/// Scalar image `u_g = ‖h_r‖ h_t^H P x_g` of every product point.
fn reduced_points(
    pc: &ProductConstellation,
    h: &KeyholeRealization,
    p: &Precoder,
) -> Vec<Complex64> {
    let nr = h.norm_r2().sqrt();
    // row vector h_t^H P
    let w: Vec<Complex64> = (0..p.stream_count())
        .map(|j| {
            (0..h.h_t.len())
                .map(|i| h.h_t[i].conj() * p.matrix[(i, j)])
                .sum::<Complex64>()
                * nr
        })
        .collect();
    (0..pc.len())
        .map(|g| pc.point(g).iter().zip(&w).map(|(x, w)| w * x).sum())
        .collect()
}

struct PairTerm {
    delta: Complex64,
    abs: f64,
    ln_ratio: f64,
}

/// Scalar reduced model with per-point difference lists sorted by `|Δ|`.
struct ReducedModel {
    probs: Vec<f64>,
    pairs: Vec<Vec<PairTerm>>,
    max_ln_ratio: f64,
    entropy: f64,
}

impl ReducedModel {
    fn new(pc: &ProductConstellation, u: &[Complex64]) -> Self {
        let probs = pc.probs().to_vec();
        let mut max_ln_ratio: f64 = 0.0;
        let pairs = (0..u.len())
            .map(|g| {
                let mut v: Vec<PairTerm> = (0..u.len())
                    .filter(|&k| k != g)
                    .map(|k| {
                        let delta = u[g] - u[k];
                        let ln_ratio = (probs[k] / probs[g]).ln();
                        max_ln_ratio = max_ln_ratio.max(ln_ratio);
                        PairTerm {
                            delta,
                            abs: delta.norm(),
                            ln_ratio,
                        }
                    })
                    .collect();
                v.sort_by(|a, b| a.abs.total_cmp(&b.abs));
                v
            })
            .collect();
        Self {
            probs,
            pairs,
            max_ln_ratio,
            entropy: pc.entropy(),
        }
    }

    /// Visits `(term, e^{e_{g,g'}})` for the non-negligible pairs of point `g`.
    #[inline]
    fn for_terms(&self, g: usize, sg: f64, n: Complex64, mut f: impl FnMut(&PairTerm, f64)) {
        let nn = n.norm();
        for t in &self.pairs[g] {
            let a = sg * t.abs;
            // e ≤ ln_ratio − a(a − 2|n|), increasing in a once a > |n|
            if a > nn && a * (a - 2.0 * nn) > SKIP_EXPONENT + self.max_ln_ratio {
                break;
            }
            let e = t.ln_ratio - a * a - 2.0 * sg * (n.conj() * t.delta).re;
            f(t, e.exp());
        }
    }

    /// `Σ_g p_g log₂(1 + Σ_{g'≠g} e^{e_{g,g'}})` for one noise draw.
    fn gap_sample(&self, sg: f64, n: Complex64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (g, &pg) in self.probs.iter().enumerate() {
            let mut s = 0.0;
            self.for_terms(g, sg, n, |_, w| s += w);
            acc.add(pg * s.ln_1p());
        }
        acc.value() / LN_2
    }

    /// `Σ_g p_g |u_g − E[u | y]|²` for one noise draw.
    fn mmse_sample(&self, sg: f64, n: Complex64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (g, &pg) in self.probs.iter().enumerate() {
            let mut s = 0.0;
            let mut d = Complex64::from(0.0);
            self.for_terms(g, sg, n, |t, w| {
                s += w;
                d += t.delta * w;
            });
            acc.add(pg * (d / (1.0 + s)).norm_sqr());
        }
        acc.value()
    }
}

fn noise_draws(seed: u64, index: u64, count: usize) -> Vec<Complex64> {
    let mut rng = stream(seed, Purpose::Noise, index);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..count)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * s, im * s)
        })
        .collect()
}

fn check_noise_samples(noise_samples: usize) -> Result<()> {
    if noise_samples < MIN_NOISE_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "noise_samples = {noise_samples} must be >= {MIN_NOISE_SAMPLES}"
        )));
    }
    Ok(())
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Conditional MI `I(γ̄; HP)` in bits for one realization, noise drawn from `(seed, 0)`.
pub fn mi_mst(
    pc: &ProductConstellation,
    channel: &KeyholeRealization,
    p: &Precoder,
    snr: f64,
    noise_samples: usize,
    seed: u64,
) -> Result<Estimate> {
    check_noise_samples(noise_samples)?;
    p.check(channel, pc)?;
    if !(snr >= 0.0) {
        return Err(Error::InvalidParameter(format!("snr = {snr} must be >= 0")));
    }
    let model = ReducedModel::new(pc, &reduced_points(pc, channel, p));
    let noise = noise_draws(seed, 0, noise_samples);
    let sg = snr.sqrt();
    let (gap, se) = mean_stderr_by(noise.len(), |k| model.gap_sample(sg, noise[k]));
    Ok(Estimate {
        value: (model.entropy - gap).clamp(0.0, model.entropy),
        stderr: se,
    })
}

/// MST MMSE `E‖H P (x − E[x | y])‖²` for one realization, noise drawn from `(seed, 0)`.
pub fn mmse_mst(
    pc: &ProductConstellation,
    channel: &KeyholeRealization,
    p: &Precoder,
    snr: f64,
    noise_samples: usize,
    seed: u64,
) -> Result<Estimate> {
    check_noise_samples(noise_samples)?;
    p.check(channel, pc)?;
    let model = ReducedModel::new(pc, &reduced_points(pc, channel, p));
    let noise = noise_draws(seed, 0, noise_samples);
    let sg = snr.sqrt();
    let (value, stderr) = mean_stderr_by(noise.len(), |k| model.mmse_sample(sg, noise[k]));
    Ok(Estimate { value, stderr })
}

/// `min_{g≠g'} ‖H P b_{g,g'}‖`.
pub fn d_min(pc: &ProductConstellation, channel: &KeyholeRealization, p: &Precoder) -> f64 {
    let hp = channel.matrix() * &p.matrix;
    let nr = channel.norm_r2().sqrt();
    let mut best = f64::INFINITY;
    for b in pc.unordered_diffs() {
        let bv = DMatrix::from_column_slice(b.len(), 1, &b);
        let full = (&hp * &bv).norm();
        let factored = (0..b.len())
            .map(|j| {
                (0..channel.h_t.len())
                    .map(|i| channel.h_t[i].conj() * p.matrix[(i, j)])
                    .sum::<Complex64>()
                    * b[j]
            })
            .sum::<Complex64>()
            .norm()
            * nr;
        debug_assert!((full - factored).abs() <= 1e-9 * full.max(1e-300));
        best = best.min(full);
    }
    best
}

/// Search result for `argmax_{‖x‖=1} min_{g≠g'} |x^H b_{g,g'}|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DStarSolution {
    pub vector: Vec<Complex64>,
    pub achieved_min: f64,
    pub search_budget: usize,
}

fn min_projection(x: &[Complex64], diffs: &[Vec<Complex64>]) -> f64 {
    diffs
        .iter()
        .map(|b| {
            x.iter()
                .zip(b)
                .map(|(x, b)| x.conj() * b)
                .sum::<Complex64>()
                .norm()
        })
        .fold(f64::INFINITY, f64::min)
}

fn normalize(x: &mut [Complex64]) {
    let n = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= n);
}

type DStarKey = (Vec<u64>, usize, usize, u64);

fn d_star_cache() -> &'static Mutex<HashMap<DStarKey, Arc<DStarSolution>>> {
    static CACHE: OnceLock<Mutex<HashMap<DStarKey, Arc<DStarSolution>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Seeded multi-start search with phase/magnitude coordinate refinement.
///
/// Start `s` always draws from substream `s` and gets the same evaluation
/// allowance, so a larger budget replays every start of a smaller one and
/// `achieved_min` is monotone in the budget. Start 0 begins at `1/√N`.
pub fn solve_d_star(
    pc: &ProductConstellation,
    budget: usize,
    seed: u64,
) -> Result<Arc<DStarSolution>> {
    if budget < MIN_SEARCH_BUDGET {
        return Err(Error::BudgetTooSmall(budget));
    }
    let n = pc.streams();
    if n > MAX_SEARCH_STREAMS {
        return Err(Error::InvalidParameter(format!(
            "max-dmin search supports N <= {MAX_SEARCH_STREAMS}, got {n}"
        )));
    }
    let base = pc.base();
    let key_bits = base
        .points()
        .iter()
        .flat_map(|p| [p.re.to_bits(), p.im.to_bits()])
        .chain(base.probs().iter().map(|p| p.to_bits()))
        .collect();
    let key = (key_bits, n, budget, seed);
    if let Some(hit) = d_star_cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let diffs = pc.unordered_diffs();
    let mut best_x = vec![Complex64::from(1.0 / (n as f64).sqrt()); n];
    let mut best = min_projection(&best_x, &diffs);
    let mut used = 1;
    let mut start = 0u64;
    while used < budget {
        let allowance = EVALS_PER_START.min(budget - used);
        let mut rng = stream(seed, Purpose::Search, start);
        let mut x: Vec<Complex64> = if start == 0 {
            best_x.clone()
        } else {
            let mut v: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            normalize(&mut v);
            v
        };
        let mut val = min_projection(&x, &diffs);
        let mut evals = 1;
        let mut step = 0.5;
        while evals < allowance && step > 1e-12 {
            let mut improved = false;
            for k in 0..n {
                for mv in 0..5 {
                    if evals >= allowance {
                        break;
                    }
                    let mut y = x.clone();
                    match mv {
                        0 => y[k] *= Complex64::from_polar(1.0, step),
                        1 => y[k] *= Complex64::from_polar(1.0, -step),
                        2 => y[k] *= 1.0 + step,
                        3 => y[k] *= (1.0 - step).max(0.0),
                        _ => {
                            for v in y.iter_mut() {
                                let re: f64 = rng.sample(StandardNormal);
                                let im: f64 = rng.sample(StandardNormal);
                                *v += Complex64::new(re, im) * step * 0.5;
                            }
                        }
                    }
                    if y.iter().all(|v| v.norm_sqr() == 0.0) {
                        continue;
                    }
                    normalize(&mut y);
                    let fy = min_projection(&y, &diffs);
                    evals += 1;
                    if fy > val {
                        x = y;
                        val = fy;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        used += evals;
        if val > best {
            best = val;
            best_x = x;
        }
        start += 1;
    }
    let sol = Arc::new(DStarSolution {
        vector: best_x,
        achieved_min: best,
        search_budget: budget,
    });
    d_star_cache().lock().unwrap().insert(key, sol.clone());
    Ok(sol)
}

/// `f_l(x) = 1 − (1/√π) ∫ tanh(√x a) e^{−(a − √x/2)²} da`, with `f_l(0) = 1`.
pub fn f_lower(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    // a = √x/2 + v; 1 − tanh(w) = 2/(1 + e^{2w}) avoids cancellation.
    // Mass sits at v = 0 and v = −√x with the kink at v = −√x/2.
    let r = x.sqrt();
    let f = |v: f64| {
        let w = r * (r / 2.0 + v);
        2.0 * (-v * v).exp() / (1.0 + (2.0 * w).exp())
    };
    let s = integrate_adaptive(f, -r - 40.0, 40.0, &[-r, -r / 2.0, 0.0], 1e-13, 0.0);
    (s / std::f64::consts::PI.sqrt()).min(1.0)
}

/// `f_u(x) = Q(√(x/2))`.
pub fn f_upper(x: f64) -> f64 {
    q_function((x / 2.0).sqrt())
}

/// Lower and upper MST MMSE bounds with `d_{i,k} = ‖H P b_{i,k}‖²` over ordered pairs.
pub fn mmse_bounds_mst(
    pc: &ProductConstellation,
    channel: &KeyholeRealization,
    p: &Precoder,
    snr: f64,
) -> (f64, f64) {
    let u = reduced_points(pc, channel, p);
    let ml = pc.len() as f64;
    let mut lower = CompensatedSum::new();
    let mut upper = CompensatedSum::new();
    for i in 0..u.len() {
        for k in 0..u.len() {
            if i == k {
                continue;
            }
            let d = (u[i] - u[k]).norm_sqr();
            lower.add(d / (4.0 * ml) * f_lower(snr * d) / (ml - 1.0));
            upper.add(d / ml * f_upper(snr * d));
        }
    }
    (lower.value(), upper.value())
}

/// Options shared by [`emi_mst_with`] and [`mst_diversity_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MstOptions {
    pub search_budget: usize,
    pub policy: ExecPolicy,
}

impl Default for MstOptions {
    fn default() -> Self {
        Self {
            search_budget: DEFAULT_SEARCH_BUDGET,
            policy: ExecPolicy::default(),
        }
    }
}

/// Ergodic MST EMI. Realization `i` uses channel and noise substream `i`, so
/// schemes run with the same seed share their random numbers.
#[allow(clippy::too_many_arguments)]
pub fn emi_mst(
    pc: &ProductConstellation,
    cfg: &ChannelConfig,
    scheme: PrecoderScheme,
    snr_db_grid: &[f64],
    channel_realizations: usize,
    noise_samples: usize,
    seed: u64,
) -> Result<EmiCurve> {
    emi_mst_with(
        pc,
        cfg,
        scheme,
        snr_db_grid,
        channel_realizations,
        noise_samples,
        seed,
        MstOptions::default(),
    )
}

#[allow(clippy::too_many_arguments)]
pub fn emi_mst_with(
    pc: &ProductConstellation,
    cfg: &ChannelConfig,
    scheme: PrecoderScheme,
    snr_db_grid: &[f64],
    channel_realizations: usize,
    noise_samples: usize,
    seed: u64,
    opts: MstOptions,
) -> Result<EmiCurve> {
    check_noise_samples(noise_samples)?;
    validate_grid(snr_db_grid)?;
    if channel_realizations < 2 {
        return Err(Error::InvalidParameter(
            "channel_realizations must be >= 2".into(),
        ));
    }
    if let Some(n) = scheme.required_streams(cfg) {
        if pc.streams() != n {
            return Err(Error::InvalidParameter(format!(
                "{} precoding needs {n} streams, got {}",
                scheme.as_str(),
                pc.streams()
            )));
        }
    }
    let d_star = match scheme {
        PrecoderScheme::MaxDmin => Some(solve_d_star(pc, opts.search_budget, seed)?),
        _ => None,
    };
    let sgs: Vec<f64> = snr_db_grid
        .iter()
        .map(|&d| db_to_linear(d).sqrt())
        .collect();
    // per realization: conditional gap at every grid point
    let rows = map_indexed(opts.policy, channel_realizations, |i| -> Result<Vec<f64>> {
        let h = sample_realization(cfg, seed, i as u64);
        let p = Precoder::for_scheme(scheme, &h, d_star.as_deref())?;
        let model = ReducedModel::new(pc, &reduced_points(pc, &h, &p));
        let noise = noise_draws(seed, i as u64, noise_samples);
        Ok(sgs
            .iter()
            .map(|&sg| {
                noise
                    .iter()
                    .map(|&n| model.gap_sample(sg, n))
                    .collect::<CompensatedSum>()
                    .value()
                    / noise.len() as f64
            })
            .collect())
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_>>()?;
    let h = pc.entropy();
    let (emi, se) = (0..snr_db_grid.len())
        .map(|j| {
            let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let (gap, se) = mean_stderr(&col);
            ((h - gap).clamp(0.0, h), se)
        })
        .unzip();
    let mut meta = CurveMeta::new(format!("mst-{}", scheme.as_str()), pc.base().label(), h);
    meta.config = Some(*cfg);
    meta.streams = Some(pc.streams());
    meta.realizations = Some(channel_realizations);
    meta.noise_samples = Some(noise_samples);
    meta.seed = Some(seed);
    Ok(EmiCurve {
        snr_db: snr_db_grid.to_vec(),
        emi_bits: emi,
        method: Method::MonteCarlo,
        stderr_bits: Some(se),
        meta,
    })
}

/// A slope fit together with the curve it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MstDiversityReport {
    pub scheme: PrecoderScheme,
    pub window_db: (f64, f64),
    pub fit: DiversityFit,
    pub curve: EmiCurve,
}

/// Fits the MST gap over `window_db` sampled every `step_db`; every point must
/// have stderr at most half its gap.
#[allow(clippy::too_many_arguments)]
pub fn mst_diversity_report(
    pc: &ProductConstellation,
    cfg: &ChannelConfig,
    scheme: PrecoderScheme,
    window_db: (f64, f64),
    step_db: f64,
    channel_realizations: usize,
    noise_samples: usize,
    seed: u64,
    opts: MstOptions,
) -> Result<MstDiversityReport> {
    let grid = crate::curve::snr_grid(window_db.0, window_db.1, step_db);
    if grid.len() < crate::simulate::MIN_FIT_POINTS {
        return Err(Error::DegenerateWindow(format!(
            "{} grid points in [{}, {}] dB",
            grid.len(),
            window_db.0,
            window_db.1
        )));
    }
    let curve = emi_mst_with(
        pc,
        cfg,
        scheme,
        &grid,
        channel_realizations,
        noise_samples,
        seed,
        opts,
    )?;
    let h = curve.entropy();
    let mut xs = Vec::with_capacity(grid.len());
    let mut ys = Vec::with_capacity(grid.len());
    for (i, &db) in grid.iter().enumerate() {
        let gap = h - curve.emi_bits[i];
        let se = curve.stderr_at(i);
        if !(gap > 0.0) || se > 0.5 * gap {
            return Err(Error::WindowUnresolvable(format!(
                "stderr {se:.3e} exceeds half the gap {gap:.3e} at {db} dB"
            )));
        }
        xs.push(db / 10.0);
        ys.push(gap.log10());
    }
    Ok(MstDiversityReport {
        scheme,
        window_db,
        fit: least_squares(&xs, &ys),
        curve,
    })
}
