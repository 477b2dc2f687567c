//! Single-stream EMI by Gauss–Laguerre quadrature, and its high-SNR law
//! `H − (G_a γ̄)^{−G_d}`.
//!
//! Two quadrature routes are available:
//!
//! * channel domain: the double Laguerre sum over the two channel gains,
//!   `Σ_h c_h Σ_k Σ_l w_k w_l t_k^{N_r m_r−1} t_l^h / Γ(N_r m_r) · I(γ̄ a t_k t_l)`;
//! * SNR domain: a single Laguerre sum over the scaled scalar SNR
//!   `s = κ γ̄ x / N_t`, with `κ = d_min²/4` matching the decay of the gap,
//!   `H − EMI = Σ_i w_i e^{s_i} (H − I)(s_i/κ) f_S(N_t s_i/(κγ̄)) N_t/(κγ̄)`.
//!
//! The first resolves the low-SNR regime where `f_S` is spread over many
//! Laguerre nodes; the second resolves the high-SNR tail where only
//! `x ≲ 1/γ̄` matters. `Auto` switches on `κ γ̄ E[S]/N_t`.

use std::f64::consts::LOG2_E;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constellation::Constellation;
use crate::curve::{db_to_linear, CurveMeta, EmiCurve, Method};
use crate::error::{Error, Result};
use crate::exec::{try_map_indexed, ExecPolicy};
use crate::keyhole_channel::{ln_pdf_s2, ChannelConfig, FOperatorExpansion};
use crate::scalar_info::{AwgnChannel, MmseMellinEvaluator};
use crate::specfun::{gauss_laguerre, ln_gamma, QuadratureRule};

pub use crate::simulate::{rank_contrast_report, RankContrastReport, RankContrastWindows};

pub const DEFAULT_LAGUERRE_ORDER: usize = 200;
pub const MIN_LAGUERRE_ORDER: usize = 8;

/// `Auto` uses the SNR-domain route once `κ γ̄ E[S]/N_t` reaches this value.
pub const AUTO_CROSSOVER: f64 = 4.0;

// Channel-domain terms with ln|weight| below this are dropped.
const LN_WEIGHT_FLOOR: f64 = -745.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureDomain {
    Channel,
    Snr,
    #[default]
    Auto,
}

/// High-SNR law `EMI ≃ H − (G_a γ̄)^{−G_d}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCharacterization {
    pub entropy: f64,
    pub array_gain: f64,
    pub diversity_order: f64,
    pub validity_note: String,
}

impl AsymptoticCharacterization {
    /// Predicted `H − EMI` at linear SNR `snr`.
    pub fn gap(&self, snr: f64) -> f64 {
        (self.array_gain * snr).powf(-self.diversity_order)
    }

    /// Predicted EMI at linear SNR `snr`.
    pub fn emi(&self, snr: f64) -> f64 {
        self.entropy - self.gap(snr)
    }

    pub fn curve(&self, label: &str, snr_db: &[f64]) -> EmiCurve {
        EmiCurve {
            snr_db: snr_db.to_vec(),
            emi_bits: snr_db.iter().map(|&d| self.emi(db_to_linear(d))).collect(),
            method: Method::Asymptotic,
            stderr_bits: None,
            meta: CurveMeta::new("asymptotic", label, self.entropy),
        }
    }
}

/// Which single-stream gain is averaged.
#[derive(Debug, Clone)]
enum Gain {
    /// `S1/N_t` with its F-operator expansion.
    Uniform(FOperatorExpansion),
    /// `S2`.
    Mrt,
}

/// Prepared single-stream EMI evaluator for one constellation and channel.
#[derive(Debug, Clone)]
pub struct SstQuadrature {
    channel: Arc<AwgnChannel>,
    config: ChannelConfig,
    gain: Gain,
    rule: QuadratureRule,
    kappa: f64,
    // channel domain: (weight, gain factor a) with EMI = Σ weight · I(γ̄ a)
    terms: Vec<(f64, f64)>,
    // SNR domain: w_i e^{s_i} (H − I)(s_i/κ)
    snr_terms: Vec<(f64, f64)>,
    mean_gain: f64,
}

impl SstQuadrature {
    /// Uniform beamforming (no CSIT). Requires integer `m_t`.
    pub fn no_csit(c: &Constellation, cfg: &ChannelConfig, order: usize) -> Result<Self> {
        let exp = FOperatorExpansion::new(cfg)?;
        Self::build(c, cfg, Gain::Uniform(exp), order)
    }

    /// MRT beamforming (CSIT). Any `m_t, m_r ≥ ½`.
    pub fn csit(c: &Constellation, cfg: &ChannelConfig, order: usize) -> Result<Self> {
        Self::build(c, cfg, Gain::Mrt, order)
    }

    fn build(c: &Constellation, cfg: &ChannelConfig, gain: Gain, order: usize) -> Result<Self> {
        if order < MIN_LAGUERRE_ORDER {
            return Err(Error::QuadratureTooSmall(order));
        }
        let rule = gauss_laguerre(order)?;
        let channel = AwgnChannel::shared(c);
        channel.warm();
        let d = c.min_distance();
        let kappa = 0.25 * d * d;
        let nm_r = cfg.rx_order();
        let ln_t: Vec<f64> = rule.nodes.iter().map(|t| t.ln()).collect();
        // outer kernel over A = t_k/m_r: t_k^{N_r m_r − 1}/Γ(N_r m_r)
        let outer: Vec<f64> = rule
            .log_weights
            .iter()
            .zip(&ln_t)
            .map(|(lw, lt)| lw + (nm_r - 1.0) * lt - ln_gamma(nm_r))
            .collect();
        let mut terms = Vec::new();
        let mean_gain = match &gain {
            Gain::Uniform(exp) => {
                let four_u = 4.0 * exp.u();
                for (h, &ch) in exp.coefficients().iter().enumerate() {
                    if ch == 0.0 {
                        continue;
                    }
                    for (k, &ok) in outer.iter().enumerate() {
                        for (l, &lwl) in rule.log_weights.iter().enumerate() {
                            let lw = ch.abs().ln() + ok + lwl + h as f64 * ln_t[l];
                            if lw < LN_WEIGHT_FLOOR {
                                continue;
                            }
                            let a =
                                four_u * rule.nodes[k] * rule.nodes[l] / (cfg.m_r * cfg.n_t as f64);
                            terms.push((ch.signum() * lw.exp(), a));
                        }
                    }
                }
                cfg.n_r as f64
            }
            Gain::Mrt => {
                let nm_t = cfg.tx_order();
                for (k, &ok) in outer.iter().enumerate() {
                    for (l, &lwl) in rule.log_weights.iter().enumerate() {
                        let lw = ok + lwl + (nm_t - 1.0) * ln_t[l] - ln_gamma(nm_t);
                        if lw < LN_WEIGHT_FLOOR {
                            continue;
                        }
                        let a = rule.nodes[k] * rule.nodes[l] / (cfg.m_r * cfg.m_t);
                        terms.push((lw.exp(), a));
                    }
                }
                (cfg.n_r * cfg.n_t) as f64
            }
        };
        let snr_terms = rule
            .nodes
            .iter()
            .zip(&rule.log_weights)
            .map(|(&s, &lw)| (s, (lw + s).exp() * channel.gap_interp(s / kappa)))
            .collect();
        Ok(Self {
            channel,
            config: *cfg,
            gain,
            rule,
            kappa,
            terms,
            snr_terms,
            mean_gain,
        })
    }

    pub fn order(&self) -> usize {
        self.rule.order
    }

    pub fn entropy(&self) -> f64 {
        self.channel.entropy()
    }

    /// `κ γ̄ E[S]/N_t` (uniform) or `κ γ̄ E[S2]` (MRT).
    pub fn resolution(&self, snr: f64) -> f64 {
        self.kappa * snr * self.mean_gain
    }

    /// Density of the effective gain `G` with EMI `= E I(γ̄ G)`.
    fn pdf_gain(&self, g: f64) -> Result<f64> {
        match &self.gain {
            Gain::Uniform(exp) => {
                let n_t = self.config.n_t as f64;
                Ok(exp.pdf_s1(n_t * g)? * n_t)
            }
            Gain::Mrt => Ok(ln_pdf_s2(&self.config, g)?.exp()),
        }
    }

    fn emi_channel(&self, snr: f64) -> f64 {
        let mut acc = crate::stats::CompensatedSum::new();
        for &(w, a) in &self.terms {
            acc.add(w * self.channel.mi_interp(snr * a));
        }
        acc.value()
    }

    fn gap_snr(&self, snr: f64) -> Result<f64> {
        let scale = self.kappa * snr;
        let mut acc = crate::stats::CompensatedSum::new();
        for &(s, g) in &self.snr_terms {
            if g == 0.0 {
                continue;
            }
            acc.add(g * self.pdf_gain(s / scale)? / scale);
        }
        Ok(acc.value())
    }

    fn use_snr_domain(&self, snr: f64, domain: QuadratureDomain) -> bool {
        match domain {
            QuadratureDomain::Channel => false,
            QuadratureDomain::Snr => true,
            QuadratureDomain::Auto => self.resolution(snr) >= AUTO_CROSSOVER,
        }
    }

    /// EMI in bits at linear SNR `snr`.
    pub fn emi(&self, snr: f64, domain: QuadratureDomain) -> Result<f64> {
        let h = self.entropy();
        if snr <= 0.0 {
            return Ok(0.0);
        }
        let v = if self.use_snr_domain(snr, domain) {
            h - self.gap_snr(snr)?
        } else {
            self.emi_channel(snr)
        };
        Ok(v.clamp(0.0, h))
    }

    /// `H − EMI` in bits; on the SNR-domain route this keeps full relative
    /// accuracy far below the resolution of `H − emi(..)`.
    pub fn gap(&self, snr: f64, domain: QuadratureDomain) -> Result<f64> {
        let h = self.entropy();
        if snr <= 0.0 {
            return Ok(h);
        }
        let g = if self.use_snr_domain(snr, domain) {
            self.gap_snr(snr)?
        } else {
            h - self.emi_channel(snr)
        };
        Ok(g.clamp(0.0, h))
    }

    pub fn curve(
        &self,
        c: &Constellation,
        snr_db: &[f64],
        domain: QuadratureDomain,
        policy: ExecPolicy,
    ) -> Result<EmiCurve> {
        let emi = try_map_indexed(policy, snr_db.len(), |i| {
            self.emi(db_to_linear(snr_db[i]), domain)
        })?;
        let scheme = match self.gain {
            Gain::Uniform(_) => "sst-no-csit",
            Gain::Mrt => "sst-csit",
        };
        let mut meta = CurveMeta::new(scheme, c.label(), self.entropy());
        meta.config = Some(self.config);
        meta.quadrature_order = Some(self.order());
        Ok(EmiCurve {
            snr_db: snr_db.to_vec(),
            emi_bits: emi,
            method: Method::AnalyticQuadrature,
            stderr_bits: None,
            meta,
        })
    }
}

/// No-CSIT single-stream EMI curve (uniform beamforming, MRC).
pub fn emi_sst_no_csit(
    c: &Constellation,
    cfg: &ChannelConfig,
    snr_db_grid: &[f64],
    v: usize,
) -> Result<EmiCurve> {
    SstQuadrature::no_csit(c, cfg, v)?.curve(
        c,
        snr_db_grid,
        QuadratureDomain::Auto,
        ExecPolicy::default(),
    )
}

/// CSIT single-stream EMI curve (MRT, MRC).
pub fn emi_sst_csit(
    c: &Constellation,
    cfg: &ChannelConfig,
    snr_db_grid: &[f64],
    v: usize,
) -> Result<EmiCurve> {
    SstQuadrature::csit(c, cfg, v)?.curve(
        c,
        snr_db_grid,
        QuadratureDomain::Auto,
        ExecPolicy::default(),
    )
}

const DEGENERACY_TOL: f64 = 1e-9;

/// Diversity order 1 law for uniform beamforming.
pub fn asymptotic_no_csit(
    c: &Constellation,
    cfg: &ChannelConfig,
) -> Result<AsymptoticCharacterization> {
    asymptotic_no_csit_with(&MmseMellinEvaluator::new(c)?, cfg)
}

pub fn asymptotic_no_csit_with(
    ev: &MmseMellinEvaluator,
    cfg: &ChannelConfig,
) -> Result<AsymptoticCharacterization> {
    let exp = FOperatorExpansion::new(cfg)?;
    let nm = cfg.rx_order();
    if !(nm > 1.0 + DEGENERACY_TOL) {
        return Err(Error::Degenerate(format!("N_r m_r = {nm} must exceed 1")));
    }
    let h_max = exp.coefficients().len() - 1;
    if let Some(h) = (0..=h_max).find(|&h| (nm - (h as f64 + 1.0)).abs() <= DEGENERACY_TOL) {
        return Err(Error::Degenerate(format!("N_r m_r = h + 1 at h = {h}")));
    }
    // Σ over multi-indices of S! Y / (X U^S) is the aggregated h = 0 coefficient
    let c0 = exp.coefficients()[0];
    let inv_ga = c0 * ev.mellin(2.0)? * cfg.m_t * cfg.m_r * LOG2_E / (nm - 1.0);
    Ok(AsymptoticCharacterization {
        entropy: ev.constellation().entropy(),
        array_gain: inv_ga.recip(),
        diversity_order: 1.0,
        validity_note: format!("N_r m_r = {nm} > 1 and differs from h + 1 for h in 0..={h_max}"),
    })
}

/// Diversity order `min{N_t m_t, N_r m_r}` law for MRT.
pub fn asymptotic_csit(
    c: &Constellation,
    cfg: &ChannelConfig,
) -> Result<AsymptoticCharacterization> {
    asymptotic_csit_with(&MmseMellinEvaluator::new(c)?, cfg)
}

pub fn asymptotic_csit_with(
    ev: &MmseMellinEvaluator,
    cfg: &ChannelConfig,
) -> Result<AsymptoticCharacterization> {
    let a = cfg.tx_order();
    let b = cfg.rx_order();
    if (a - b).abs() <= DEGENERACY_TOL {
        return Err(Error::Degenerate(format!("N_r m_r = N_t m_t = {a}")));
    }
    let gd = a.min(b);
    let inner = (ln_gamma(a) + ln_gamma(b) + gd.ln() + std::f64::consts::LN_2.ln()
        - ln_gamma((a - b).abs())
        - ev.mellin(gd + 1.0)?.ln())
        / gd;
    Ok(AsymptoticCharacterization {
        entropy: ev.constellation().entropy(),
        array_gain: inner.exp() / (cfg.m_r * cfg.m_t),
        diversity_order: gd,
        validity_note: format!("N_t m_t = {a} differs from N_r m_r = {b}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::make_qam;
    use crate::keyhole_channel::pdf_s2;
    use crate::specfun::{integrate_adaptive, pochhammer};

    fn qam4() -> Constellation {
        make_qam(4, None).unwrap()
    }

    // oracle: adaptive integration of the gap against the gain density on log-spaced panels
    fn oracle_gap(q: &SstQuadrature, snr: f64) -> f64 {
        let ch = AwgnChannel::shared(&qam4());
        let breaks: Vec<f64> = (-12..=4)
            .map(|k| 10f64.powi(k) / snr.sqrt())
            .chain((-8..=3).map(|k| 10f64.powi(k)))
            .collect();
        integrate_adaptive(
            |g| {
                if g <= 0.0 {
                    0.0
                } else {
                    q.pdf_gain(g).unwrap() * ch.gap_interp(snr * g)
                }
            },
            0.0,
            400.0,
            &breaks,
            1e-10,
            0.0,
        )
    }

    #[test]
    fn order_guard() {
        let cfg = ChannelConfig::reference();
        assert!(matches!(
            SstQuadrature::no_csit(&qam4(), &cfg, 7),
            Err(Error::QuadratureTooSmall(7))
        ));
        assert!(SstQuadrature::csit(&qam4(), &cfg, 8).is_ok());
        let frac = ChannelConfig::new(2, 2, 1.5, 3.0).unwrap();
        assert!(matches!(
            SstQuadrature::no_csit(&qam4(), &frac, 200),
            Err(Error::AnalyticPathUnsupported(_))
        ));
        assert!(SstQuadrature::csit(&qam4(), &frac, 50).is_ok());
    }

    #[test]
    fn domains_agree_with_adaptive_oracle() {
        let cfg = ChannelConfig::reference();
        for q in [
            SstQuadrature::no_csit(&qam4(), &cfg, 200).unwrap(),
            SstQuadrature::csit(&qam4(), &cfg, 200).unwrap(),
        ] {
            for db in [-10.0, 0.0, 10.0, 20.0, 30.0, 40.0] {
                let snr = db_to_linear(db);
                let gap = oracle_gap(&q, snr);
                let auto = q.entropy() - q.emi(snr, QuadratureDomain::Auto).unwrap();
                assert!(
                    (auto - gap).abs() <= 1e-6f64.max(1e-3 * gap),
                    "{db} dB: {auto} vs {gap}"
                );
            }
        }
    }

    #[test]
    fn low_snr_vanishes() {
        let cfg = ChannelConfig::reference();
        let q = SstQuadrature::no_csit(&qam4(), &cfg, 200).unwrap();
        assert!(q.emi(db_to_linear(-60.0), QuadratureDomain::Auto).unwrap() < 1e-3);
        assert_eq!(q.emi(0.0, QuadratureDomain::Auto).unwrap(), 0.0);
    }

    #[test]
    fn asymptotic_no_csit_matches_literal_multi_index_sum() {
        let c = qam4();
        let cfg = ChannelConfig::reference();
        let ev = MmseMellinEvaluator::new(&c).unwrap();
        let a = asymptotic_no_csit_with(&ev, &cfg).unwrap();
        assert_eq!(a.diversity_order, 1.0);
        let m = 2usize;
        let u = 2.0 / (4.0 * m as f64);
        let fact = |n: usize| (1..=n).product::<usize>() as f64;
        let mut inv = 0.0;
        for i1 in 0..m {
            for i2 in 0..m {
                let s = i1 + i2;
                let y = (1.0 / (4.0 * m as f64)).powi(s as i32);
                let x: f64 = [i1, i2]
                    .iter()
                    .map(|&i| fact(i).powi(2) / pochhammer(1.0 - m as f64, i as u32))
                    .product();
                inv += u.powi(-(s as i32))
                    * fact(s)
                    * y
                    * ev.mellin(2.0).unwrap()
                    * 2.0
                    * 3.0
                    * LOG2_E
                    / (5.0 * x);
            }
        }
        assert!((a.array_gain * inv - 1.0).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_csit_values_and_degeneracy() {
        let c = qam4();
        let a = asymptotic_csit(&c, &ChannelConfig::reference()).unwrap();
        assert_eq!(a.diversity_order, 4.0);
        assert!(a.array_gain > 0.0);
        let degenerate = ChannelConfig::new(2, 2, 1.0, 1.0).unwrap();
        assert!(matches!(
            asymptotic_csit(&c, &degenerate),
            Err(Error::Degenerate(_))
        ));
        // N_r m_r = 2 = h + 1 at h = 1
        let cfg = ChannelConfig::new(2, 2, 2.0, 1.0).unwrap();
        assert!(matches!(
            asymptotic_no_csit(&c, &cfg),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn csit_law_constant_from_density_origin() {
        // oracle: f_S2(x) ~ C x^{G−1} near 0 gives gap ~ C M̂(G+1)/(G ln 2) γ̄^{−G}
        let c = qam4();
        let cfg = ChannelConfig::reference();
        let ev = MmseMellinEvaluator::new(&c).unwrap();
        let a = asymptotic_csit_with(&ev, &cfg).unwrap();
        let x = 1e-9;
        let cst = pdf_s2(&cfg, x).unwrap() / x.powf(3.0);
        let snr = 1e4f64;
        let predicted =
            cst * ev.mellin(5.0).unwrap() / (4.0 * std::f64::consts::LN_2) * snr.powi(-4);
        assert!((a.gap(snr) / predicted - 1.0).abs() < 1e-6);
    }

    #[test]
    fn order_100_vs_200_and_ordering() {
        let c = qam4();
        let cfg = ChannelConfig::reference();
        let grid: Vec<f64> = (-10..=40).step_by(2).map(f64::from).collect();
        let nc200 = emi_sst_no_csit(&c, &cfg, &grid, 200).unwrap();
        let nc100 = emi_sst_no_csit(&c, &cfg, &grid, 100).unwrap();
        let cs200 = emi_sst_csit(&c, &cfg, &grid, 200).unwrap();
        let cs100 = emi_sst_csit(&c, &cfg, &grid, 100).unwrap();
        for (i, db) in grid.iter().enumerate() {
            assert!((nc200.emi_bits[i] - nc100.emi_bits[i]).abs() < 1e-6, "{db}");
            assert!((cs200.emi_bits[i] - cs100.emi_bits[i]).abs() < 1e-6, "{db}");
            assert!(cs200.emi_bits[i] >= nc200.emi_bits[i] - 1e-9);
            assert!((0.0..=2.0).contains(&nc200.emi_bits[i]));
            if i > 0 {
                assert!(nc200.emi_bits[i] >= nc200.emi_bits[i - 1]);
                assert!(cs200.emi_bits[i] >= cs200.emi_bits[i - 1]);
            }
        }
        assert!(2.0 - cs200.emi_bits[grid.len() - 1] < 1e-3);
    }

    #[test]
    fn gap_law_ratio_at_deepest_resolvable_point() {
        let c = qam4();
        let cfg = ChannelConfig::reference();
        let ev = MmseMellinEvaluator::new(&c).unwrap();
        let cases = [
            (
                SstQuadrature::no_csit(&c, &cfg, 200).unwrap(),
                asymptotic_no_csit_with(&ev, &cfg).unwrap(),
            ),
            (
                SstQuadrature::csit(&c, &cfg, 200).unwrap(),
                asymptotic_csit_with(&ev, &cfg).unwrap(),
            ),
        ];
        for (q, law) in cases {
            let (snr, gap) = (0..=60)
                .map(|db| db_to_linear(db as f64))
                .map(|s| (s, q.gap(s, QuadratureDomain::Auto).unwrap()))
                .rfind(|&(_, g)| g > 1e-9)
                .unwrap();
            let ratio = gap / law.gap(snr);
            assert!((0.9..=1.1).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let c = qam4();
        let q = SstQuadrature::no_csit(&c, &ChannelConfig::reference(), 64).unwrap();
        let grid: Vec<f64> = (0..10).map(|i| 4.0 * i as f64 - 10.0).collect();
        let a = q
            .curve(&c, &grid, QuadratureDomain::Auto, ExecPolicy::Sequential)
            .unwrap();
        let b = q
            .curve(&c, &grid, QuadratureDomain::Auto, ExecPolicy::default())
            .unwrap();
        assert_eq!(a.emi_bits, b.emi_bits);
    }
}
