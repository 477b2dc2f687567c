//! The keyhole channel `H = h_r h_t^H` with Nakagami-m entries on both sides,
//! and the densities of the single-stream SNR gains
//! `S1 = ‖h_r‖²|h_t^H 1|²` (uniform beamforming) and `S2 = ‖h_r‖²‖h_t‖²` (MRT).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};
use crate::specfun::{ln_bessel_k, ln_gamma, pochhammer};
use crate::stats::CompensatedSum;

/// Largest `N_t·m_t` accepted by the F-operator expansion.
pub const MAX_EXPANSION_ORDER: u32 = 64;

/// Raw densities below this are treated as cancellation failure.
pub const NEGATIVE_DENSITY_LIMIT: f64 = -1e-9;

/// Antenna counts and fading severities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub n_t: usize,
    pub n_r: usize,
    pub m_t: f64,
    pub m_r: f64,
}

impl ChannelConfig {
    pub fn new(n_t: usize, n_r: usize, m_t: f64, m_r: f64) -> Result<Self> {
        if n_t < 2 || n_r < 2 {
            return Err(Error::InvalidConfig(format!(
                "antenna counts must exceed 1 (n_t = {n_t}, n_r = {n_r})"
            )));
        }
        for (name, m) in [("m_t", m_t), ("m_r", m_r)] {
            if !(m >= 0.5 && m.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} = {m} must be a finite value >= 0.5"
                )));
            }
        }
        Ok(Self { n_t, n_r, m_t, m_r })
    }

    /// Bypasses the `n > 1` check; single-antenna links appear only in cross-checks.
    pub(crate) fn unchecked(n_t: usize, n_r: usize, m_t: f64, m_r: f64) -> Self {
        Self { n_t, n_r, m_t, m_r }
    }

    /// `N_t = N_r = 2`, `m_t = 2`, `m_r = 3`.
    pub fn reference() -> Self {
        Self::unchecked(2, 2, 2.0, 3.0)
    }

    pub fn integer_m_t(&self) -> Option<u32> {
        (self.m_t.fract() == 0.0 && self.m_t <= u32::MAX as f64).then_some(self.m_t as u32)
    }

    /// `N_t m_t`.
    pub fn tx_order(&self) -> f64 {
        self.n_t as f64 * self.m_t
    }

    /// `N_r m_r`.
    pub fn rx_order(&self) -> f64 {
        self.n_r as f64 * self.m_r
    }
}

/// Finite-sum expansion of the density of `B = |Σ_k √c_k β_k^{1/2} e^{jφ_k}|²`,
/// aggregated by the power `h` of `x`:
///
/// `f_B(x) = Σ_h c_h e^{−x/(4U)} x^h (4U)^{−h−1}`.
#[derive(Debug, Clone)]
pub struct FOperatorExpansion {
    config: ChannelConfig,
    m_t: u32,
    weights: Vec<f64>,
    u: f64,
    coefficients: Vec<f64>,
    multi_indices: u128,
    raw_terms: u128,
}

impl FOperatorExpansion {
    /// Unit weights: `B = |h_t^H 1|²`.
    pub fn new(config: &ChannelConfig) -> Result<Self> {
        Self::with_weights(config, &vec![1.0; config.n_t])
    }

    /// Per-antenna power weights `c_k`, so `U = Σ c_k/(4 m_t)` and
    /// `Y = Π (c_k/(4 m_t))^{i_k}`.
    pub fn with_weights(config: &ChannelConfig, weights: &[f64]) -> Result<Self> {
        let m = config.integer_m_t().ok_or_else(|| {
            Error::AnalyticPathUnsupported(format!(
                "m_t = {} is not an integer; use the Monte Carlo path",
                config.m_t
            ))
        })?;
        let n_t = config.n_t;
        if weights.len() != n_t {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {n_t} transmit antennas",
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter(
                "weights must be positive and finite".into(),
            ));
        }
        if n_t as u64 * m as u64 > MAX_EXPANSION_ORDER as u64 {
            return Err(Error::BlowupGuard(format!(
                "N_t·m_t = {} exceeds {MAX_EXPANSION_ORDER}",
                n_t as u64 * m as u64
            )));
        }
        let mf = m as f64;
        let u: f64 = weights.iter().map(|w| w / (4.0 * mf)).sum();

        // P_S = Σ_{|i|=S} Π_k (c_k/(4 m U))^{i_k} (1−m)_{i_k} / (i_k!)², by convolution
        let s_max = n_t * (m as usize - 1);
        let mut poly = vec![0.0; s_max + 1];
        let mut count = vec![0u128; s_max + 1];
        poly[0] = 1.0;
        count[0] = 1;
        let mut deg = 0;
        for &w in weights {
            let r = w / (4.0 * mf * u);
            let mut a = Vec::with_capacity(m as usize);
            let mut fact = 1.0;
            for i in 0..m as usize {
                if i > 0 {
                    fact *= i as f64;
                }
                a.push(r.powi(i as i32) * pochhammer(1.0 - mf, i as u32) / (fact * fact));
            }
            let mut next = vec![0.0; s_max + 1];
            let mut next_count = vec![0u128; s_max + 1];
            for s in 0..=deg {
                for (i, ai) in a.iter().enumerate() {
                    next[s + i] += poly[s] * ai;
                    next_count[s + i] += count[s];
                }
            }
            poly = next;
            count = next_count;
            deg += m as usize - 1;
        }

        // c_h = Σ_{S ≥ h} (−S)_h S! P_S / (h!)²
        let fact: Vec<f64> = std::iter::once(1.0)
            .chain((1..=s_max).scan(1.0, |f, n| {
                *f *= n as f64;
                Some(*f)
            }))
            .collect();
        let mut coefficients = Vec::with_capacity(s_max + 1);
        for h in 0..=s_max {
            let mut acc = CompensatedSum::new();
            for s in h..=s_max {
                if poly[s] != 0.0 {
                    acc.add(
                        pochhammer(-(s as f64), h as u32) * fact[s] / (fact[h] * fact[h]) * poly[s],
                    );
                }
            }
            coefficients.push(acc.value());
        }
        let multi_indices = (m as u128).pow(n_t as u32);
        let raw_terms = count
            .iter()
            .enumerate()
            .map(|(s, &c)| c * (s as u128 + 1))
            .sum();
        Ok(Self {
            config: *config,
            m_t: m,
            weights: weights.to_vec(),
            u,
            coefficients,
            multi_indices,
            raw_terms,
        })
    }

    pub fn config(&self) -> &ChannelConfig {
        &self.config
    }

    pub fn m_t(&self) -> u32 {
        self.m_t
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `U_{N_t}`.
    pub fn u(&self) -> f64 {
        self.u
    }

    /// Aggregated coefficient per power `h = 0..=N_t(m_t−1)`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Number of multi-indices `(i_1..i_{N_t})`.
    pub fn multi_index_count(&self) -> u128 {
        self.multi_indices
    }

    /// Term count of the unaggregated operator, `Σ (S + 1)` over multi-indices.
    pub fn raw_term_count(&self) -> u128 {
        self.raw_terms
    }

    fn guard(x: f64, terms: &CompensatedSum) -> Result<f64> {
        let raw = terms.value();
        if raw < NEGATIVE_DENSITY_LIMIT {
            return Err(Error::CancellationBlowup { x, raw });
        }
        Ok(raw.max(0.0))
    }

    /// Unclamped `f_B(x)`.
    pub fn pdf_b_raw(&self, x: f64) -> f64 {
        self.sum_b(x).value()
    }

    fn sum_b(&self, x: f64) -> CompensatedSum {
        let four_u = 4.0 * self.u;
        let mut acc = CompensatedSum::new();
        if x == 0.0 {
            acc.add(self.coefficients[0] / four_u);
            return acc;
        }
        for (h, &c) in self.coefficients.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let hf = h as f64;
            let ln_t = c.abs().ln() - x / four_u + hf * x.ln() - (hf + 1.0) * four_u.ln();
            acc.add(c.signum() * ln_t.exp());
        }
        acc
    }

    /// Density of `B`; tiny negative values from cancellation are clamped to 0.
    pub fn pdf_b(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain {
                func: "pdf_b",
                detail: format!("x = {x} must be nonnegative"),
            });
        }
        Self::guard(x, &self.sum_b(x))
    }

    /// Density of `S1 = A·B` with `A = ‖h_r‖² ~ Gamma(N_r m_r, rate m_r)`.
    pub fn pdf_s1(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain {
                func: "pdf_s1",
                detail: format!("x = {x} must be positive"),
            });
        }
        let nm = self.config.rx_order();
        let y = self.config.m_r * x / (4.0 * self.u);
        let z = 2.0 * y.sqrt();
        let base = std::f64::consts::LN_2 - ln_gamma(nm) - x.ln();
        let mut acc = CompensatedSum::new();
        for (h, &c) in self.coefficients.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let hf = h as f64;
            let lk = ln_bessel_k(nm - hf - 1.0, z)?;
            let ln_t = c.abs().ln() + base + 0.5 * (nm + hf + 1.0) * y.ln() + lk;
            acc.add(c.signum() * ln_t.exp());
        }
        Self::guard(x, &acc)
    }
}

/// Density of `B = |h_t^H 1|²`.
pub fn pdf_b(exp: &FOperatorExpansion, x: f64) -> Result<f64> {
    exp.pdf_b(x)
}

/// Density of `S1 = ‖h_r‖²|h_t^H 1|²`. The receive side is taken from `config`.
pub fn pdf_s1(exp: &FOperatorExpansion, config: &ChannelConfig, x: f64) -> Result<f64> {
    if exp.config.n_r != config.n_r || exp.config.m_r != config.m_r {
        let mut e = exp.clone();
        e.config.n_r = config.n_r;
        e.config.m_r = config.m_r;
        return e.pdf_s1(x);
    }
    exp.pdf_s1(x)
}

/// Density of `S2 = ‖h_r‖²‖h_t‖²`, valid for any real `m_t, m_r ≥ ½`.
pub fn pdf_s2(config: &ChannelConfig, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            func: "pdf_s2",
            detail: format!("x = {x} must be positive"),
        });
    }
    Ok(ln_pdf_s2(config, x)?.exp())
}

/// `ln f_{S2}(x)`.
pub fn ln_pdf_s2(config: &ChannelConfig, x: f64) -> Result<f64> {
    let a = config.tx_order();
    let b = config.rx_order();
    let mm = config.m_t * config.m_r;
    let lk = ln_bessel_k(b - a, 2.0 * (mm * x).sqrt())?;
    Ok(std::f64::consts::LN_2 + 0.5 * (a + b) * mm.ln() + lk
        - ln_gamma(a)
        - ln_gamma(b)
        - (1.0 - 0.5 * (a + b)) * x.ln())
}

/// One realization of the two keyhole vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyholeRealization {
    pub h_r: Vec<Complex64>,
    pub h_t: Vec<Complex64>,
}

impl KeyholeRealization {
    /// `‖h_r‖²`.
    pub fn norm_r2(&self) -> f64 {
        self.h_r.iter().map(|x| x.norm_sqr()).sum()
    }

    /// `‖h_t‖²`.
    pub fn norm_t2(&self) -> f64 {
        self.h_t.iter().map(|x| x.norm_sqr()).sum()
    }

    /// `|h_t^H 1|²`.
    pub fn b(&self) -> f64 {
        self.h_t
            .iter()
            .map(|x| x.conj())
            .sum::<Complex64>()
            .norm_sqr()
    }

    pub fn s1(&self) -> f64 {
        self.norm_r2() * self.b()
    }

    pub fn s2(&self) -> f64 {
        self.norm_r2() * self.norm_t2()
    }

    /// `H = h_r h_t^H`, `N_r × N_t`.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.h_r.len(), self.h_t.len(), |i, j| {
            self.h_r[i] * self.h_t[j].conj()
        })
    }
}

/// `n` i.i.d. entries `√α e^{jφ}`, `α ~ Gamma(m, rate m)`, `φ ~ U[0, 2π)`.
pub fn nakagami_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, m: f64) -> Vec<Complex64> {
    let gamma = Gamma::new(m, 1.0 / m).expect("m >= 0.5");
    (0..n)
        .map(|_| {
            let alpha: f64 = gamma.sample(rng);
            let phi = rng.random::<f64>() * std::f64::consts::TAU;
            Complex64::from_polar(alpha.sqrt(), phi)
        })
        .collect()
}

/// Realization `index` of the channel stream for `seed`; `h_r` is drawn before `h_t`.
pub fn sample_realization(config: &ChannelConfig, seed: u64, index: u64) -> KeyholeRealization {
    let mut rng = stream(seed, Purpose::Channel, index);
    let h_r = nakagami_vector(&mut rng, config.n_r, config.m_r);
    let h_t = nakagami_vector(&mut rng, config.n_t, config.m_t);
    KeyholeRealization { h_r, h_t }
}

/// The first `count` realizations of the stream for `seed`.
pub fn sample_channel(
    config: &ChannelConfig,
    rng_seed: u64,
    count: usize,
) -> impl Iterator<Item = KeyholeRealization> + '_ {
    (0..count as u64).map(move |i| sample_realization(config, rng_seed, i))
}

/// Full-rank Rayleigh channel with i.i.d. `CN(0, 1)` entries (no keyhole).
pub fn sample_full_rank(n_r: usize, n_t: usize, seed: u64, index: u64) -> DMatrix<Complex64> {
    let mut rng = stream(seed, Purpose::Channel, index);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(n_r, n_t, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}
