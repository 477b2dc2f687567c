//! SNR-indexed EMI samples with provenance.

use serde::{Deserialize, Serialize};

use crate::keyhole_channel::ChannelConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    AnalyticQuadrature,
    MonteCarlo,
    Asymptotic,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::AnalyticQuadrature => "analytic-quadrature",
            Method::MonteCarlo => "monte-carlo",
            Method::Asymptotic => "asymptotic",
        }
    }
}

/// Inputs needed to reproduce a curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub scheme: String,
    pub constellation: String,
    pub entropy_bits: f64,
    pub config: Option<ChannelConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub streams: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CurveMeta {
    pub fn new(
        scheme: impl Into<String>,
        constellation: impl Into<String>,
        entropy_bits: f64,
    ) -> Self {
        Self {
            scheme: scheme.into(),
            constellation: constellation.into(),
            entropy_bits,
            config: None,
            streams: None,
            quadrature_order: None,
            realizations: None,
            noise_samples: None,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmiCurve {
    pub snr_db: Vec<f64>,
    pub emi_bits: Vec<f64>,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr_bits: Option<Vec<f64>>,
    pub meta: CurveMeta,
}

impl EmiCurve {
    pub fn len(&self) -> usize {
        self.snr_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snr_db.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        self.meta.entropy_bits
    }

    /// `H − EMI` at every point.
    pub fn gap(&self) -> Vec<f64> {
        self.emi_bits
            .iter()
            .map(|e| self.meta.entropy_bits - e)
            .collect()
    }

    pub fn stderr_at(&self, i: usize) -> f64 {
        self.stderr_bits.as_ref().map_or(0.0, |s| s[i])
    }
}

/// `10^{dB/10}`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Inclusive `lo:hi:step` grid in dB.
pub fn snr_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || hi < lo {
        return vec![];
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        assert_eq!(snr_grid(-10.0, 30.0, 2.0).len(), 21);
        assert_eq!(snr_grid(0.0, 1.0, 0.1).len(), 11);
        assert!(snr_grid(1.0, 0.0, 1.0).is_empty());
        assert!(snr_grid(0.0, 1.0, 0.0).is_empty());
    }
}
