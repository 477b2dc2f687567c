//! Finite input alphabets and their product alphabets for multi-stream use.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest product alphabet accepted by [`ProductConstellation::new`].
pub const MAX_PRODUCT_POINTS: usize = 4096;

const PROB_TOL: f64 = 1e-9;

/// A finite complex alphabet with an input distribution and unit average power.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<Complex64>,
    probs: Vec<f64>,
    label: String,
    renormalized: bool,
}

/// On-disk constellation format: `{"points": [[re, im], ...], "probs": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstellationSpec {
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Constellation {
    /// Builds a constellation, scaling the points to unit average power.
    ///
    /// `probs = None` means uniform. Probabilities that sum to one within
    /// 1e-9 are renormalized exactly; anything further off is rejected.
    pub fn new(
        points: Vec<Complex64>,
        probs: Option<Vec<f64>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let m = points.len();
        if m < 2 {
            return Err(Error::InvalidConstellation(format!(
                "need at least 2 points, got {m}"
            )));
        }
        if points
            .iter()
            .any(|p| !p.re.is_finite() || !p.im.is_finite())
        {
            return Err(Error::InvalidConstellation("non-finite point".into()));
        }
        let mut probs = probs.unwrap_or_else(|| vec![1.0 / m as f64; m]);
        if probs.len() != m {
            return Err(Error::InvalidConstellation(format!(
                "{} probabilities for {m} points",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::InvalidConstellation(
                "every probability must lie strictly between 0 and 1".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidConstellation(format!(
                "probabilities sum to {total}"
            )));
        }
        probs.iter_mut().for_each(|p| *p /= total);

        let power: f64 = points
            .iter()
            .zip(&probs)
            .map(|(x, p)| p * x.norm_sqr())
            .sum();
        if !(power > 0.0) {
            return Err(Error::InvalidConstellation("zero average power".into()));
        }
        let renormalized = (power - 1.0).abs() > 1e-12;
        let scale = power.sqrt().recip();
        let points: Vec<Complex64> = points.into_iter().map(|x| x * scale).collect();

        for i in 0..m {
            for j in i + 1..m {
                if (points[i] - points[j]).norm() < 1e-12 {
                    return Err(Error::InvalidConstellation(format!(
                        "points {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(Self {
            points,
            probs,
            label: label.into(),
            renormalized,
        })
    }

    /// Square M-QAM (M ∈ {4, 16, 64, 256}) normalized to unit power under `probs`.
    pub fn qam(m: usize, probs: Option<Vec<f64>>) -> Result<Self> {
        if !matches!(m, 4 | 16 | 64 | 256) {
            return Err(Error::UnsupportedModulation(format!(
                "{m}-QAM (supported: 4, 16, 64, 256)"
            )));
        }
        let side = (m as f64).sqrt().round() as usize;
        let level = |i: usize| (2 * i) as f64 - (side as f64 - 1.0);
        let points = (0..side)
            .flat_map(|i| (0..side).map(move |k| Complex64::new(level(i), level(k))))
            .collect();
        let mut c = Self::new(points, probs, format!("{m}-QAM"))?;
        c.renormalized = false;
        Ok(c)
    }

    /// Antipodal {-1, +1}.
    pub fn bpsk() -> Self {
        Self::new(
            vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)],
            None,
            "BPSK",
        )
        .expect("BPSK is valid")
    }

    pub fn from_spec(spec: &ConstellationSpec) -> Result<Self> {
        let points = spec
            .points
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let label = spec.label.clone().unwrap_or_else(|| "custom".to_string());
        Self::new(points, spec.probs.clone(), label)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ConstellationSpec = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConstellation(format!("bad JSON: {e}")))?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> ConstellationSpec {
        ConstellationSpec {
            points: self.points.iter().map(|p| [p.re, p.im]).collect(),
            probs: Some(self.probs.clone()),
            label: Some(self.label.clone()),
        }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// True when the supplied points had to be rescaled to unit power.
    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Input entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.probs)
    }

    /// `min_{g≠g'} |x_g − x_g'|`.
    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.min((a - b).norm());
            }
        }
        best
    }

    pub fn mean(&self) -> Complex64 {
        self.points
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| x * p)
            .sum()
    }

    /// Multiplies every point by `e^{jθ}`.
    pub fn rotated(&self, theta: f64) -> Self {
        let r = Complex64::from_polar(1.0, theta);
        Self {
            points: self.points.iter().map(|x| x * r).collect(),
            probs: self.probs.clone(),
            label: format!("{} rotated by {theta}", self.label),
            renormalized: self.renormalized,
        }
    }
}

/// `-Σ p log₂ p`.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|p| p * p.log2())
        .sum::<f64>()
}

/// The `M^N`-point alphabet of `N` i.i.d. streams drawn from a base constellation.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductConstellation {
    base: Constellation,
    streams: usize,
    // row-major M^N × N
    points: Vec<Complex64>,
    probs: Vec<f64>,
}

impl ProductConstellation {
    pub fn new(base: &Constellation, streams: usize) -> Result<Self> {
        if streams == 0 {
            return Err(Error::InvalidParameter(
                "stream count must be positive".into(),
            ));
        }
        let m = base.len();
        let size = (m as u128).checked_pow(streams as u32).unwrap_or(u128::MAX);
        if size > MAX_PRODUCT_POINTS as u128 {
            return Err(Error::BlowupGuard(format!(
                "{m}^{streams} points exceed the limit of {MAX_PRODUCT_POINTS}"
            )));
        }
        let size = size as usize;
        let mut points = Vec::with_capacity(size * streams);
        let mut probs = Vec::with_capacity(size);
        for g in 0..size {
            let mut rem = g;
            let mut digits = vec![0; streams];
            for d in digits.iter_mut().rev() {
                *d = rem % m;
                rem /= m;
            }
            points.extend(digits.iter().map(|&d| base.points[d]));
            probs.push(digits.iter().map(|&d| base.probs[d]).product());
        }
        Ok(Self {
            base: base.clone(),
            streams,
            points,
            probs,
        })
    }

    pub fn base(&self) -> &Constellation {
        &self.base
    }

    pub fn streams(&self) -> usize {
        self.streams
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn point(&self, g: usize) -> &[Complex64] {
        &self.points[g * self.streams..(g + 1) * self.streams]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.probs)
    }

    pub fn is_uniform(&self) -> bool {
        let q = 1.0 / self.len() as f64;
        self.probs.iter().all(|p| (p - q).abs() <= 1e-12 * q)
    }

    /// `b_{g,g'} = x_g − x_{g'}`.
    pub fn diff(&self, g: usize, h: usize) -> Vec<Complex64> {
        self.point(g)
            .iter()
            .zip(self.point(h))
            .map(|(a, b)| a - b)
            .collect()
    }

    /// All ordered difference vectors `(g, g', b_{g,g'})`, `g ≠ g'`, generated on demand.
    pub fn diff_vectors(&self) -> impl Iterator<Item = (usize, usize, Vec<Complex64>)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |g| {
            (0..n)
                .filter(move |&h| h != g)
                .map(move |h| (g, h, self.diff(g, h)))
        })
    }

    /// Difference vectors for unordered pairs `g < g'` (the ordered set adds only negations).
    pub fn unordered_diffs(&self) -> Vec<Vec<Complex64>> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for g in 0..n {
            for h in g + 1..n {
                out.push(self.diff(g, h));
            }
        }
        out
    }

    /// `E{x x^H}` as a row-major N × N matrix.
    pub fn second_moment(&self) -> Vec<Complex64> {
        let n = self.streams;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for g in 0..self.len() {
            let x = self.point(g);
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] += self.probs[g] * x[i] * x[j].conj();
                }
            }
        }
        out
    }
}

/// Square QAM, see [`Constellation::qam`].
pub fn make_qam(m: usize, probs: Option<Vec<f64>>) -> Result<Constellation> {
    Constellation::qam(m, probs)
}

/// Product alphabet of `streams` i.i.d. symbols, see [`ProductConstellation::new`].
pub fn product(base: &Constellation, streams: usize) -> Result<ProductConstellation> {
    ProductConstellation::new(base, streams)
}
