//! Order-fixed reductions.

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Sample mean and standard error of the mean, reduced in slice order.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    mean_stderr_by(xs.len(), |i| xs[i])
}

/// [`mean_stderr`] of `f(0), …, f(n−1)` without materializing them; `f` is called twice per index.
pub fn mean_stderr_by(n: usize, f: impl Fn(usize) -> f64) -> (f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = compensated_sum((0..n).map(&f)) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss = compensated_sum((0..n).map(|i| {
        let d = f(i) - mean;
        d * d
    }));
    (mean, (ss / (n - 1) as f64 / n as f64).sqrt())
}
