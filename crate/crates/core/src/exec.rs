//! Execution policy for independent work units.
//!
//! Work is always split into indexed units whose results are collected in
//! index order, so the parallel and sequential paths return identical values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecPolicy {
    Sequential,
    /// Rayon data parallelism; identical to `Sequential` without the `parallel` feature.
    Parallel,
}

impl Default for ExecPolicy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecPolicy::Parallel
        } else {
            ExecPolicy::Sequential
        }
    }
}

/// `(0..n).map(f)` under `policy`, results in index order.
pub fn map_indexed<T, F>(policy: ExecPolicy, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match policy {
        #[cfg(feature = "parallel")]
        ExecPolicy::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Fallible [`map_indexed`]; the error with the lowest index wins.
pub fn try_map_indexed<T, F>(policy: ExecPolicy, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    map_indexed(policy, n, f).into_iter().collect()
}

/// Runs `f` on a dedicated pool of `workers` threads (`None`: rayon's global pool).
pub fn with_workers<R, F>(workers: Option<usize>, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match workers {
        Some(0) => Err(Error::InvalidParameter(
            "worker count must be positive".into(),
        )),
        #[cfg(feature = "parallel")]
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        _ => Ok(f()),
    }
}
