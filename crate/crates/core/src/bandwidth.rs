//! k-fold cross-validation of the bandwidth on a geometric grid between
//! `1/n` and `1/√n`.
//!
//! Only the validation observations are held out: the fit for a validation
//! stamp may use training observations on either side of it in time. A
//! bandwidth for which any fold cannot be fitted scores `+∞`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FtsError, Result};
use crate::estimators::{Estimator, SmoothConfig};
use crate::kernels::Kernel;
use crate::series::FunctionalSeries;

/// Relative tolerance under which two scores count as tied.
pub const TIE_RTOL: f64 = 1e-9;
/// Absolute tie tolerance, relative to the mean square of the observations.
pub const TIE_ATOL: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldScheme {
    /// Index `i` goes to fold `i mod k`.
    #[default]
    Interleaved,
    /// `k` consecutive blocks whose sizes differ by at most one.
    ContiguousBlocks,
}

impl std::str::FromStr for FoldScheme {
    type Err = FtsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "interleaved" => Ok(FoldScheme::Interleaved),
            "contiguous" | "contiguous_blocks" | "blocks" => Ok(FoldScheme::ContiguousBlocks),
            other => Err(FtsError::InvalidConfig(format!("unknown fold scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvConfig {
    pub k: usize,
    pub grid_size: usize,
    pub estimator: Estimator,
    pub fold_scheme: FoldScheme,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            k: 5,
            grid_size: 20,
            estimator: Estimator::LocalLinear,
            fold_scheme: FoldScheme::Interleaved,
        }
    }
}

impl CvConfig {
    pub fn with_estimator(mut self, estimator: Estimator) -> Self {
        self.estimator = estimator;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k < 2 || self.k > n / 4 {
            return Err(FtsError::InvalidConfig(format!(
                "need 2 <= k <= n/4, got k = {} for n = {n}",
                self.k
            )));
        }
        if self.grid_size < 2 {
            return Err(FtsError::InvalidConfig(format!(
                "grid_size must be at least 2, got {}",
                self.grid_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub grid: Vec<f64>,
    /// Mean validation MSE per grid bandwidth, `+∞` where a fit failed.
    pub scores: Vec<f64>,
    pub best_h: f64,
}

/// `grid_size` geometrically spaced bandwidths from `1/n` to `1/√n`.
pub fn bandwidth_grid(n: usize, grid_size: usize) -> Result<Vec<f64>> {
    if n < 2 || grid_size < 2 {
        return Err(FtsError::InvalidConfig(format!(
            "bandwidth grid needs n >= 2 and grid_size >= 2, got n = {n}, grid_size = {grid_size}"
        )));
    }
    let lo = 1.0 / n as f64;
    let hi = 1.0 / (n as f64).sqrt();
    let ratio = hi / lo;
    let last = grid_size - 1;
    Ok((0..grid_size)
        .map(|j| match j {
            0 => lo,
            _ if j == last => hi,
            _ => lo * ratio.powf(j as f64 / last as f64),
        })
        .collect())
}

/// Validation index sets for each fold, each sorted increasingly.
pub fn folds(n: usize, k: usize, scheme: FoldScheme) -> Vec<Vec<usize>> {
    match scheme {
        FoldScheme::Interleaved => (0..k).map(|f| (f..n).step_by(k).collect()).collect(),
        FoldScheme::ContiguousBlocks => {
            let (base, extra) = (n / k, n % k);
            let mut start = 0;
            (0..k)
                .map(|f| {
                    let len = base + usize::from(f < extra);
                    let block = (start..start + len).collect();
                    start += len;
                    block
                })
                .collect()
        }
    }
}

fn complement(n: usize, held_out: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    held_out.iter().for_each(|&i| mask[i] = false);
    (0..n).filter(|&i| mask[i]).collect()
}

fn fold_score(
    series: &FunctionalSeries,
    validation: &[usize],
    estimator: Estimator,
    cfg: &SmoothConfig,
) -> Result<f64> {
    let train = series.select(&complement(series.len(), validation))?;
    let eval: Vec<f64> = validation.iter().map(|&i| series.times()[i]).collect();
    let est = estimator.fit_mean_at(&train, cfg, &eval)?;
    let values = series.values();
    let mut acc = 0.0;
    for (row, &i) in validation.iter().enumerate() {
        for (a, b) in est.mu_hat.row(row).iter().zip(values.row(i).iter()) {
            acc += (a - b) * (a - b);
        }
    }
    Ok(acc / (validation.len() * series.dim()) as f64)
}

/// Cross-validation score of a single bandwidth: the mean over folds of the
/// per-fold mean squared prediction error.
pub fn cv_score(series: &FunctionalSeries, h: f64, cfg: &CvConfig, kernel: &Kernel) -> f64 {
    let smooth = SmoothConfig::new(h).with_kernel(kernel.clone());
    let sets = folds(series.len(), cfg.k, cfg.fold_scheme);
    let mut total = 0.0;
    for validation in &sets {
        match fold_score(series, validation, cfg.estimator, &smooth) {
            Ok(s) if s.is_finite() => total += s,
            _ => return f64::INFINITY,
        }
    }
    total / sets.len() as f64
}

/// Selects the bandwidth minimizing the cross-validated prediction error.
/// Ties (within [`TIE_RTOL`] / [`TIE_ATOL`]) go to the smallest bandwidth.
pub fn cross_validate(series: &FunctionalSeries, cfg: &CvConfig, kernel: &Kernel) -> Result<CvReport> {
    let n = series.len();
    cfg.validate(n)?;
    let grid = bandwidth_grid(n, cfg.grid_size)?;
    let scores: Vec<f64> = grid
        .par_iter()
        .map(|&h| cv_score(series, h, cfg, kernel))
        .collect();
    let best_h = select_best(&grid, &scores, mean_square(series)).ok_or(FtsError::AllBandwidthsInvalid)?;
    Ok(CvReport {
        grid,
        scores,
        best_h,
    })
}

fn mean_square(series: &FunctionalSeries) -> f64 {
    let v = series.values();
    v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64
}

fn select_best(grid: &[f64], scores: &[f64], scale: f64) -> Option<f64> {
    let min = scores.iter().cloned().filter(|s| s.is_finite()).reduce(f64::min)?;
    let tol = TIE_RTOL * min + TIE_ATOL * scale.max(f64::MIN_POSITIVE);
    grid.iter()
        .zip(scores)
        .find(|(_, &s)| s.is_finite() && s <= min + tol)
        .map(|(&h, _)| h)
}
