//! Nonparametric smoothing of discretized functional time series.
//!
//! A [`FunctionalSeries`] holds `n` observations `X_i ∈ ℝ^P` (one or more
//! curves sampled on a spatial grid) at time stamps in [0, 1]. The
//! [`estimators`] module estimates the time-varying mean `μ(t)` and its time
//! derivative with local linear, Jackknife bias-reduced and Nadaraya-Watson
//! smoothers. [`bandwidth`] selects `h` by k-fold cross-validation,
//! [`simulation`] generates the synthetic benchmark data and runs the seeded
//! Monte Carlo study, and [`analysis`] turns residuals into norm series,
//! CUSUM change-point estimates and outlier peaks.

pub mod analysis;
pub mod bandwidth;
pub mod error;
pub mod estimators;
pub mod io;
pub mod kernels;
pub mod series;
pub mod simulation;

pub use analysis::{cusum, detect_peaks, mae, mse, residual_norms, sliding_embed, CusumResult, MetricReport};
pub use bandwidth::{bandwidth_grid, cross_validate, CvConfig, CvReport, FoldScheme};
pub use error::{FtsError, Result};
pub use estimators::{
    jackknife, jackknife_derivative, jackknife_mean, local_linear, local_linear_at, nadaraya_watson,
    nadaraya_watson_at, nw_derivative, weight_stats, Estimator, SmoothConfig, WeightStats,
};
pub use kernels::{Kernel, KernelMoments};
pub use series::{Estimate, FunctionalSeries, Norm, ValueGrid};
pub use simulation::{monte_carlo, ErrorKind, ErrorProcess, MeanOperator, ResultsTable, SimSpec};
