//! Kernel smoothers for functional time series.
//!
//! All estimators work coordinate-wise on the flattened value dimension and
//! accept arbitrary strictly increasing time stamps in [0, 1]. Each
//! evaluation point only touches the observations inside its kernel window,
//! located by binary search on the sorted time stamps.
//!
//! With `u_i = (t_i − t)/h` and `N` the number of observations,
//!
//! ```text
//! S_ℓ(t) = 1/(N·h) Σ u_i^ℓ K(u_i)        R_ℓ(t) = 1/(N·h) Σ X_i u_i^ℓ K(u_i)
//! ```
//!
//! the local linear fit solves the 2×2 normal equations in closed form:
//! `μ̂ = (S₂R₀ − S₁R₁)/(S₀S₂ − S₁²)` and `D̂μ = (S₀R₁ − S₁R₀)/(h·(S₀S₂ − S₁²))`.
//! Nadaraya-Watson is the local constant fit `R₀/S₀`.

use std::f64::consts::SQRT_2;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FtsError, Result};
use crate::kernels::Kernel;
use crate::series::{Estimate, FunctionalSeries};

/// `denom ≤ SINGULAR_TOL·S₀²` is treated as a singular local linear fit.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Jackknife weights for the derivative at bandwidths `h/√2` and `h`.
pub const JACKKNIFE_DERIVATIVE_WEIGHTS: (f64, f64) =
    (SQRT_2 / (SQRT_2 - 1.0), 1.0 / (SQRT_2 - 1.0));

/// Below this many evaluation points the fit runs on the calling thread.
const PARALLEL_MIN_POINTS: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothConfig {
    pub bandwidth: f64,
    pub kernel: Kernel,
}

impl SmoothConfig {
    pub fn new(bandwidth: f64) -> Self {
        Self {
            bandwidth,
            kernel: Kernel::Quartic,
        }
    }

    pub fn with_kernel(mut self, kernel: Kernel) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.bandwidth;
        if !(h.is_finite() && h > 0.0 && h <= 1.0) {
            return Err(FtsError::InvalidConfig(format!(
                "bandwidth must lie in (0, 1], got {h}"
            )));
        }
        Ok(())
    }

    fn scaled(&self, factor: f64) -> Self {
        Self {
            bandwidth: self.bandwidth * factor,
            kernel: self.kernel.clone(),
        }
    }
}

/// Kernel-weighted design moments `S₀..S₃` and response moments `R₀, R₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightStats {
    pub s: [f64; 4],
    pub r0: Vec<f64>,
    pub r1: Vec<f64>,
    /// Observations with strictly positive kernel weight.
    pub weighted_points: usize,
}

impl WeightStats {
    pub fn denom(&self) -> f64 {
        self.s[0] * self.s[2] - self.s[1] * self.s[1]
    }
}

/// Moments at a single time `t`. An empty window yields all zeros.
pub fn weight_stats(series: &FunctionalSeries, t: f64, cfg: &SmoothConfig) -> WeightStats {
    accumulate(series, t, cfg, true)
}

fn accumulate(series: &FunctionalSeries, t: f64, cfg: &SmoothConfig, first_order: bool) -> WeightStats {
    let h = cfg.bandwidth;
    let times = series.times();
    let values = series.values();
    let p = series.dim();
    let lo = times.partition_point(|&s| s < t - h);
    let hi = times.partition_point(|&s| s <= t + h);

    let mut s = [0.0; 4];
    let mut r0 = vec![0.0; p];
    let mut r1 = if first_order { vec![0.0; p] } else { Vec::new() };
    let mut weighted_points = 0;
    for (i, &ti) in times.iter().enumerate().take(hi).skip(lo) {
        let u = (ti - t) / h;
        let w = cfg.kernel.eval(u);
        if w <= 0.0 {
            continue;
        }
        weighted_points += 1;
        let wu = w * u;
        s[0] += w;
        s[1] += wu;
        s[2] += wu * u;
        s[3] += wu * u * u;
        let row = values.row(i);
        if first_order {
            for ((a0, a1), &x) in r0.iter_mut().zip(r1.iter_mut()).zip(row.iter()) {
                *a0 += w * x;
                *a1 += wu * x;
            }
        } else {
            for (a0, &x) in r0.iter_mut().zip(row.iter()) {
                *a0 += w * x;
            }
        }
    }

    let norm = 1.0 / (series.len() as f64 * h);
    s.iter_mut().for_each(|v| *v *= norm);
    r0.iter_mut().for_each(|v| *v *= norm);
    r1.iter_mut().for_each(|v| *v *= norm);
    WeightStats {
        s,
        r0,
        r1,
        weighted_points,
    }
}

type PointFit = (Vec<f64>, Option<Vec<f64>>);

fn check_eval_times(eval: &[f64]) -> Result<()> {
    if let Some(t) = eval.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(FtsError::InvalidConfig(format!(
            "evaluation time {t} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Evaluates `fit` at every time and stacks the rows. Errors are reported for
/// the earliest failing time so the outcome does not depend on scheduling.
fn evaluate<F>(eval: &[f64], p: usize, h: f64, with_derivative: bool, fit: F) -> Result<Estimate>
where
    F: Fn(f64) -> Result<PointFit> + Sync,
{
    let rows: Vec<Result<PointFit>> = if eval.len() >= PARALLEL_MIN_POINTS {
        eval.par_iter().map(|&t| fit(t)).collect()
    } else {
        eval.iter().map(|&t| fit(t)).collect()
    };
    let n = eval.len();
    let mut mu = Array2::zeros((n, p));
    let mut dmu = with_derivative.then(|| Array2::zeros((n, p)));
    for (i, row) in rows.into_iter().enumerate() {
        let (m, d) = row?;
        mu.row_mut(i).iter_mut().zip(m).for_each(|(a, b)| *a = b);
        if let (Some(dst), Some(d)) = (dmu.as_mut(), d) {
            dst.row_mut(i).iter_mut().zip(d).for_each(|(a, b)| *a = b);
        }
    }
    Ok(Estimate {
        times: eval.to_vec(),
        mu_hat: mu,
        dmu_hat: dmu,
        interior_mask: Estimate::interior(eval, h),
        bandwidth: h,
    })
}

fn local_linear_point(series: &FunctionalSeries, t: f64, cfg: &SmoothConfig) -> Result<PointFit> {
    let st = accumulate(series, t, cfg, true);
    if st.weighted_points < 2 {
        return Err(FtsError::BandwidthTooSmall {
            h: cfg.bandwidth,
            t,
        });
    }
    let [s0, s1, s2, _] = st.s;
    let denom = st.denom();
    if denom <= SINGULAR_TOL * s0 * s0 {
        return Err(FtsError::SingularFit { t });
    }
    let hd = cfg.bandwidth * denom;
    let mu = st
        .r0
        .iter()
        .zip(&st.r1)
        .map(|(&r0, &r1)| (s2 * r0 - s1 * r1) / denom)
        .collect();
    let dmu = st
        .r0
        .iter()
        .zip(&st.r1)
        .map(|(&r0, &r1)| (s0 * r1 - s1 * r0) / hd)
        .collect();
    Ok((mu, Some(dmu)))
}

/// Local linear estimate of the mean and its derivative at the series' own
/// time stamps.
pub fn local_linear(series: &FunctionalSeries, cfg: &SmoothConfig) -> Result<Estimate> {
    local_linear_at(series, cfg, series.times())
}

/// Local linear estimate at explicit evaluation times.
pub fn local_linear_at(series: &FunctionalSeries, cfg: &SmoothConfig, eval: &[f64]) -> Result<Estimate> {
    cfg.validate()?;
    check_eval_times(eval)?;
    evaluate(eval, series.dim(), cfg.bandwidth, true, |t| {
        local_linear_point(series, t, cfg)
    })
}

fn nadaraya_watson_point(series: &FunctionalSeries, t: f64, cfg: &SmoothConfig) -> Result<PointFit> {
    let st = accumulate(series, t, cfg, false);
    if st.weighted_points == 0 {
        return Err(FtsError::EmptyWindow { t });
    }
    let s0 = st.s[0];
    Ok((st.r0.iter().map(|r| r / s0).collect(), None))
}

/// Nadaraya-Watson (local constant) estimate of the mean.
pub fn nadaraya_watson(series: &FunctionalSeries, cfg: &SmoothConfig) -> Result<Estimate> {
    nadaraya_watson_at(series, cfg, series.times())
}

pub fn nadaraya_watson_at(series: &FunctionalSeries, cfg: &SmoothConfig, eval: &[f64]) -> Result<Estimate> {
    cfg.validate()?;
    check_eval_times(eval)?;
    evaluate(eval, series.dim(), cfg.bandwidth, false, |t| {
        nadaraya_watson_point(series, t, cfg)
    })
}

/// Finite-difference derivative of an estimate on an equidistant grid:
/// central differences inside, one-sided differences at both ends.
pub fn nw_derivative(mut est: Estimate) -> Result<Estimate> {
    let n = est.times.len();
    if n < 2 {
        return Err(FtsError::InputTooShort(
            "finite differences need at least 2 evaluation times".into(),
        ));
    }
    let step = est.times[1] - est.times[0];
    for (i, w) in est.times.windows(2).enumerate() {
        let d = w[1] - w[0];
        if step <= 0.0 || step.is_nan() || (d - step).abs() > 1e-9 * step {
            return Err(FtsError::NonEquidistant {
                index: i + 1,
                step: d,
                expected: step,
            });
        }
    }
    let mu = &est.mu_hat;
    let mut d = Array2::zeros(mu.dim());
    for i in 0..n {
        let (a, b, span) = match i {
            0 => (1, 0, step),
            _ if i == n - 1 => (n - 1, n - 2, step),
            _ => (i + 1, i - 1, 2.0 * step),
        };
        let diff = (&mu.row(a) - &mu.row(b)) / span;
        d.row_mut(i).assign(&diff);
    }
    est.dmu_hat = Some(d);
    Ok(est)
}

fn jackknife_wrap(h: f64) -> impl Fn(FtsError) -> FtsError {
    move |e| match e {
        FtsError::InvalidConfig(_) => e,
        other => FtsError::JackknifeFit {
            h,
            source: Box::new(other),
        },
    }
}

/// Jackknife bias-reduced estimates of the mean and its derivative, combining
/// local linear fits at bandwidths `h/√2` and `h`.
pub fn jackknife(series: &FunctionalSeries, cfg: &SmoothConfig) -> Result<Estimate> {
    jackknife_at(series, cfg, series.times())
}

pub fn jackknife_at(series: &FunctionalSeries, cfg: &SmoothConfig, eval: &[f64]) -> Result<Estimate> {
    cfg.validate()?;
    let narrow_cfg = cfg.scaled(1.0 / SQRT_2);
    let narrow = local_linear_at(series, &narrow_cfg, eval)
        .map_err(jackknife_wrap(narrow_cfg.bandwidth))?;
    let wide = local_linear_at(series, cfg, eval).map_err(jackknife_wrap(cfg.bandwidth))?;
    Ok(combine_jackknife(&narrow, &wide))
}

/// Pointwise Jackknife combination of a narrow (`h/√2`) and wide (`h`) fit.
pub fn combine_jackknife(narrow: &Estimate, wide: &Estimate) -> Estimate {
    let mu = 2.0 * &narrow.mu_hat - &wide.mu_hat;
    let (a, b) = JACKKNIFE_DERIVATIVE_WEIGHTS;
    let dmu = match (&narrow.dmu_hat, &wide.dmu_hat) {
        (Some(dn), Some(dw)) => Some(a * dn - b * dw),
        _ => None,
    };
    Estimate {
        times: wide.times.clone(),
        mu_hat: mu,
        dmu_hat: dmu,
        interior_mask: wide.interior_mask.clone(),
        bandwidth: wide.bandwidth,
    }
}

/// Jackknife mean only (`2·μ̂_{h/√2} − μ̂_h`).
pub fn jackknife_mean(series: &FunctionalSeries, cfg: &SmoothConfig) -> Result<Estimate> {
    let mut est = jackknife(series, cfg)?;
    est.dmu_hat = None;
    Ok(est)
}

/// Jackknife derivative; the returned estimate also carries the Jackknife mean.
pub fn jackknife_derivative(series: &FunctionalSeries, cfg: &SmoothConfig) -> Result<Estimate> {
    jackknife(series, cfg)
}

/// The three smoothers, selectable at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    LocalLinear,
    Jackknife,
    NadarayaWatson,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [
        Estimator::Jackknife,
        Estimator::LocalLinear,
        Estimator::NadarayaWatson,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Estimator::LocalLinear => "ll",
            Estimator::Jackknife => "jackknife",
            Estimator::NadarayaWatson => "nw",
        }
    }

    /// Mean estimate at arbitrary evaluation times.
    pub fn fit_mean_at(self, series: &FunctionalSeries, cfg: &SmoothConfig, eval: &[f64]) -> Result<Estimate> {
        match self {
            Estimator::LocalLinear => local_linear_at(series, cfg, eval),
            Estimator::Jackknife => jackknife_at(series, cfg, eval),
            Estimator::NadarayaWatson => nadaraya_watson_at(series, cfg, eval),
        }
    }

    /// Mean and derivative at the series' own time stamps. Nadaraya-Watson
    /// derives its derivative by finite differences, which needs equidistant
    /// time stamps.
    pub fn fit(self, series: &FunctionalSeries, cfg: &SmoothConfig) -> Result<Estimate> {
        match self {
            Estimator::LocalLinear => local_linear(series, cfg),
            Estimator::Jackknife => jackknife(series, cfg),
            Estimator::NadarayaWatson => nw_derivative(nadaraya_watson(series, cfg)?),
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = FtsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ll" | "local_linear" | "local-linear" => Ok(Estimator::LocalLinear),
            "jk" | "jackknife" => Ok(Estimator::Jackknife),
            "nw" | "nadaraya_watson" | "nadaraya-watson" => Ok(Estimator::NadarayaWatson),
            other => Err(FtsError::InvalidConfig(format!("unknown estimator '{other}'"))),
        }
    }
}

impl std::fmt::Display for Estimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}
