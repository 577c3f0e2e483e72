//! Synthetic functional time series and the seeded Monte Carlo study.
//!
//! Observations follow `X_i(x) = μ(i/n, x) + ε_i(x)` on the spatial grid
//! `x_j = j/(m−1)`. Errors are built from i.i.d. Brownian motions or bridges,
//! optionally passed through the functional autoregression
//! `ε_i = ρ(ε_{i−1}) + η_i` with the integral operator
//! `ρ(f)(y) = ∫ 0.3·√6·min(x, y)·f(x) dx`, and optionally scaled by the
//! time-varying coefficient `σ(t) = t + 1/2`.
//!
//! Every replication draws from its own ChaCha stream, keyed by
//! `(master_seed, rep, stream)`, so replications can run in any order or in
//! parallel and still produce identical numbers.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::metrics;
use crate::bandwidth::{cross_validate, CvConfig};
use crate::error::{FtsError, Result};
use crate::estimators::{Estimator, SmoothConfig};
use crate::kernels::Kernel;
use crate::series::{equidistant_times, FunctionalSeries, Norm, ValueGrid};

/// Default number of discarded warm-up steps for the autoregressive errors.
pub const DEFAULT_BURN_IN: usize = 50;

const STREAMS_PER_REP: u64 = 16;
const ERROR_STREAM: u64 = 0;

type SurfaceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A user supplied mean surface `μ(t, x)` with its time derivative.
#[derive(Clone)]
pub struct CustomMean {
    pub name: String,
    eval: SurfaceFn,
    d_eval: SurfaceFn,
}

impl CustomMean {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        d_eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            d_eval: Arc::new(d_eval),
        }
    }
}

/// Mean operator `t ↦ μ(t, ·)`.
#[derive(Clone)]
pub enum MeanOperator {
    /// `sin(2πx) + t²`
    Mu1,
    /// `φ(x) + (t − ½)² + sin(10πt)/10 + ¾`
    Mu2,
    Custom(CustomMean),
}

impl fmt::Debug for MeanOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanOperator::Mu1 => f.write_str("Mu1"),
            MeanOperator::Mu2 => f.write_str("Mu2"),
            MeanOperator::Custom(c) => write!(f, "Custom({})", c.name),
        }
    }
}

/// Spatial profile of the second mean operator.
pub fn phi(x: f64) -> f64 {
    (((-8.0 * x + 16.0) * x - 11.0) * x + 3.0) * x + 1.0
}

impl MeanOperator {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            MeanOperator::Mu1 => (2.0 * PI * x).sin() + t * t,
            MeanOperator::Mu2 => {
                phi(x) + (t - 0.5).powi(2) + 0.1 * (10.0 * PI * t).sin() + 0.75
            }
            MeanOperator::Custom(c) => (c.eval)(t, x),
        }
    }

    /// Analytic time derivative `∂μ/∂t`.
    pub fn d_eval(&self, t: f64, x: f64) -> f64 {
        match self {
            MeanOperator::Mu1 => 2.0 * t,
            MeanOperator::Mu2 => 2.0 * (t - 0.5) + PI * (10.0 * PI * t).cos(),
            MeanOperator::Custom(c) => (c.d_eval)(t, x),
        }
    }

    /// `sin(2πx) + t`, reproduced exactly by local linear fits. Useful as a
    /// zero-bias baseline together with [`ErrorKind::Zero`].
    pub fn affine() -> Self {
        MeanOperator::Custom(CustomMean::new("affine", |t, x| (2.0 * PI * x).sin() + t, |_, _| 1.0))
    }

    pub fn name(&self) -> &str {
        match self {
            MeanOperator::Mu1 => "mu1",
            MeanOperator::Mu2 => "mu2",
            MeanOperator::Custom(c) => &c.name,
        }
    }
}

impl std::str::FromStr for MeanOperator {
    type Err = FtsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mu1" => Ok(MeanOperator::Mu1),
            "mu2" => Ok(MeanOperator::Mu2),
            "affine" => Ok(MeanOperator::affine()),
            other => Err(FtsError::InvalidConfig(format!("unknown mean operator '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// i.i.d. Brownian motions.
    Bm,
    /// i.i.d. Brownian bridges.
    Bb,
    /// `ε_i = ρ(ε_{i−1}) + η_i` with Brownian motion innovations.
    FarBm,
    /// `ε_i = ρ(ε_{i−1}) + η_i` with Brownian bridge innovations.
    FarBb,
    /// `ε_i = σ(i/n)·η_i`.
    TvBm,
    /// `ε_i = ρ(ε_{i−1}) + σ(i/n)·η_i`.
    TvFar1,
    /// `ε_i = σ(i/n)·ρ(ε_{i−1}) + η_i`.
    TvFar2,
    /// Identically zero, for noise-free checks.
    Zero,
}

impl ErrorKind {
    /// Every process except [`ErrorKind::Zero`].
    pub const STOCHASTIC: [ErrorKind; 7] = [
        ErrorKind::Bm,
        ErrorKind::Bb,
        ErrorKind::FarBm,
        ErrorKind::FarBb,
        ErrorKind::TvBm,
        ErrorKind::TvFar1,
        ErrorKind::TvFar2,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ErrorKind::Bm => "bm",
            ErrorKind::Bb => "bb",
            ErrorKind::FarBm => "far_bm",
            ErrorKind::FarBb => "far_bb",
            ErrorKind::TvBm => "tv_bm",
            ErrorKind::TvFar1 => "tv_far1",
            ErrorKind::TvFar2 => "tv_far2",
            ErrorKind::Zero => "zero",
        }
    }

    fn is_autoregressive(self) -> bool {
        matches!(
            self,
            ErrorKind::FarBm | ErrorKind::FarBb | ErrorKind::TvFar1 | ErrorKind::TvFar2
        )
    }
}

impl std::str::FromStr for ErrorKind {
    type Err = FtsError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        let kind = match key.as_str() {
            "bm" => ErrorKind::Bm,
            "bb" => ErrorKind::Bb,
            "far_bm" | "farbm" => ErrorKind::FarBm,
            "far_bb" | "farbb" => ErrorKind::FarBb,
            "tv_bm" | "tvbm" => ErrorKind::TvBm,
            "tv_far1" | "tvfar1" => ErrorKind::TvFar1,
            "tv_far2" | "tvfar2" => ErrorKind::TvFar2,
            "zero" | "none" => ErrorKind::Zero,
            other => return Err(FtsError::InvalidConfig(format!("unknown error process '{other}'"))),
        };
        Ok(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorProcess {
    pub kind: ErrorKind,
    /// Discarded warm-up steps of the autoregressive variants.
    pub burn_in: usize,
}

impl ErrorProcess {
    pub fn new(kind: ErrorKind) -> Self {
        Self {
            kind,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }
}

/// Time-varying scale `σ(t) = t + 1/2`.
pub fn sigma(t: f64) -> f64 {
    t + 0.5
}

/// Brownian motion on the grid `j/(m−1)`, starting at zero.
pub fn sample_bm<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    assert!(m >= 2, "Brownian motion needs at least 2 grid points");
    let sd = (1.0 / (m - 1) as f64).sqrt();
    let mut path = Vec::with_capacity(m);
    let mut w = 0.0;
    path.push(w);
    for _ in 1..m {
        let z: f64 = rng.sample(StandardNormal);
        w += sd * z;
        path.push(w);
    }
    path
}

/// Brownian bridge `W(x) − x·W(1)` from a fresh Brownian motion.
pub fn sample_bb<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    let mut path = sample_bm(m, rng);
    let end = path[m - 1];
    for (j, v) in path.iter_mut().enumerate() {
        *v -= j as f64 / (m - 1) as f64 * end;
    }
    path
}

/// Discretization of `ρ(f)(y) = ∫₀¹ 0.3·√6·min(x, y)·f(x) dx` with the
/// trapezoidal rule on the grid `j/(m−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoOperator {
    matrix: Array2<f64>,
}

impl RhoOperator {
    pub fn new(m: usize) -> Self {
        assert!(m >= 2, "integral operator needs at least 2 grid points");
        let grid = ValueGrid::new(1, m).points();
        let dx = 1.0 / (m - 1) as f64;
        let c = 0.3 * 6f64.sqrt();
        let matrix = Array2::from_shape_fn((m, m), |(row, col)| {
            let w = if col == 0 || col == m - 1 { dx / 2.0 } else { dx };
            w * c * grid[row].min(grid[col])
        });
        Self { matrix }
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.matrix
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(f).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// One-off application of the integral operator.
pub fn apply_rho(f: &[f64]) -> Vec<f64> {
    RhoOperator::new(f.len()).apply(f)
}

/// `n × m` matrix of errors for the given process.
///
/// Autoregressive variants start from a fresh innovation and discard
/// `burn_in` steps. During warm-up the time-varying coefficient is frozen at
/// `σ(1/n)`; the emitted rows use `σ(i/n)` for `i = 1..=n`.
pub fn gen_errors<R: Rng + ?Sized>(process: &ErrorProcess, n: usize, m: usize, rng: &mut R) -> Array2<f64> {
    let kind = process.kind;
    let mut out = Array2::zeros((n, m));
    if kind == ErrorKind::Zero {
        return out;
    }
    let innovation = |rng: &mut R| match kind {
        ErrorKind::Bb | ErrorKind::FarBb => sample_bb(m, rng),
        _ => sample_bm(m, rng),
    };
    let rho = kind.is_autoregressive().then(|| RhoOperator::new(m));
    let step = |prev: &[f64], s: f64, rng: &mut R| -> Vec<f64> {
        let eta = innovation(rng);
        let Some(rho) = rho.as_ref() else {
            return match kind {
                ErrorKind::TvBm => eta.iter().map(|v| s * v).collect(),
                _ => eta,
            };
        };
        let r = rho.apply(prev);
        match kind {
            ErrorKind::TvFar1 => r.iter().zip(&eta).map(|(a, b)| a + s * b).collect(),
            ErrorKind::TvFar2 => r.iter().zip(&eta).map(|(a, b)| s * a + b).collect(),
            _ => r.iter().zip(&eta).map(|(a, b)| a + b).collect(),
        }
    };

    let mut prev = if rho.is_some() {
        let mut e = innovation(rng);
        let s0 = sigma(1.0 / n as f64);
        for _ in 0..process.burn_in {
            e = step(&e, s0, rng);
        }
        e
    } else {
        Vec::new()
    };
    for i in 0..n {
        let e = step(&prev, sigma((i + 1) as f64 / n as f64), rng);
        out.row_mut(i).iter_mut().zip(&e).for_each(|(a, b)| *a = *b);
        prev = e;
    }
    out
}

/// Random stream for one `(master_seed, rep, stream)` triple.
pub fn stream_rng(master_seed: u64, rep: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(rep.wrapping_mul(STREAMS_PER_REP).wrapping_add(stream));
    rng
}

#[derive(Debug, Clone)]
pub struct SimSpec {
    pub mean: MeanOperator,
    pub errors: ErrorProcess,
    pub n: usize,
    pub m: usize,
    pub reps: usize,
    pub master_seed: u64,
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 10 || self.m < 2 || self.reps < 1 {
            return Err(FtsError::InvalidConfig(format!(
                "need n >= 10, m >= 2, reps >= 1; got n = {}, m = {}, reps = {}",
                self.n, self.m, self.reps
            )));
        }
        Ok(())
    }
}

/// One simulated trajectory together with the true mean and derivative.
#[derive(Debug, Clone)]
pub struct SimSample {
    pub series: FunctionalSeries,
    pub truth_mu: Array2<f64>,
    pub truth_dmu: Array2<f64>,
}

/// Replication `rep` of the simulation described by `spec`.
pub fn gen_series(spec: &SimSpec, rep: usize) -> Result<SimSample> {
    spec.validate()?;
    if rep >= spec.reps {
        return Err(FtsError::InvalidConfig(format!(
            "replication {rep} out of range for {} reps",
            spec.reps
        )));
    }
    let (n, m) = (spec.n, spec.m);
    let times = equidistant_times(n);
    let grid = ValueGrid::new(1, m);
    let xs = grid.points();
    let truth_mu = Array2::from_shape_fn((n, m), |(i, j)| spec.mean.eval(times[i], xs[j]));
    let truth_dmu = Array2::from_shape_fn((n, m), |(i, j)| spec.mean.d_eval(times[i], xs[j]));
    let mut rng = stream_rng(spec.master_seed, rep as u64, ERROR_STREAM);
    let errors = gen_errors(&spec.errors, n, m, &mut rng);
    let series = FunctionalSeries::new(times, &truth_mu + &errors, grid, Norm::L2)?;
    Ok(SimSample {
        series,
        truth_mu,
        truth_dmu,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Mu,
    Dmu,
}

impl Target {
    pub fn label(self) -> &'static str {
        match self {
            Target::Mu => "mu",
            Target::Dmu => "dmu",
        }
    }
}

/// Errors of one estimator on one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepMetrics {
    pub bandwidth: f64,
    pub fit_ms: f64,
    pub mse_mu: f64,
    pub mae_mu: f64,
    pub mse_dmu: f64,
    pub mae_dmu: f64,
}

/// Selects `h` by cross-validation, fits, and scores against the truth.
pub fn evaluate_replication(
    sample: &SimSample,
    estimator: Estimator,
    cv: &CvConfig,
    kernel: &Kernel,
) -> Result<RepMetrics> {
    let report = cross_validate(&sample.series, &cv.with_estimator(estimator), kernel)?;
    let cfg = SmoothConfig::new(report.best_h).with_kernel(kernel.clone());
    let start = Instant::now();
    let est = estimator.fit(&sample.series, &cfg)?;
    let fit_ms = start.elapsed().as_secs_f64() * 1e3;
    let mu = metrics(est.mu_hat.view(), sample.truth_mu.view())?;
    let dmu_hat = est
        .dmu_hat
        .as_ref()
        .ok_or_else(|| FtsError::InvalidConfig(format!("{estimator} produced no derivative")))?;
    let dmu = metrics(dmu_hat.view(), sample.truth_dmu.view())?;
    Ok(RepMetrics {
        bandwidth: report.best_h,
        fit_ms,
        mse_mu: mu.mse,
        mae_mu: mu.mae,
        mse_dmu: dmu.mse,
        mae_dmu: dmu.mae,
    })
}

/// Aggregated errors of one (estimator, target) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub estimator: Estimator,
    pub target: Target,
    pub mean_op: String,
    pub errors: ErrorKind,
    pub n: usize,
    pub m: usize,
    pub reps: usize,
    /// Replications that finished without error.
    pub completed: usize,
    pub mean_mse: f64,
    pub sd_mse: f64,
    pub mean_mae: f64,
    pub sd_mae: f64,
    pub mean_fit_ms: f64,
    pub mean_h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub rows: Vec<ResultRow>,
    /// Failed replications per estimator, in the order estimators were given.
    pub failures: Vec<(Estimator, usize)>,
    pub first_failure: Option<String>,
}

impl ResultsTable {
    pub fn row(&self, estimator: Estimator, target: Target) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.estimator == estimator && r.target == target)
    }

    pub fn total_failures(&self) -> usize {
        self.failures.iter().map(|(_, c)| c).sum()
    }
}

/// Mean and sample standard deviation, summed in index order.
fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs `spec.reps` replications, each with per-estimator bandwidth selection.
///
/// Replications run in parallel; aggregation is a fixed-order reduction over
/// the replication index, so the table does not depend on thread count.
/// Derivative targets reuse the bandwidth chosen for the mean.
pub fn monte_carlo(
    spec: &SimSpec,
    estimators: &[Estimator],
    cv: &CvConfig,
    kernel: &Kernel,
) -> Result<ResultsTable> {
    spec.validate()?;
    cv.validate(spec.n)?;
    if estimators.is_empty() {
        return Err(FtsError::InvalidConfig("no estimators selected".into()));
    }
    let outcomes: Vec<Vec<Result<RepMetrics>>> = (0..spec.reps)
        .into_par_iter()
        .map(|rep| match gen_series(spec, rep) {
            Ok(sample) => estimators
                .iter()
                .map(|&e| evaluate_replication(&sample, e, cv, kernel))
                .collect(),
            Err(e) => vec![Err(e); estimators.len()],
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut first_failure = None;
    for (k, &estimator) in estimators.iter().enumerate() {
        let mut ok = Vec::new();
        let mut failed = 0;
        for (rep, outcome) in outcomes.iter().enumerate() {
            match &outcome[k] {
                Ok(m) => ok.push(*m),
                Err(e) => {
                    failed += 1;
                    first_failure.get_or_insert_with(|| format!("rep {rep}, {estimator}: {e}"));
                }
            }
        }
        failures.push((estimator, failed));
        let col = |f: fn(&RepMetrics) -> f64| ok.iter().map(f).collect::<Vec<_>>();
        let (mean_fit_ms, _) = mean_sd(&col(|m| m.fit_ms));
        let (mean_h, _) = mean_sd(&col(|m| m.bandwidth));
        for target in [Target::Mu, Target::Dmu] {
            let (mse, mae) = match target {
                Target::Mu => (col(|m| m.mse_mu), col(|m| m.mae_mu)),
                Target::Dmu => (col(|m| m.mse_dmu), col(|m| m.mae_dmu)),
            };
            let (mean_mse, sd_mse) = mean_sd(&mse);
            let (mean_mae, sd_mae) = mean_sd(&mae);
            rows.push(ResultRow {
                estimator,
                target,
                mean_op: spec.mean.name().to_string(),
                errors: spec.errors.kind,
                n: spec.n,
                m: spec.m,
                reps: spec.reps,
                completed: ok.len(),
                mean_mse,
                sd_mse,
                mean_mae,
                sd_mae,
                mean_fit_ms,
                mean_h,
            });
        }
    }
    Ok(ResultsTable {
        rows,
        failures,
        first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_operators() {
        let mu1 = MeanOperator::Mu1;
        assert_eq!(mu1.eval(0.0, 0.25), 1.0);
        assert_eq!(mu1.eval(0.5, 0.0), 0.25);
        assert_eq!(mu1.d_eval(0.3, 0.9), 0.6);
        let mu2 = MeanOperator::Mu2;
        assert_eq!(phi(0.0), 1.0);
        assert_eq!(phi(1.0), 1.0);
        assert!((mu2.eval(0.5, 0.0) - 1.75).abs() < 1e-12);
        // d/dt at t = 0: 2(−½) + π·cos 0
        assert!((mu2.d_eval(0.0, 0.3) - (PI - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let eps = 1e-6;
        for op in [MeanOperator::Mu1, MeanOperator::Mu2] {
            for &(t, x) in &[(0.1, 0.2), (0.47, 0.9), (0.8, 0.5)] {
                let fd = (op.eval(t + eps, x) - op.eval(t - eps, x)) / (2.0 * eps);
                assert!((fd - op.d_eval(t, x)).abs() < 1e-6, "{op:?} at {t}");
            }
        }
    }

    #[test]
    fn bm_and_bb_pinning() {
        let mut rng = stream_rng(1, 0, 0);
        let w = sample_bm(50, &mut rng);
        assert_eq!(w[0], 0.0);
        let b = sample_bb(50, &mut rng);
        assert_eq!(b[0], 0.0);
        assert!(b[49].abs() < 1e-15);
    }

    #[test]
    fn rho_on_constants() {
        assert!(apply_rho(&[0.0; 10]).iter().all(|v| *v == 0.0));
        let m = 100;
        let r = apply_rho(&vec![1.0; m]);
        let c = 0.3 * 6f64.sqrt();
        let grid = ValueGrid::new(1, m).points();
        for (y, v) in grid.iter().zip(&r) {
            assert!((v - c * (y - y * y / 2.0)).abs() < 1e-3);
        }
        assert!((r[m - 1] - 0.3674).abs() < 1e-3);
    }

    #[test]
    fn rho_is_linear() {
        let mut rng = stream_rng(3, 1, 2);
        let f = sample_bm(40, &mut rng);
        let g = sample_bb(40, &mut rng);
        let a = -1.7;
        let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + y).collect();
        let lhs = apply_rho(&combo);
        let (rf, rg) = (apply_rho(&f), apply_rho(&g));
        for j in 0..40 {
            assert!((lhs[j] - (a * rf[j] + rg[j])).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_noise_series_equals_truth() {
        let spec = SimSpec {
            mean: MeanOperator::Mu2,
            errors: ErrorProcess::new(ErrorKind::Zero),
            n: 20,
            m: 7,
            reps: 2,
            master_seed: 5,
        };
        let s = gen_series(&spec, 1).unwrap();
        assert_eq!(s.series.values(), &s.truth_mu);
        assert!(gen_series(&spec, 2).is_err());
    }

    #[test]
    fn mu1_first_row() {
        let spec = SimSpec {
            mean: MeanOperator::Mu1,
            errors: ErrorProcess::new(ErrorKind::Zero),
            n: 10,
            m: 5,
            reps: 1,
            master_seed: 0,
        };
        let s = gen_series(&spec, 0).unwrap();
        // First stamp is t = 1/n; subtract t² to recover sin(2πx).
        for (j, x) in ValueGrid::new(1, 5).points().iter().enumerate() {
            let v = s.truth_mu[[0, j]] - 0.01;
            assert!((v - (2.0 * PI * x).sin()).abs() < 1e-12);
        }
        assert!((MeanOperator::Mu1.eval(0.0, 0.25) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn replications_are_reproducible() {
        let spec = SimSpec {
            mean: MeanOperator::Mu1,
            errors: ErrorProcess::new(ErrorKind::TvFar2),
            n: 30,
            m: 12,
            reps: 3,
            master_seed: 99,
        };
        let a = gen_series(&spec, 2).unwrap();
        let b = gen_series(&spec, 2).unwrap();
        assert_eq!(a.series, b.series);
        let c = gen_series(&spec, 1).unwrap();
        assert_ne!(a.series, c.series);
    }

    #[test]
    fn parse_labels() {
        for kind in ErrorKind::STOCHASTIC {
            assert_eq!(kind.label().parse::<ErrorKind>().unwrap(), kind);
        }
        assert_eq!("FAR-BM".parse::<ErrorKind>().unwrap(), ErrorKind::FarBm);
        assert!("ou".parse::<ErrorKind>().is_err());
        assert!("mu3".parse::<MeanOperator>().is_err());
    }

    #[test]
    fn spec_validation() {
        let mut spec = SimSpec {
            mean: MeanOperator::Mu1,
            errors: ErrorProcess::new(ErrorKind::Bm),
            n: 9,
            m: 2,
            reps: 1,
            master_seed: 0,
        };
        assert!(spec.validate().is_err());
        spec.n = 10;
        assert!(spec.validate().is_ok());
        spec.reps = 0;
        assert!(spec.validate().is_err());
    }
}
