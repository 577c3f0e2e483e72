//! Discretized functional time series and smoothing output.

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{FtsError, Result};

/// How the norm on the value space is discretized.
///
/// L1 is the mean absolute value over the grid, L2 the root mean square and
/// Sup the maximum absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    #[default]
    L2,
    Sup,
}

impl Norm {
    pub fn of(self, row: impl IntoIterator<Item = f64>) -> f64 {
        let mut count = 0usize;
        let mut acc = 0.0_f64;
        for v in row {
            count += 1;
            match self {
                Norm::L1 => acc += v.abs(),
                Norm::L2 => acc += v * v,
                Norm::Sup => acc = acc.max(v.abs()),
            }
        }
        if count == 0 {
            return 0.0;
        }
        match self {
            Norm::L1 => acc / count as f64,
            Norm::L2 => (acc / count as f64).sqrt(),
            Norm::Sup => acc,
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = FtsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "sup" | "linf" => Ok(Norm::Sup),
            other => Err(FtsError::InvalidConfig(format!("unknown norm '{other}'"))),
        }
    }
}

/// Layout of the flattened value dimension: `d` curves on `m` grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueGrid {
    pub d: usize,
    pub m: usize,
}

impl ValueGrid {
    pub fn new(d: usize, m: usize) -> Self {
        Self { d, m }
    }

    /// Total flattened dimension `d·m`.
    pub fn dim(&self) -> usize {
        self.d * self.m
    }

    /// Spatial grid points `j/(m−1)`.
    pub fn points(&self) -> Vec<f64> {
        if self.m == 1 {
            return vec![0.0];
        }
        (0..self.m).map(|j| j as f64 / (self.m - 1) as f64).collect()
    }
}

/// `n` observations of a `P`-dimensional discretized function, indexed by
/// strictly increasing time stamps in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSeries {
    times: Vec<f64>,
    values: Array2<f64>,
    grid: ValueGrid,
    norm: Norm,
}

impl FunctionalSeries {
    pub fn new(times: Vec<f64>, values: Array2<f64>, grid: ValueGrid, norm: Norm) -> Result<Self> {
        let (n, p) = values.dim();
        if times.len() != n {
            return Err(FtsError::InvalidSeries(format!(
                "{} time stamps for {n} observations",
                times.len()
            )));
        }
        if n == 0 || p == 0 {
            return Err(FtsError::InvalidSeries("series is empty".into()));
        }
        if grid.dim() != p {
            return Err(FtsError::InvalidSeries(format!(
                "value grid {}x{} does not match {p} columns",
                grid.d, grid.m
            )));
        }
        if let Some(t) = times.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(FtsError::InvalidSeries(format!("time stamp {t} outside [0, 1]")));
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(FtsError::InvalidSeries(format!(
                "time stamps not strictly increasing at index {}",
                i + 1
            )));
        }
        if let Some(((i, j), _)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(FtsError::InvalidSeries(format!("non-finite value at ({i}, {j})")));
        }
        Ok(Self {
            times,
            values,
            grid,
            norm,
        })
    }

    /// Observations at `i/n` for `i = 1..=n`, treated as one curve on `P` points.
    pub fn equidistant(values: Array2<f64>) -> Result<Self> {
        let (n, p) = values.dim();
        Self::new(equidistant_times(n), values, ValueGrid::new(1, p), Norm::default())
    }

    pub fn with_grid(mut self, grid: ValueGrid) -> Result<Self> {
        if grid.dim() != self.dim() {
            return Err(FtsError::InvalidSeries(format!(
                "value grid {}x{} does not match {} columns",
                grid.d,
                grid.m,
                self.dim()
            )));
        }
        self.grid = grid;
        Ok(self)
    }

    pub fn with_norm(mut self, norm: Norm) -> Self {
        self.norm = norm;
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn grid(&self) -> ValueGrid {
        self.grid
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Flattened value dimension `P`.
    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    /// Sub-series made of the given (increasing) row indices.
    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        let times = rows.iter().map(|&i| self.times[i]).collect();
        let values = self.values.select(Axis(0), rows);
        Self::new(times, values, self.grid, self.norm)
    }
}

/// `i/n` for `i = 1..=n`.
pub fn equidistant_times(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / n as f64).collect()
}

/// Smoothed mean (and optionally derivative) at a set of evaluation times.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub times: Vec<f64>,
    pub mu_hat: Array2<f64>,
    pub dmu_hat: Option<Array2<f64>>,
    /// `h ≤ t ≤ 1 − h`, where kernel windows are not truncated.
    pub interior_mask: Vec<bool>,
    pub bandwidth: f64,
}

impl Estimate {
    pub(crate) fn interior(times: &[f64], h: f64) -> Vec<bool> {
        times.iter().map(|&t| h <= t && t <= 1.0 - h).collect()
    }
}
