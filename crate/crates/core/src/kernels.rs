//! Kernel functions on [-1, 1] and their moments.
//!
//! Every kernel here is non-negative, symmetric and supported on [-1, 1].
//! Besides plain evaluation, the module exposes the Jackknife-combined kernel
//! `K*(x) = 2√2·K(√2·x) − K(x)`, whose second moment vanishes. That
//! cancellation is what lets the Jackknife mean estimator remove the
//! leading `h²` bias term of the local linear fit.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use crate::error::{FtsError, Result};

/// Number of nodes used by the composite Simpson rule (odd, so 2048 panels).
pub const SIMPSON_NODES: usize = 2049;

/// Tolerance for the normalization check of tabulated kernels.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A symmetric, compactly supported kernel.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Kernel {
    /// `K(x) = 15/16·(1 − x²)²` on [-1, 1].
    #[default]
    Quartic,
    /// Tabulated kernel, linearly interpolated between equally spaced nodes.
    Custom(TabulatedKernel),
}

/// Kernel values on an equally spaced grid spanning [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedKernel {
    values: Arc<[f64]>,
}

impl TabulatedKernel {
    /// Validates a table of kernel values at `-1 + 2j/(len-1)`.
    ///
    /// The table must be finite, non-negative, symmetric and integrate to one
    /// (within [`NORMALIZATION_TOL`]). It is never rescaled.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(FtsError::InvalidKernel(format!(
                "need at least 3 nodes, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(FtsError::InvalidKernel(format!(
                "kernel values must be finite and non-negative, found {v}"
            )));
        }
        let scale = values.iter().cloned().fold(0.0_f64, f64::max).max(1.0);
        let n = values.len();
        for j in 0..n / 2 {
            if (values[j] - values[n - 1 - j]).abs() > 1e-12 * scale {
                return Err(FtsError::InvalidKernel(format!(
                    "table is not symmetric at node {j}"
                )));
            }
        }
        let table = Self {
            values: values.into(),
        };
        let mass = table.moment(0);
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(FtsError::InvalidKernel(format!(
                "kernel integrates to {mass}, expected 1"
            )));
        }
        Ok(table)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn step(&self) -> f64 {
        2.0 / (self.values.len() - 1) as f64
    }

    fn eval(&self, x: f64) -> f64 {
        if !(-1.0..=1.0).contains(&x) {
            return 0.0;
        }
        // Evaluate on |x| so that symmetry holds bit-for-bit.
        let n = self.values.len();
        let pos = (x.abs() + 1.0) / self.step();
        let j = (pos.floor() as usize).min(n - 2);
        let frac = pos - j as f64;
        self.values[j] * (1.0 - frac) + self.values[j + 1] * frac
    }

    /// Exact integral of `x^ell` times the piecewise linear interpolant.
    fn moment(&self, ell: u32) -> f64 {
        let step = self.step();
        let p = ell as i32;
        let mut acc = 0.0;
        for (j, w) in self.values.windows(2).enumerate() {
            let a = -1.0 + j as f64 * step;
            let b = a + step;
            let slope = (w[1] - w[0]) / step;
            let intercept = w[0] - slope * a;
            acc += intercept * (b.powi(p + 1) - a.powi(p + 1)) / f64::from(ell + 1)
                + slope * (b.powi(p + 2) - a.powi(p + 2)) / f64::from(ell + 2);
        }
        acc
    }
}

/// Second and third moments of a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMoments {
    pub kappa2: f64,
    pub kappa3: f64,
}

impl Kernel {
    /// Builds a tabulated kernel, see [`TabulatedKernel::new`].
    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        TabulatedKernel::new(values).map(Kernel::Custom)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Kernel::Quartic => {
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    let q = 1.0 - x * x;
                    0.9375 * q * q
                }
            }
            Kernel::Custom(t) => t.eval(x),
        }
    }

    /// The Jackknife kernel `2√2·K(√2·x) − K(x)`.
    #[inline]
    pub fn eval_star(&self, x: f64) -> f64 {
        2.0 * SQRT_2 * self.eval(SQRT_2 * x) - self.eval(x)
    }

    /// `∫ x^ell K(x) dx` over [-1, 1].
    pub fn moment(&self, ell: u32) -> f64 {
        match self {
            Kernel::Quartic => simpson(|x| x.powi(ell as i32) * self.eval(x), -1.0, 1.0),
            Kernel::Custom(t) => t.moment(ell),
        }
    }

    /// `∫ x^ell K*(x) dx` over [-1, 1].
    ///
    /// The scaled term is integrated over its own support [-1/√2, 1/√2] so the
    /// quadrature never straddles the kink of `K(√2·x)`.
    pub fn moment_star(&self, ell: u32) -> f64 {
        let r = 1.0 / SQRT_2;
        let scaled = match self {
            Kernel::Quartic => simpson(|x| x.powi(ell as i32) * self.eval(SQRT_2 * x), -r, r),
            // Substitute y = √2·x in the exact piecewise integral.
            Kernel::Custom(t) => t.moment(ell) / SQRT_2.powi(ell as i32 + 1),
        };
        2.0 * SQRT_2 * scaled - self.moment(ell)
    }

    pub fn moments(&self) -> KernelMoments {
        KernelMoments {
            kappa2: self.moment(2),
            kappa3: self.moment(3),
        }
    }
}

/// Composite Simpson rule on [a, b] with [`SIMPSON_NODES`] nodes.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let panels = SIMPSON_NODES - 1;
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for j in 1..panels {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + j as f64 * h);
    }
    acc * h / 3.0
}
