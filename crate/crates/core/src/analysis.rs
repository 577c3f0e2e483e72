//! Error metrics, residual norm series, CUSUM change-point location, outlier
//! peaks, and sliding-window embedding of raw multichannel signals.

use std::ops::Range;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{FtsError, Result};
use crate::series::{equidistant_times, Estimate, FunctionalSeries, Norm, ValueGrid};

/// Default MAD multiplier for [`detect_peaks`].
pub const DEFAULT_PEAK_THRESHOLD: f64 = 5.0;

/// Scale factor making the MAD a consistent estimate of a Gaussian sd.
const MAD_SCALE: f64 = 1.482_602_218_505_602;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub mse: f64,
    pub mae: f64,
    /// Mean squared error of each row.
    pub per_time: Vec<f64>,
}

fn check_shapes(est: &ArrayView2<f64>, truth: &ArrayView2<f64>) -> Result<()> {
    if est.dim() != truth.dim() {
        return Err(FtsError::ShapeMismatch(format!(
            "{:?} vs {:?}",
            est.dim(),
            truth.dim()
        )));
    }
    if est.is_empty() {
        return Err(FtsError::ShapeMismatch("empty matrices".into()));
    }
    Ok(())
}

/// MSE and MAE averaged over rows and grid points.
pub fn metrics(est: ArrayView2<f64>, truth: ArrayView2<f64>) -> Result<MetricReport> {
    check_shapes(&est, &truth)?;
    let (n, p) = est.dim();
    let mut per_time = Vec::with_capacity(n);
    let mut abs_total = 0.0;
    for (a, b) in est.rows().into_iter().zip(truth.rows()) {
        let mut sq = 0.0;
        let mut ab = 0.0;
        for (x, y) in a.iter().zip(b.iter()) {
            let d = x - y;
            sq += d * d;
            ab += d.abs();
        }
        per_time.push(sq / p as f64);
        abs_total += ab / p as f64;
    }
    let mse = per_time.iter().sum::<f64>() / n as f64;
    Ok(MetricReport {
        mse,
        mae: abs_total / n as f64,
        per_time,
    })
}

/// `(1/n) Σ_i (1/P) Σ_j (est − truth)²`
pub fn mse(est: ArrayView2<f64>, truth: ArrayView2<f64>) -> Result<f64> {
    metrics(est, truth).map(|r| r.mse)
}

/// `(1/n) Σ_i (1/P) Σ_j |est − truth|`
pub fn mae(est: ArrayView2<f64>, truth: ArrayView2<f64>) -> Result<f64> {
    metrics(est, truth).map(|r| r.mae)
}

/// `‖X_i − μ̂(t_i)‖` for every observation under the discretized norm.
pub fn residual_norms(series: &FunctionalSeries, smoothed: &Estimate, norm: Norm) -> Result<Vec<f64>> {
    let (x, mu) = (series.values().view(), smoothed.mu_hat.view());
    check_shapes(&x, &mu)?;
    Ok(x.rows()
        .into_iter()
        .zip(mu.rows())
        .map(|(a, b)| norm.of(a.iter().zip(b.iter()).map(|(p, q)| p - q)))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CusumResult {
    /// `process[k−1] = (1/√n)·(Σ_{i≤k} z_i − (k/n)·Σ_{i≤n} z_i)` for `k = 1..=n`.
    pub process: Vec<f64>,
    /// The `k` (1-based) maximizing `|process|`; the change happens after
    /// observation `k`. Ties go to the smallest `k`.
    pub argmax_index: usize,
    pub max_value: f64,
}

pub fn cusum(z: &[f64]) -> Result<CusumResult> {
    let n = z.len();
    if n < 2 {
        return Err(FtsError::InputTooShort(format!(
            "CUSUM needs at least 2 values, got {n}"
        )));
    }
    let total: f64 = z.iter().sum();
    let scale = 1.0 / (n as f64).sqrt();
    let mut partial = 0.0;
    let mut process = Vec::with_capacity(n);
    for (k, v) in z.iter().enumerate() {
        partial += v;
        process.push(scale * (partial - (k + 1) as f64 / n as f64 * total));
    }
    let (mut argmax, mut max_value) = (0, process[0].abs());
    for (k, v) in process.iter().enumerate().skip(1) {
        if v.abs() > max_value {
            argmax = k;
            max_value = v.abs();
        }
    }
    Ok(CusumResult {
        process,
        argmax_index: argmax + 1,
        max_value,
    })
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Maximal runs of indices with `z_i > median + threshold·MAD`, as half-open
/// index ranges in increasing order. The MAD is scaled to be consistent with
/// the Gaussian standard deviation.
pub fn detect_peaks(z: &[f64], threshold_multiplier: f64) -> Result<Vec<Range<usize>>> {
    if z.len() < 3 {
        return Err(FtsError::InputTooShort(format!(
            "peak detection needs at least 3 values, got {}",
            z.len()
        )));
    }
    let med = median(z);
    let deviations: Vec<f64> = z.iter().map(|v| (v - med).abs()).collect();
    let cutoff = med + threshold_multiplier * MAD_SCALE * median(&deviations);
    let mut ranges = Vec::new();
    let mut start = None;
    for (i, &v) in z.iter().enumerate() {
        match (v > cutoff, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                ranges.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        ranges.push(s..z.len());
    }
    Ok(ranges)
}

/// Turns an `N × d` signal into a functional series of overlapping windows:
/// observation `i = 1..=n` holds `Y_{stride·i + j}` for `j = 0..m` (1-based
/// `Y`), with `n = ⌊N/stride⌋ − (m − 1)`. Channels are stored one after the
/// other, so each observation has `d·m` values.
pub fn sliding_embed(raw: ArrayView2<f64>, stride: usize, m: usize) -> Result<FunctionalSeries> {
    let (len, d) = raw.dim();
    if stride == 0 || m == 0 || d == 0 {
        return Err(FtsError::InvalidConfig(
            "stride, window length and channel count must be positive".into(),
        ));
    }
    let n = (len / stride).saturating_sub(m - 1);
    if len < stride + m || n == 0 {
        return Err(FtsError::InputTooShort(format!(
            "{len} samples cannot fill a window of {m} with stride {stride}"
        )));
    }
    let values = Array2::from_shape_fn((n, d * m), |(row, col)| {
        let (channel, j) = (col / m, col % m);
        raw[[stride * (row + 1) + j - 1, channel]]
    });
    FunctionalSeries::new(equidistant_times(n), values, ValueGrid::new(d, m), Norm::L2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn metric_basics() {
        let a = array![[1.0, 2.0], [3.0, 4.0]];
        assert_eq!(mse(a.view(), a.view()).unwrap(), 0.0);
        assert_eq!(mae(a.view(), a.view()).unwrap(), 0.0);
        let b = &a + 0.5;
        assert_eq!(mse(b.view(), a.view()).unwrap(), 0.25);
        assert_eq!(mae(a.view(), b.view()).unwrap(), 0.5);
        let c = Array2::zeros((2, 3));
        assert!(matches!(mse(a.view(), c.view()), Err(FtsError::ShapeMismatch(_))));
    }

    #[test]
    fn metrics_match_brute_force() {
        let est = array![[0.3, -1.2, 2.0, 0.7], [1.1, 0.0, -0.4, 0.9], [2.5, -0.8, 0.6, -1.9]];
        let truth = array![[0.1, -1.0, 2.5, 0.2], [1.4, 0.3, -0.1, 1.0], [2.0, -0.5, 0.9, -2.0]];
        let mut sq = 0.0;
        let mut ab = 0.0;
        for i in 0..3 {
            let mut rs = 0.0;
            let mut ra = 0.0;
            for j in 0..4 {
                let d: f64 = est[[i, j]] - truth[[i, j]];
                rs += d * d;
                ra += d.abs();
            }
            sq += rs / 4.0;
            ab += ra / 4.0;
        }
        let r = metrics(est.view(), truth.view()).unwrap();
        assert!((r.mse - sq / 3.0).abs() < 1e-15);
        assert!((r.mae - ab / 3.0).abs() < 1e-15);
        assert!((r.per_time.iter().sum::<f64>() / 3.0 - r.mse).abs() < 1e-15);
    }

    #[test]
    fn cusum_small_cases() {
        let r = cusum(&[2.0; 10]).unwrap();
        assert!(r.process.iter().all(|v| v.abs() < 1e-14));
        assert_eq!(r.argmax_index, 1);

        // z = (1, 2, 3, 4): partial sums 1, 3, 6, 10, total 10.
        let r = cusum(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let expect = [(1.0 - 2.5) / 2.0, (3.0 - 5.0) / 2.0, (6.0 - 7.5) / 2.0, 0.0];
        for (a, b) in r.process.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(r.argmax_index, 2);
        assert_eq!(r.max_value, 1.0);
        assert!(cusum(&[1.0]).is_err());
    }

    #[test]
    fn cusum_locates_step() {
        let z: Vec<f64> = (1..=100).map(|i| if i <= 60 { 0.0 } else { 1.0 }).collect();
        let r = cusum(&z).unwrap();
        assert_eq!(r.argmax_index, 60);
        assert!(r.process[99].abs() < 1e-12);
    }

    #[test]
    fn peaks() {
        assert!(detect_peaks(&[1.0; 20], 5.0).unwrap().is_empty());
        let mut z = vec![1.0; 30];
        z[12] = 100.0;
        assert_eq!(detect_peaks(&z, 5.0).unwrap(), vec![12..13]);
        z[25] = 80.0;
        z[26] = 90.0;
        assert_eq!(detect_peaks(&z, 5.0).unwrap(), vec![12..13, 25..27]);
        assert!(detect_peaks(&[1.0, 2.0], 5.0).is_err());
    }

    #[test]
    fn residual_norm_variants() {
        let series = FunctionalSeries::equidistant(array![[3.0, 4.0], [1.0, 1.0]]).unwrap();
        let smoothed = Estimate {
            times: series.times().to_vec(),
            mu_hat: array![[0.0, 0.0], [1.0, -1.0]],
            dmu_hat: None,
            interior_mask: vec![false; 2],
            bandwidth: 0.1,
        };
        let l2 = residual_norms(&series, &smoothed, Norm::L2).unwrap();
        assert!((l2[0] - 3.5355339059327378).abs() < 1e-15);
        assert_eq!(residual_norms(&series, &smoothed, Norm::Sup).unwrap(), vec![4.0, 2.0]);
        assert_eq!(residual_norms(&series, &smoothed, Norm::L1).unwrap(), vec![3.5, 1.0]);
    }

    #[test]
    fn embed_shapes() {
        let raw = Array2::from_shape_fn((10, 1), |(i, _)| (i + 1) as f64);
        let s = sliding_embed(raw.view(), 5, 2).unwrap();
        assert_eq!(s.len(), 1);
        // Y_5, Y_6 in 1-based numbering.
        assert_eq!(s.values().row(0).to_vec(), vec![5.0, 6.0]);

        let id = sliding_embed(raw.view(), 1, 1).unwrap();
        assert_eq!(id.len(), 10);
        assert_eq!(id.values().column(0).to_vec(), raw.column(0).to_vec());

        let eeg = Array2::zeros((2000, 4));
        let s = sliding_embed(eeg.view(), 5, 50).unwrap();
        assert_eq!(s.dim(), 200);
        assert_eq!(s.len(), 400 - 49);
        assert_eq!(s.grid(), ValueGrid::new(4, 50));

        assert!(sliding_embed(raw.view(), 5, 5).is_err());
        assert!(sliding_embed(raw.view(), 0, 2).is_err());
    }

    #[test]
    fn embed_channel_layout() {
        let raw = Array2::from_shape_fn((12, 2), |(i, c)| (100 * c + i) as f64);
        let s = sliding_embed(raw.view(), 2, 3).unwrap();
        // n = 6 − 2 = 4; observation 1 starts at 0-based index 1.
        assert_eq!(s.len(), 4);
        assert_eq!(s.values().row(0).to_vec(), vec![1.0, 2.0, 3.0, 101.0, 102.0, 103.0]);
    }
}
