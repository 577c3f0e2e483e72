//! Atomic file output and result-table serialization.

use std::io::Write;
use std::path::Path;

use fts_core::io::format_f64;
use fts_core::simulation::ResultRow;
use serde_json::Value;

use crate::CliError;

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// JSON has no infinities or NaN; those become `null`.
pub fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub const RESULT_COLUMNS: [&str; 14] = [
    "estimator", "target", "mean", "errors", "n", "m", "reps", "completed", "mean_mse", "sd_mse",
    "mean_mae", "sd_mae", "mean_fit_ms", "mean_h",
];

fn fit_ms(row: &ResultRow, timing: bool) -> Option<f64> {
    timing.then_some(row.mean_fit_ms)
}

pub fn results_csv(rows: &[ResultRow], comments: &[String], timing: bool) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&RESULT_COLUMNS.join(","));
    out.push('\n');
    for r in rows {
        let fields = [
            r.estimator.label().to_string(),
            r.target.label().to_string(),
            r.mean_op.clone(),
            r.errors.label().to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.reps.to_string(),
            r.completed.to_string(),
            format_f64(r.mean_mse),
            format_f64(r.sd_mse),
            format_f64(r.mean_mae),
            format_f64(r.sd_mae),
            fit_ms(r, timing).map_or_else(|| "NA".to_string(), format_f64),
            format_f64(r.mean_h),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn results_json(rows: &[ResultRow], timing: bool) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                serde_json::json!({
                    "estimator": r.estimator.label(),
                    "target": r.target.label(),
                    "mean": r.mean_op,
                    "errors": r.errors.label(),
                    "n": r.n,
                    "m": r.m,
                    "reps": r.reps,
                    "completed": r.completed,
                    "mean_mse": json_f64(r.mean_mse),
                    "sd_mse": json_f64(r.sd_mse),
                    "mean_mae": json_f64(r.mean_mae),
                    "sd_mae": json_f64(r.sd_mae),
                    "mean_fit_ms": fit_ms(r, timing).map_or(Value::Null, json_f64),
                    "mean_h": json_f64(r.mean_h),
                })
            })
            .collect(),
    )
}
