//! Series files: CSV matrices with an optional header and sidecar metadata.
//!
//! Rows are time points and columns the flattened value dimension. A header
//! row is optional. When present, a first column named `t` carries the time
//! stamps and a column named `interior_mask` is ignored, so smoothing output
//! can be read back as input. Without a `t` column the time stamps default
//! to `i/n`, `i = 1..=n`. Lines starting with `#` are comments.
//!
//! Floats are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::io::Write;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{FtsError, Result};
use crate::series::{equidistant_times, FunctionalSeries, Norm, ValueGrid};

pub const TIME_COLUMN: &str = "t";
pub const MASK_COLUMN: &str = "interior_mask";

/// Raw content of a series file before it is assembled into a series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub times: Option<Vec<f64>>,
    pub values: Array2<f64>,
}

/// Optional JSON metadata accompanying a series file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesMeta {
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub norm: Option<Norm>,
}

impl SeriesMeta {
    /// Resolves `(d, m)` for a value dimension `p`.
    pub fn grid_for(&self, p: usize) -> Result<ValueGrid> {
        let grid = match (self.d, self.m) {
            (Some(d), Some(m)) => ValueGrid::new(d, m),
            (Some(d), None) if d > 0 && p.is_multiple_of(d) => ValueGrid::new(d, p / d),
            (None, Some(m)) if m > 0 && p.is_multiple_of(m) => ValueGrid::new(p / m, m),
            (None, None) => ValueGrid::new(1, p),
            (d, m) => {
                return Err(FtsError::Parse(format!(
                    "sidecar grid d = {d:?}, m = {m:?} does not divide {p} columns"
                )))
            }
        };
        if grid.dim() != p {
            return Err(FtsError::Parse(format!(
                "sidecar grid {}x{} does not match {p} columns",
                grid.d, grid.m
            )));
        }
        Ok(grid)
    }
}

pub fn parse_sidecar(text: &str) -> Result<SeriesMeta> {
    serde_json::from_str(text).map_err(|e| FtsError::Parse(format!("sidecar: {e}")))
}

fn parse_cell(s: &str, row: usize, col: usize) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| FtsError::Parse(format!("row {row}, column {col}: '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(FtsError::Parse(format!("row {row}, column {col}: non-finite value")));
    }
    Ok(v)
}

/// Parses series CSV text.
pub fn parse_series_csv(text: &str) -> Result<SeriesTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let mut first = match records.next() {
        Some(r) => r.map_err(|e| FtsError::Parse(e.to_string()))?,
        None => return Err(FtsError::Parse("file has no rows".into())),
    };
    let is_header = first.iter().any(|f| f.trim().parse::<f64>().is_err());
    let width = first.len();
    let (time_col, mask_col) = if is_header {
        let names: Vec<&str> = first.iter().collect();
        let time_col = (names.first() == Some(&TIME_COLUMN)).then_some(0);
        let mask_col = names.iter().position(|n| *n == MASK_COLUMN);
        (time_col, mask_col)
    } else {
        (None, None)
    };
    let value_cols: Vec<usize> = (0..width)
        .filter(|&c| Some(c) != time_col && Some(c) != mask_col)
        .collect();
    if value_cols.is_empty() {
        return Err(FtsError::Parse("no value columns".into()));
    }

    let mut times = Vec::new();
    let mut flat = Vec::new();
    let mut rows = 0usize;
    let mut push = |rec: &csv::StringRecord, row: usize| -> Result<()> {
        if rec.len() != width {
            return Err(FtsError::Parse(format!(
                "row {row} has {} fields, expected {width}",
                rec.len()
            )));
        }
        if let Some(c) = time_col {
            times.push(parse_cell(&rec[c], row, c)?);
        }
        for &c in &value_cols {
            flat.push(parse_cell(&rec[c], row, c)?);
        }
        Ok(())
    };
    if !is_header {
        push(&first, 1)?;
        rows += 1;
    }
    for rec in records {
        first = rec.map_err(|e| FtsError::Parse(e.to_string()))?;
        rows += 1;
        push(&first, rows + usize::from(is_header))?;
    }
    if rows < 2 {
        return Err(FtsError::Parse(format!("need at least 2 data rows, got {rows}")));
    }
    let values = Array2::from_shape_vec((rows, value_cols.len()), flat)
        .map_err(|e| FtsError::Parse(e.to_string()))?;
    Ok(SeriesTable {
        times: time_col.map(|_| times),
        values,
    })
}

/// Parses CSV text and optional sidecar metadata into a validated series.
pub fn parse_series(csv_text: &str, meta: Option<&SeriesMeta>) -> Result<FunctionalSeries> {
    let table = parse_series_csv(csv_text)?;
    let meta = meta.copied().unwrap_or_default();
    let (n, p) = table.values.dim();
    let grid = meta.grid_for(p)?;
    let times = table.times.unwrap_or_else(|| equidistant_times(n));
    FunctionalSeries::new(times, table.values, grid, meta.norm.unwrap_or_default())
        .map_err(|e| FtsError::Parse(e.to_string()))
}

/// 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `t, x0..x{P−1}` rows, an optional `interior_mask` column, and
/// leading `# ` comment lines.
pub fn write_matrix_csv<W: Write>(
    mut out: W,
    comments: &[String],
    times: &[f64],
    values: &Array2<f64>,
    mask: Option<&[bool]>,
) -> std::io::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut header = vec![TIME_COLUMN.to_string()];
    header.extend((0..values.ncols()).map(|j| format!("x{j}")));
    if mask.is_some() {
        header.push(MASK_COLUMN.to_string());
    }
    writeln!(out, "{}", header.join(","))?;
    for (i, row) in values.rows().into_iter().enumerate() {
        let mut fields = vec![format_f64(times[i])];
        fields.extend(row.iter().map(|v| format_f64(*v)));
        if let Some(mask) = mask {
            fields.push(u8::from(mask[i]).to_string());
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Serializes a series in the format [`parse_series_csv`] reads.
pub fn series_to_csv(series: &FunctionalSeries, comments: &[String]) -> String {
    let mut buf = Vec::new();
    write_matrix_csv(&mut buf, comments, series.times(), series.values(), None)
        .expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}
