//! Command-line flags and their JSON configuration-file equivalents.
//!
//! Every command accepts `--config <file>`: a flat JSON object whose keys are
//! the long flag names in snake_case. Unknown keys are rejected. Flags given
//! on the command line win over values from the file.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "fts", version, about = "Kernel smoothing for functional time series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo study: simulate, select bandwidths, fit, score.
    Simulate(SimulateArgs),
    /// Smooth a series file.
    Smooth(SmoothArgs),
    /// Cross-validate the bandwidth for a series file.
    Cv(CvArgs),
    /// Residual norms, CUSUM and peaks for a series and its smoothed version.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Fills every `None` field of `self` from `file`.
macro_rules! merge_fields {
    ($self:ident, $file:ident; $($field:ident),* ; flags: $($flag:ident),*) => {{
        $( if $self.$field.is_none() { $self.$field = $file.$field.take(); } )*
        $( $self.$flag = $self.$flag || $file.$flag; )*
    }};
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateArgs {
    /// JSON file with default values for any of the flags below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Mean operator: mu1, mu2 or affine.
    #[arg(long)]
    pub mean: Option<String>,
    /// Error process: bm, bb, far_bm, far_bb, tv_bm, tv_far1, tv_far2 or zero.
    #[arg(long)]
    pub errors: Option<String>,
    /// Series lengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Spatial resolution.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Estimators, comma separated: jackknife, ll, nw.
    #[arg(long, value_delimiter = ',')]
    pub estimators: Option<Vec<String>>,
    /// Cross-validation folds.
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of candidate bandwidths.
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// interleaved or contiguous.
    #[arg(long)]
    pub fold_scheme: Option<String>,
    /// Warm-up steps discarded by the autoregressive error processes.
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Record wall-clock fit times (makes the output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Series CSV file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// JSON metadata with d, m and norm.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    /// ll, jackknife or nw.
    #[arg(long)]
    pub estimator: Option<String>,
    /// Bandwidth as a fraction of the time axis.
    #[arg(long, conflicts_with = "bandwidth_frames")]
    pub bandwidth: Option<f64>,
    /// Bandwidth in observations; h = B/n.
    #[arg(long)]
    pub bandwidth_frames: Option<f64>,
    /// Also write the finite-difference derivative for nw.
    #[arg(long)]
    pub derivative: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    #[arg(long)]
    pub estimator: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long)]
    pub fold_scheme: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Original series CSV file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    /// Smoothed series (e.g. mu_hat.csv from `fts smooth`).
    #[arg(long)]
    pub smoothed: Option<PathBuf>,
    /// Smooth first with this estimator when no smoothed file is given.
    #[arg(long)]
    pub estimator: Option<String>,
    #[arg(long, conflicts_with = "bandwidth_frames")]
    pub bandwidth: Option<f64>,
    #[arg(long)]
    pub bandwidth_frames: Option<f64>,
    /// Residual norm: l1, l2 or sup.
    #[arg(long)]
    pub norm: Option<String>,
    /// Peaks exceed median + threshold·MAD.
    #[arg(long)]
    pub peak_threshold: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))
}

fn read_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_json(&text)
}

/// Parses configuration text for the named command without applying it.
/// Used by the fuzz targets.
pub fn parse_config_text(command: &str, text: &str) -> Result<(), CliError> {
    match command {
        "simulate" => parse_json::<SimulateArgs>(text).map(drop),
        "smooth" => parse_json::<SmoothArgs>(text).map(drop),
        "cv" => parse_json::<CvArgs>(text).map(drop),
        "analyze" => parse_json::<AnalyzeArgs>(text).map(drop),
        other => Err(CliError::Config(format!("unknown command '{other}'"))),
    }
}

impl SimulateArgs {
    pub fn merge(mut self, mut file: Self) -> Self {
        merge_fields!(self, file; mean, errors, n, m, reps, seed, estimators, k, grid_size,
            fold_scheme, burn_in, out, format; flags: timing);
        self
    }

    pub fn resolve(self) -> Result<Self, CliError> {
        match &self.config {
            Some(p) => Ok(self.clone().merge(read_config(p)?)),
            None => Ok(self),
        }
    }
}

impl SmoothArgs {
    pub fn merge(mut self, mut file: Self) -> Self {
        merge_fields!(self, file; input, sidecar, estimator, bandwidth, bandwidth_frames, out;
            flags: derivative);
        self
    }

    pub fn resolve(self) -> Result<Self, CliError> {
        match &self.config {
            Some(p) => Ok(self.clone().merge(read_config(p)?)),
            None => Ok(self),
        }
    }
}

impl CvArgs {
    pub fn merge(mut self, mut file: Self) -> Self {
        merge_fields!(self, file; input, sidecar, estimator, k, grid_size, fold_scheme, out; flags:);
        self
    }

    pub fn resolve(self) -> Result<Self, CliError> {
        match &self.config {
            Some(p) => Ok(self.clone().merge(read_config(p)?)),
            None => Ok(self),
        }
    }
}

impl AnalyzeArgs {
    pub fn merge(mut self, mut file: Self) -> Self {
        merge_fields!(self, file; input, sidecar, smoothed, estimator, bandwidth, bandwidth_frames,
            norm, peak_threshold, out; flags:);
        self
    }

    pub fn resolve(self) -> Result<Self, CliError> {
        match &self.config {
            Some(p) => Ok(self.clone().merge(read_config(p)?)),
            None => Ok(self),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let flags = SimulateArgs {
            n: Some(vec![50]),
            ..Default::default()
        };
        let file: SimulateArgs = parse_json(r#"{"n": [100], "m": 20, "timing": true}"#).unwrap();
        let merged = flags.merge(file);
        assert_eq!(merged.n, Some(vec![50]));
        assert_eq!(merged.m, Some(20));
        assert!(merged.timing);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_config_text("simulate", r#"{"reps": 3, "colour": 1}"#).is_err());
        assert!(parse_config_text("smooth", r#"{"bandwidth": 0.1}"#).is_ok());
        assert!(parse_config_text("cv", r#"{"config": "x"}"#).is_err());
        assert!(parse_config_text("plot", "{}").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
