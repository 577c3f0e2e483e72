//! Implementation of the `fts` subcommands.

use std::path::{Path, PathBuf};

use fts_core::analysis::{cusum, detect_peaks, residual_norms, DEFAULT_PEAK_THRESHOLD};
use fts_core::bandwidth::{cross_validate, CvConfig, FoldScheme};
use fts_core::estimators::{jackknife, local_linear, nadaraya_watson, nw_derivative, Estimator, SmoothConfig};
use fts_core::io::{format_f64, parse_series, parse_series_csv, parse_sidecar, write_matrix_csv, SeriesMeta};
use fts_core::simulation::{monte_carlo, ErrorKind, ErrorProcess, MeanOperator, SimSpec, DEFAULT_BURN_IN};
use fts_core::{Estimate, FunctionalSeries, Kernel, Norm};
use serde_json::{json, Value};

use crate::config::{AnalyzeArgs, Command, CvArgs, OutputFormat, SimulateArgs, SmoothArgs};
use crate::output::{json_f64, results_csv, results_json, write_atomic, write_json};
use crate::CliError;

/// Header lines identifying how an output file was produced.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub command_line: String,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(argv: &[String]) -> Self {
        Self {
            command_line: argv.join(" "),
            seed: None,
        }
    }

    fn comments(&self) -> Vec<String> {
        let mut lines = vec![
            format!("fts {}", env!("CARGO_PKG_VERSION")),
            format!("command: {}", self.command_line),
        ];
        if let Some(seed) = self.seed {
            lines.push(format!("seed: {seed}"));
        }
        lines
    }

    fn json(&self) -> Value {
        json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command_line": self.command_line,
            "seed": self.seed,
        })
    }
}

/// Runs one subcommand. `argv` is only used for provenance headers.
/// Returns a short human-readable summary.
pub fn run(command: Command, argv: &[String]) -> Result<String, CliError> {
    let prov = Provenance::new(argv);
    match command {
        Command::Simulate(a) => cmd_simulate(a.resolve()?, prov),
        Command::Smooth(a) => cmd_smooth(a.resolve()?, prov),
        Command::Cv(a) => cmd_cv(a.resolve()?, prov),
        Command::Analyze(a) => cmd_analyze(a.resolve()?, prov),
    }
}

fn parse_opt<T>(value: Option<&str>, default: T) -> Result<T, CliError>
where
    T: std::str::FromStr<Err = fts_core::FtsError>,
{
    value.map_or(Ok(default), |s| s.parse().map_err(CliError::from))
}

fn out_dir(out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| PathBuf::from("."))
}

fn read_series(input: Option<&Path>, sidecar: Option<&Path>) -> Result<FunctionalSeries, CliError> {
    let input = input.ok_or_else(|| CliError::Config("--input is required".into()))?;
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", input.display())))?;
    let meta = sidecar.map(read_sidecar).transpose()?;
    parse_series(&text, meta.as_ref()).map_err(|e| CliError::Input(format!("{}: {e}", input.display())))
}

fn read_sidecar(path: &Path) -> Result<SeriesMeta, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_sidecar(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn resolve_bandwidth(h: Option<f64>, frames: Option<f64>, n: usize) -> Result<f64, CliError> {
    let h = match (h, frames) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "give either --bandwidth or --bandwidth-frames, not both".into(),
            ))
        }
        (Some(h), None) => h,
        (None, Some(b)) => b / n as f64,
        (None, None) => {
            return Err(CliError::Config(
                "--bandwidth or --bandwidth-frames is required".into(),
            ))
        }
    };
    SmoothConfig::new(h).validate()?;
    Ok(h)
}

fn cv_config(k: Option<usize>, grid_size: Option<usize>, scheme: Option<&str>, estimator: Estimator) -> Result<CvConfig, CliError> {
    let d = CvConfig::default();
    Ok(CvConfig {
        k: k.unwrap_or(d.k),
        grid_size: grid_size.unwrap_or(d.grid_size),
        estimator,
        fold_scheme: parse_opt(scheme, FoldScheme::default())?,
    })
}

pub fn cmd_simulate(args: SimulateArgs, mut prov: Provenance) -> Result<String, CliError> {
    let mean: MeanOperator = parse_opt(args.mean.as_deref(), MeanOperator::Mu1)?;
    let kind: ErrorKind = parse_opt(args.errors.as_deref(), ErrorKind::Bm)?;
    let errors = ErrorProcess::new(kind).with_burn_in(args.burn_in.unwrap_or(DEFAULT_BURN_IN));
    let ns = args.n.clone().unwrap_or_else(|| vec![100]);
    if ns.is_empty() {
        return Err(CliError::Config("--n needs at least one value".into()));
    }
    let m = args.m.unwrap_or(100);
    let reps = args.reps.unwrap_or(100);
    let seed = args.seed.unwrap_or(0);
    prov.seed = Some(seed);
    let estimators: Vec<Estimator> = match &args.estimators {
        Some(list) => list
            .iter()
            .map(|s| s.parse().map_err(CliError::from))
            .collect::<Result<_, _>>()?,
        None => Estimator::ALL.to_vec(),
    };
    let cv = cv_config(args.k, args.grid_size, args.fold_scheme.as_deref(), Estimator::LocalLinear)?;
    let specs: Vec<SimSpec> = ns
        .iter()
        .map(|&n| SimSpec {
            mean: mean.clone(),
            errors,
            n,
            m,
            reps,
            master_seed: seed,
        })
        .collect();
    for spec in &specs {
        spec.validate()?;
        cv.validate(spec.n)?;
    }

    let kernel = Kernel::Quartic;
    let mut rows = Vec::new();
    let mut failures: Vec<(Estimator, usize)> = estimators.iter().map(|&e| (e, 0)).collect();
    let mut first_failure = None;
    for spec in &specs {
        let table = monte_carlo(spec, &estimators, &cv, &kernel)?;
        rows.extend(table.rows.iter().cloned());
        for ((_, total), (_, c)) in failures.iter_mut().zip(&table.failures) {
            *total += c;
        }
        if first_failure.is_none() {
            first_failure = table.first_failure.clone();
        }
    }

    let out = out_dir(args.out);
    let format = args.format.unwrap_or_default();
    let results_name = match format {
        OutputFormat::Csv => "results.csv",
        OutputFormat::Json => "results.json",
    };
    match format {
        OutputFormat::Csv => write_atomic(
            &out.join(results_name),
            results_csv(&rows, &prov.comments(), args.timing).as_bytes(),
        )?,
        OutputFormat::Json => write_json(
            &out.join(results_name),
            &json!({ "provenance": prov.json(), "rows": results_json(&rows, args.timing) }),
        )?,
    }
    let total_failures: usize = failures.iter().map(|(_, c)| c).sum();
    let failure_map: serde_json::Map<String, Value> = failures
        .iter()
        .map(|(e, c)| (e.label().to_string(), json!(c)))
        .collect();
    let summary = json!({
        "command": "simulate",
        "provenance": prov.json(),
        "mean": mean.name(),
        "errors": kind.label(),
        "burn_in": errors.burn_in,
        "n": ns,
        "m": m,
        "reps": reps,
        "estimators": estimators.iter().map(|e| e.label()).collect::<Vec<_>>(),
        "cv": { "k": cv.k, "grid_size": cv.grid_size, "fold_scheme": cv.fold_scheme },
        "results_file": results_name,
        "failures": failure_map,
        "total_failures": total_failures,
        "first_failure": first_failure,
    });
    write_json(&out.join("summary.json"), &summary)?;

    let attempted = reps * ns.len();
    if failures.iter().all(|(_, c)| *c == attempted) {
        return Err(CliError::Numeric(format!(
            "every replication failed; first failure: {}",
            first_failure.unwrap_or_default()
        )));
    }
    Ok(format!(
        "wrote {} rows to {} ({total_failures} failed replications)",
        rows.len(),
        out.join(results_name).display()
    ))
}

fn smooth_series(series: &FunctionalSeries, estimator: Estimator, h: f64, derivative: bool) -> Result<Estimate, CliError> {
    let cfg = SmoothConfig::new(h);
    let est = match estimator {
        Estimator::LocalLinear => local_linear(series, &cfg)?,
        Estimator::Jackknife => jackknife(series, &cfg)?,
        Estimator::NadarayaWatson => {
            let est = nadaraya_watson(series, &cfg)?;
            if derivative {
                nw_derivative(est)?
            } else {
                est
            }
        }
    };
    Ok(est)
}

fn matrix_file(path: &Path, prov: &Provenance, est: &Estimate, derivative: bool) -> Result<(), CliError> {
    let values = if derivative {
        est.dmu_hat.as_ref().expect("caller checked for a derivative")
    } else {
        &est.mu_hat
    };
    let mut buf = Vec::new();
    write_matrix_csv(&mut buf, &prov.comments(), &est.times, values, Some(&est.interior_mask))?;
    write_atomic(path, &buf)
}

pub fn cmd_smooth(args: SmoothArgs, prov: Provenance) -> Result<String, CliError> {
    let estimator: Estimator = parse_opt(args.estimator.as_deref(), Estimator::LocalLinear)?;
    let series = read_series(args.input.as_deref(), args.sidecar.as_deref())?;
    let h = resolve_bandwidth(args.bandwidth, args.bandwidth_frames, series.len())?;
    let est = smooth_series(&series, estimator, h, args.derivative)?;

    let out = out_dir(args.out);
    matrix_file(&out.join("mu_hat.csv"), &prov, &est, false)?;
    if est.dmu_hat.is_some() {
        matrix_file(&out.join("dmu_hat.csv"), &prov, &est, true)?;
    }
    let summary = json!({
        "command": "smooth",
        "provenance": prov.json(),
        "estimator": estimator.label(),
        "bandwidth": h,
        "n": series.len(),
        "dim": series.dim(),
        "interior_points": est.interior_mask.iter().filter(|b| **b).count(),
        "derivative": est.dmu_hat.is_some(),
    });
    write_json(&out.join("smooth.json"), &summary)?;
    Ok(format!("smoothed {} observations with {estimator}, h = {h}", series.len()))
}

pub fn cmd_cv(args: CvArgs, prov: Provenance) -> Result<String, CliError> {
    let estimator: Estimator = parse_opt(args.estimator.as_deref(), Estimator::LocalLinear)?;
    let cfg = cv_config(args.k, args.grid_size, args.fold_scheme.as_deref(), estimator)?;
    let series = read_series(args.input.as_deref(), args.sidecar.as_deref())?;
    let report = cross_validate(&series, &cfg, &Kernel::Quartic)?;

    let out = out_dir(args.out);
    let mut csv = String::new();
    for c in prov.comments() {
        csv.push_str(&format!("# {c}\n"));
    }
    csv.push_str("h,score\n");
    for (h, s) in report.grid.iter().zip(&report.scores) {
        csv.push_str(&format!("{},{}\n", format_f64(*h), format_f64(*s)));
    }
    write_atomic(&out.join("cv.csv"), csv.as_bytes())?;
    let summary = json!({
        "command": "cv",
        "provenance": prov.json(),
        "estimator": estimator.label(),
        "k": cfg.k,
        "grid_size": cfg.grid_size,
        "fold_scheme": cfg.fold_scheme,
        "n": series.len(),
        "grid": report.grid,
        "scores": report.scores.iter().map(|s| json_f64(*s)).collect::<Vec<_>>(),
        "best_h": report.best_h,
    });
    write_json(&out.join("cv.json"), &summary)?;
    Ok(format!("best bandwidth {}", report.best_h))
}

pub fn cmd_analyze(args: AnalyzeArgs, prov: Provenance) -> Result<String, CliError> {
    let series = read_series(args.input.as_deref(), args.sidecar.as_deref())?;
    let norm: Norm = parse_opt(args.norm.as_deref(), series.norm())?;
    let threshold = args.peak_threshold.unwrap_or(DEFAULT_PEAK_THRESHOLD);
    if !threshold.is_finite() {
        return Err(CliError::Config("--peak-threshold must be finite".into()));
    }
    let smoothed = match &args.smoothed {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let table = parse_series_csv(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            if table.values.dim() != series.values().dim() {
                return Err(CliError::Input(format!(
                    "smoothed file has shape {:?}, series has {:?}",
                    table.values.dim(),
                    series.values().dim()
                )));
            }
            Estimate {
                times: series.times().to_vec(),
                mu_hat: table.values,
                dmu_hat: None,
                interior_mask: vec![false; series.len()],
                bandwidth: f64::NAN,
            }
        }
        None => {
            let estimator: Estimator = parse_opt(args.estimator.as_deref(), Estimator::LocalLinear)?;
            let h = resolve_bandwidth(args.bandwidth, args.bandwidth_frames, series.len())?;
            smooth_series(&series, estimator, h, false)?
        }
    };

    let norms = residual_norms(&series, &smoothed, norm)?;
    let cs = cusum(&norms)?;
    let peaks = detect_peaks(&norms, threshold)?;

    let out = out_dir(args.out);
    let mut comments = prov.comments();
    comments.push(format!("norm: {}", serde_json::to_value(norm).unwrap().as_str().unwrap_or("")));
    let mut text = String::new();
    for c in &comments {
        text.push_str(&format!("# {c}\n"));
    }
    text.push_str("t,residual_norm\n");
    for (t, z) in series.times().iter().zip(&norms) {
        text.push_str(&format!("{},{}\n", format_f64(*t), format_f64(*z)));
    }
    write_atomic(&out.join("residual_norms.csv"), text.as_bytes())?;

    let mut text = String::new();
    for c in &comments {
        text.push_str(&format!("# {c}\n"));
    }
    text.push_str(&format!("# argmax_index: {}\n", cs.argmax_index));
    text.push_str("k,t,cusum\n");
    for (k, (t, v)) in series.times().iter().zip(&cs.process).enumerate() {
        text.push_str(&format!("{},{},{}\n", k + 1, format_f64(*t), format_f64(*v)));
    }
    write_atomic(&out.join("cusum.csv"), text.as_bytes())?;

    let ranges: Vec<Value> = peaks
        .iter()
        .map(|r| json!({ "start": r.start, "end": r.end }))
        .collect();
    write_json(
        &out.join("peaks.json"),
        &json!({
            "provenance": prov.json(),
            "threshold_multiplier": threshold,
            "ranges": ranges,
        }),
    )?;
    write_json(
        &out.join("analyze.json"),
        &json!({
            "command": "analyze",
            "provenance": prov.json(),
            "norm": norm,
            "n": series.len(),
            "argmax_index": cs.argmax_index,
            "argmax_time": series.times()[cs.argmax_index - 1],
            "max_value": cs.max_value,
            "peak_count": peaks.len(),
        }),
    )?;
    Ok(format!(
        "CUSUM maximum after observation {} of {}; {} peak ranges",
        cs.argmax_index,
        series.len(),
        peaks.len()
    ))
}
