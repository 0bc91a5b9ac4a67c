//! Command layer behind the `modeseek` binary: single runs and seeded
//! clustering over CSV data, the degenerate-mode rate experiments, and the
//! kernel catalog table. Emits plot-ready CSV plus JSON sidecars.
//!
//! Exit codes: 0 converged / all checks passed, 1 input or solver error,
//! 2 iteration cap reached or a rate check failed.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::degenerate::solve_degenerate_config;
use crate::density::{DataSet, DensityModel};
use crate::diagnostics::{self, RateReport};
use crate::error::{Error, Result};
use crate::io as csv_io;
use crate::kernels::KernelSpec;
use crate::meanshift::{cluster, default_merge_tolerance, ms_run, MSConfig, StopReason, Trajectory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNCONVERGED: i32 = 2;

/// Cap on rows per exported trajectory CSV; longer runs are strided down.
const MAX_CSV_ROWS: usize = 100_000;

/// Where a run starts.
#[derive(Debug, Clone, PartialEq)]
pub enum StartPoint {
    Point(Vec<f64>),
    /// Seed one run at every data point and cluster the resulting modes.
    EachDataPoint,
}

impl FromStr for StartPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("each-datapoint") {
            return Ok(Self::EachDataPoint);
        }
        let coords: std::result::Result<Vec<f64>, _> =
            s.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match coords {
            Ok(v) if !v.is_empty() && v.iter().all(|c| c.is_finite()) => Ok(Self::Point(v)),
            _ => Err(Error::InvalidConfig(format!(
                "start must be `each-datapoint` or comma-separated coordinates, got `{s}`"
            ))),
        }
    }
}

/// Everything a `run` invocation needs.
#[derive(Debug, Clone)]
pub struct RunRequest {
    pub data_path: PathBuf,
    pub kernel_name: String,
    pub bandwidth: f64,
    pub start: StartPoint,
    pub config: MSConfig,
    pub merge_tolerance: Option<f64>,
    pub normalized: bool,
    pub output_path: PathBuf,
}

/// Worker-thread cap: the `MODESEEK_THREADS` variable when set, otherwise
/// the machine parallelism.
pub fn thread_cap() -> usize {
    std::env::var("MODESEEK_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

#[derive(Serialize)]
struct RunSidecar<'a> {
    stop_reason: StopReason,
    iterations: usize,
    kernel: &'a str,
    bandwidth: f64,
    over_relaxation: f64,
    step_tolerance: f64,
    max_iterations: usize,
    normalized: bool,
    start: &'a [f64],
    zero_density_start: bool,
    csv_stride: usize,
}

#[derive(Serialize)]
struct ClusterSidecar<'a> {
    kernel: &'a str,
    bandwidth: f64,
    over_relaxation: f64,
    step_tolerance: f64,
    max_iterations: usize,
    normalized: bool,
    merge_tolerance: f64,
    seeds: usize,
    n_clusters: usize,
    unconverged_seeds: &'a [usize],
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, value).map_err(|e| Error::InvalidData(e.to_string()))?;
    file.write_all(b"\n")?;
    Ok(())
}

fn sibling(path: &Path, suffix: &str, extension: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    path.with_file_name(format!("{stem}{suffix}.{extension}"))
}

/// Run the iteration per the request; returns a process exit code.
pub fn cmd_run(request: &RunRequest) -> i32 {
    match run_inner(request) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn run_inner(request: &RunRequest) -> Result<i32> {
    let dataset = csv_io::read_dataset_file(&request.data_path)?;
    let kernel = KernelSpec::by_name(&request.kernel_name)?;
    let model = if request.normalized {
        DensityModel::normalized(dataset, kernel, request.bandwidth)?
    } else {
        DensityModel::new(dataset, kernel, request.bandwidth)?
    };

    match &request.start {
        StartPoint::Point(start) => {
            if start.len() != model.d() {
                return Err(Error::InvalidConfig(format!(
                    "start has {} coordinates but the data is {}-dimensional",
                    start.len(),
                    model.d()
                )));
            }
            let config = MSConfig {
                record_trajectory: true,
                ..request.config.clone()
            };
            let traj = ms_run(&model, start, &config)?;
            let stride = csv_io::export_stride(traj.len(), MAX_CSV_ROWS);
            let file = std::fs::File::create(&request.output_path)?;
            csv_io::write_trajectory(&traj, stride, file)?;
            write_json(
                &sibling(&request.output_path, "", "json"),
                &RunSidecar {
                    stop_reason: traj.stop_reason(),
                    iterations: traj.total_iterations(),
                    kernel: model.kernel().name(),
                    bandwidth: request.bandwidth,
                    over_relaxation: config.over_relaxation,
                    step_tolerance: config.step_tolerance,
                    max_iterations: config.max_iterations,
                    normalized: request.normalized,
                    start,
                    zero_density_start: traj.zero_density_start(),
                    csv_stride: stride,
                },
            )?;
            if traj.converged() {
                // limit-point diagnostics, when second derivatives exist there
                if let Ok(report) = diagnostics::rate_report(&model, &traj, None, None) {
                    write_json(&sibling(&request.output_path, "_rate", "json"), &report)?;
                }
                println!(
                    "converged in {} iterations at {:?}",
                    traj.total_iterations(),
                    traj.final_position()
                );
                Ok(EXIT_OK)
            } else {
                println!(
                    "iteration cap {} reached; final position {:?}",
                    config.max_iterations,
                    traj.final_position()
                );
                Ok(EXIT_UNCONVERGED)
            }
        }
        StartPoint::EachDataPoint => {
            let merge_tolerance = match request.merge_tolerance {
                Some(t) => t,
                None => default_merge_tolerance(&model),
            };
            let got = cluster(&model, &request.config, merge_tolerance, thread_cap())?;

            let mut w = csv::Writer::from_writer(std::fs::File::create(&request.output_path)?);
            w.write_record(["index", "label"])
                .map_err(|e| Error::InvalidData(e.to_string()))?;
            for (i, label) in got.labels.iter().enumerate() {
                w.write_record([i.to_string(), label.to_string()])
                    .map_err(|e| Error::InvalidData(e.to_string()))?;
            }
            w.flush()?;

            let modes_path = sibling(&request.output_path, "_modes", "csv");
            let mut w = csv::Writer::from_writer(std::fs::File::create(&modes_path)?);
            let mut header = vec!["label".to_owned()];
            for k in 1..=model.d() {
                header.push(format!("y{k}"));
            }
            w.write_record(&header)
                .map_err(|e| Error::InvalidData(e.to_string()))?;
            for (label, mode) in got.modes.iter().enumerate() {
                let mut row = vec![label.to_string()];
                row.extend(mode.iter().map(f64::to_string));
                w.write_record(&row)
                    .map_err(|e| Error::InvalidData(e.to_string()))?;
            }
            w.flush()?;

            write_json(
                &sibling(&request.output_path, "", "json"),
                &ClusterSidecar {
                    kernel: model.kernel().name(),
                    bandwidth: request.bandwidth,
                    over_relaxation: request.config.over_relaxation,
                    step_tolerance: request.config.step_tolerance,
                    max_iterations: request.config.max_iterations,
                    normalized: request.normalized,
                    merge_tolerance,
                    seeds: model.dataset().n(),
                    n_clusters: got.modes.len(),
                    unconverged_seeds: &got.unconverged_seeds,
                },
            )?;
            println!(
                "{} seeds -> {} clusters{}",
                model.dataset().n(),
                got.modes.len(),
                if got.unconverged_seeds.is_empty() {
                    String::new()
                } else {
                    format!(" ({} seeds unconverged)", got.unconverged_seeds.len())
                }
            );
            Ok(if got.unconverged_seeds.is_empty() {
                EXIT_OK
            } else {
                EXIT_UNCONVERGED
            })
        }
    }
}

/// The four rate experiments over symmetric Gaussian densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentCase {
    /// Non-degenerate pair at ±0.95: geometric contraction.
    I,
    /// Pair at ±1: flat mode of order 4.
    II,
    /// Three pairs, flat mode of order 6 (smallest position pinned).
    III,
    /// Three pairs, flat mode of order 8.
    IV,
}

impl FromStr for ExperimentCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(Self::I),
            "ii" | "2" => Ok(Self::II),
            "iii" | "3" => Ok(Self::III),
            "iv" | "4" => Ok(Self::IV),
            _ => Err(Error::InvalidConfig(format!(
                "case must be one of i, ii, iii, iv; got `{s}`"
            ))),
        }
    }
}

impl fmt::Display for ExperimentCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::I => "i",
            Self::II => "ii",
            Self::III => "iii",
            Self::IV => "iv",
        })
    }
}

/// One pass/fail comparison line in the experiment report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub expected: f64,
    pub actual: Option<f64>,
    pub tolerance: f64,
    /// Tolerance is relative to `expected` when true, absolute otherwise.
    pub relative: bool,
    pub pass: bool,
}

fn check(name: &str, expected: f64, actual: Option<f64>, tolerance: f64, relative: bool) -> CheckOutcome {
    let pass = actual.is_some_and(|a| {
        let scale = if relative { expected.abs() } else { 1.0 };
        (a - expected).abs() <= tolerance * scale
    });
    CheckOutcome {
        name: name.to_owned(),
        expected,
        actual,
        tolerance,
        relative,
        pass,
    }
}

/// Full record of one rate experiment.
#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub case: String,
    /// Start position: a reproduction choice of this tool, not pinned by
    /// the source experiments.
    pub start: Vec<f64>,
    pub pair_positions: Vec<f64>,
    pub config_residuals: Option<Vec<f64>>,
    pub theta: f64,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub rate: RateReport,
    pub checks: Vec<CheckOutcome>,
    pub pass: bool,
}

/// Run one experiment case; returns the report and the recorded trajectory.
pub fn run_experiment_case(case: ExperimentCase) -> Result<(ExperimentReport, Trajectory)> {
    let (pair_positions, config_residuals, theta, start, max_iterations) = match case {
        ExperimentCase::I => (vec![0.95], None, 0.5, 0.1, 100_000),
        ExperimentCase::II => {
            let c = solve_degenerate_config(1, None)?;
            (c.pair_positions, Some(c.residuals), c.theta, 0.5, 100_000)
        }
        ExperimentCase::III => {
            let c = solve_degenerate_config(2, None)?;
            (c.pair_positions, Some(c.residuals), c.theta, 0.5, 300_000)
        }
        ExperimentCase::IV => {
            let c = solve_degenerate_config(3, None)?;
            (c.pair_positions, Some(c.residuals), c.theta, 0.5, 1_000_000)
        }
    };

    let mut xs: Vec<f64> = pair_positions.iter().map(|p| -p).collect();
    xs.extend(&pair_positions);
    let model = DensityModel::normalized(
        DataSet::from_1d(&xs)?,
        KernelSpec::gaussian(),
        1.0,
    )?;
    let config = MSConfig {
        max_iterations,
        ..MSConfig::default()
    };
    let traj = ms_run(&model, &[start], &config)?;
    // the mode is the origin by symmetry of the placement
    let rate = diagnostics::rate_report(&model, &traj, Some(&[0.0]), Some(theta))?;

    let checks = match case {
        ExperimentCase::I => vec![check(
            "q_hat",
            0.9025,
            rate.fitted_q,
            1e-3,
            false,
        )],
        _ => {
            let position_decay = rate
                .predicted_position_slope
                .expect("degenerate cases are polynomial class");
            let value_decay = rate
                .predicted_value_slope
                .expect("degenerate cases are polynomial class");
            vec![
                check(
                    "position_loglog_slope",
                    -position_decay,
                    rate.fitted_position_slope,
                    0.10,
                    true,
                ),
                check(
                    "value_loglog_slope",
                    -value_decay,
                    rate.fitted_value_slope,
                    0.10,
                    true,
                ),
            ]
        }
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok((
        ExperimentReport {
            case: case.to_string(),
            start: vec![start],
            pair_positions,
            config_residuals,
            theta,
            iterations: traj.total_iterations(),
            stop_reason: traj.stop_reason(),
            rate,
            checks,
            pass,
        },
        traj,
    ))
}

/// Run one experiment case and write `figure2_<case>_trajectory.csv` and
/// `figure2_<case>_report.json` into `output_dir`.
pub fn cmd_figure2(case: ExperimentCase, output_dir: &Path) -> i32 {
    match figure2_inner(case, output_dir) {
        Ok(pass) => {
            if pass {
                EXIT_OK
            } else {
                EXIT_UNCONVERGED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn figure2_inner(case: ExperimentCase, output_dir: &Path) -> Result<bool> {
    std::fs::create_dir_all(output_dir)?;
    let (report, traj) = run_experiment_case(case)?;

    let csv_path = output_dir.join(format!("figure2_{case}_trajectory.csv"));
    let stride = csv_io::export_stride(traj.len(), MAX_CSV_ROWS);
    csv_io::write_trajectory(&traj, stride, std::fs::File::create(&csv_path)?)?;

    let json_path = output_dir.join(format!("figure2_{case}_report.json"));
    write_json(&json_path, &report)?;

    for c in &report.checks {
        println!(
            "case {case} {}: expected {:.6}, got {} -> {}",
            c.name,
            c.expected,
            c.actual.map_or("n/a".to_owned(), |a| format!("{a:.6}")),
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(report.pass)
}

/// Catalog row for the `kernels` subcommand.
#[derive(Debug, Serialize)]
pub struct KernelRow {
    pub name: String,
    pub profile: &'static str,
    pub convex_profile: bool,
    pub lipschitz_gradient: bool,
    pub convergence: &'static str,
    pub rate: &'static str,
    pub exponent_bound: Option<f64>,
}

fn profile_formula(name: &str) -> &'static str {
    match name {
        "gaussian" => "exp(-u)",
        "epanechnikov" => "(1-u)+",
        "biweight" => "{(1-u)+}^2",
        "triweight" => "{(1-u)+}^3",
        "tricube" => "{(1-u^1.5)+}^3",
        "cosine" => "cos(pi*sqrt(u)/2), u<=1",
        "logistic" => "1/(e^sqrt(u)+2+e^-sqrt(u))",
        "cauchy" => "1/(1+u)",
        "threehalves" => "{(1-u)+}^1.5",
        _ => "",
    }
}

/// Guarantee markers per kernel. A convex piecewise-linear profile (max
/// kernel degree 2) yields constant step weights and finite-time
/// convergence; a convex profile with a Lipschitz kernel gradient gives the
/// unconditional guarantees; convexity alone leaves them conditional on the
/// run staying in a region where the estimate is smooth.
fn status(kernel: &KernelSpec) -> (&'static str, &'static str) {
    let p = kernel.properties();
    if !p.convex_profile {
        return ("-", "-");
    }
    if kernel.max_poly_degree() == Some(2) {
        return ("finite-time", "finite-time");
    }
    if p.lipschitz_gradient {
        ("guaranteed", "guaranteed")
    } else {
        ("conditional", "conditional")
    }
}

/// Rows of the catalog table at dimension `d`.
pub fn kernel_table(d: usize) -> Vec<KernelRow> {
    KernelSpec::catalog()
        .into_iter()
        .map(|k| {
            let (convergence, rate) = status(&k);
            KernelRow {
                profile: profile_formula(k.name()),
                convex_profile: k.properties().convex_profile,
                lipschitz_gradient: k.properties().lipschitz_gradient,
                convergence,
                rate,
                exponent_bound: diagnostics::lojasiewicz_exponent_bound(&k, d),
                name: k.name().to_owned(),
            }
        })
        .collect()
}

/// Render the catalog table.
pub fn render_kernel_table(d: usize) -> String {
    let rows = kernel_table(d);
    let mut out = String::new();
    out.push_str(&format!(
        "{:<13} {:<27} {:^7} {:^11} {:^12} {:^12} {:>16}\n",
        "kernel", "profile(u)", "convex", "smooth-grad", "convergence", "rate", "exp-bound"
    ));
    for r in &rows {
        let mark = |b: bool| if b { "\u{2713}" } else { "\u{00d7}" };
        out.push_str(&format!(
            "{:<13} {:<27} {:^7} {:^11} {:^12} {:^12} {:>16}\n",
            r.name,
            r.profile,
            mark(r.convex_profile),
            mark(r.lipschitz_gradient),
            r.convergence,
            r.rate,
            r.exponent_bound
                .map_or("-".to_owned(), |b| format!("{b:.6}")),
        ));
    }
    out
}

/// Print the kernel/assumption matrix with the exponent bound at `d`.
pub fn cmd_kernels(d: usize) -> i32 {
    print!("{}", render_kernel_table(d));
    EXIT_OK
}
