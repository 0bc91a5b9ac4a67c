//! Thin command-line front end over [`modeseek::cli`].

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use modeseek::cli::{self, ExperimentCase, RunRequest, StartPoint};
use modeseek::MSConfig;

#[derive(Parser)]
#[command(
    name = "modeseek",
    about = "Mode seeking and convergence diagnostics on kernel density estimates",
    version
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the iteration from a start point, or from every data point and
    /// cluster the modes
    Run {
        /// Dataset CSV (header x1..xd, optional weight/bandwidth columns)
        #[arg(long)]
        data: PathBuf,
        /// Kernel name (see `modeseek kernels`)
        #[arg(long)]
        kernel: String,
        /// Bandwidth (ignored per point where the data carries bandwidths)
        #[arg(long)]
        bandwidth: f64,
        /// Comma-separated start coordinates, or `each-datapoint`
        #[arg(long, default_value = "each-datapoint")]
        start: StartPoint,
        /// Over-relaxation factor in (0, 2)
        #[arg(long, default_value_t = 1.0)]
        zeta: f64,
        /// Step-norm stopping tolerance
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Iteration cap
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        /// Mode merge tolerance for clustering (default: 1e-6 x diameter)
        #[arg(long)]
        merge_tol: Option<f64>,
        /// Report densities normalized to integrate to one
        #[arg(long)]
        normalized: bool,
        /// Output CSV path (JSON sidecars are written next to it)
        #[arg(long)]
        out: PathBuf,
    },
    /// Reproduce the degenerate-mode rate experiments (cases i-iv)
    Figure2 {
        /// Which case: i, ii, iii, or iv
        #[arg(long)]
        case: ExperimentCase,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the kernel catalog with structural flags and exponent bounds
    Kernels {
        /// Dimension for the exponent bound column
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
}

fn main() {
    let args = Args::parse();
    let code = match args.command {
        Command::Run {
            data,
            kernel,
            bandwidth,
            start,
            zeta,
            tol,
            max_iter,
            merge_tol,
            normalized,
            out,
        } => cli::cmd_run(&RunRequest {
            data_path: data,
            kernel_name: kernel,
            bandwidth,
            start,
            config: MSConfig {
                step_tolerance: tol,
                max_iterations: max_iter,
                over_relaxation: zeta,
                record_trajectory: true,
            },
            merge_tolerance: merge_tol,
            normalized,
            output_path: out,
        }),
        Command::Figure2 { case, out } => cli::cmd_figure2(case, &out),
        Command::Kernels { dim } => cli::cmd_kernels(dim),
    };
    std::process::exit(code);
}
