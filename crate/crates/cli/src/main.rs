#![allow(clippy::neg_cmp_op_on_partial_ord)]
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use subindex::flows::OmegaParameter;
use subindex_cli::commands::{self, FlowConfig};
use subindex_cli::{render_csv, write_atomic, CliError, CliResult, Format, Report};

#[derive(Debug, Parser)]
#[command(name = "subindex", version, about = "Criticality, sub-index and verification suites for distance functions")]
struct Cli {
    /// Unit-norm tolerance for direction sets and minimality tolerance on the torus.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for every stochastic sample.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Criticality and sub-index of a direction set read from JSON.
    Classify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Sub-index counts of the critical points of dist to a point on T^n.
    TorusTable {
        #[arg(long)]
        dim: usize,
        /// Also scan the grid {i/m}^n for stray critical points.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Classify one point of T^n.
    TorusClassify {
        #[arg(long)]
        dim: usize,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Components of the sublevel sets on either side of a level.
    TorusConnectivity {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        level: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 400)]
        grid: usize,
    },
    /// Arrival, cut-off flow, right-triangle and gradient-like suites.
    FlowVerify {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Sample count for the cut-off flow suite.
        #[arg(long, default_value_t = 1000)]
        omega_samples: usize,
        /// Use t_y + sqrt(R/10) as the flow time instead of t_y + R/sqrt(10).
        #[arg(long)]
        sqrt_radius_parameter: bool,
        /// Write sampled trajectories (sample, t, x1..xn) as CSV.
        #[arg(long)]
        emit_trajectories: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        trajectory_count: usize,
        #[arg(long, default_value_t = 50)]
        trajectory_steps: usize,
    },
    /// Index of the cut-off field against eps, as a table.
    JacobiIndex {
        #[arg(long, allow_hyphen_values = true)]
        curvature: f64,
        #[arg(long)]
        length: f64,
        #[arg(long, default_value_t = 2e-4)]
        eps_min: f64,
        #[arg(long, default_value_t = 0.2)]
        eps_max: f64,
        #[arg(long, default_value_t = 12)]
        points: usize,
    },
    /// Invariant suite for Jacobi fields and the index form.
    JacobiVerify {
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("SUBINDEX_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("SUBINDEX_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<Report> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    configure_threads()?;
    match cli.command {
        Command::Classify { input } => commands::classify_command(&input, cli.tol),
        Command::TorusTable { dim, grid } => commands::torus_table(dim, grid),
        Command::TorusClassify { dim, point } => {
            commands::torus_classify(dim, &commands::parse_point(&point)?, cli.tol)
        }
        Command::TorusConnectivity { dim, level, eps, grid } => commands::torus_connectivity(dim, level, eps, grid),
        Command::FlowVerify {
            dim,
            radius,
            samples,
            omega_samples,
            sqrt_radius_parameter,
            emit_trajectories,
            trajectory_count,
            trajectory_steps,
        } => {
            let cfg = FlowConfig {
                dim,
                radius,
                samples,
                omega_samples,
                seed: cli.seed,
                parameter: if sqrt_radius_parameter {
                    OmegaParameter::SqrtRadius
                } else {
                    OmegaParameter::LengthScaled
                },
            };
            let report = commands::flow_verify(&cfg)?;
            if let Some(path) = emit_trajectories {
                let rows = commands::flow_trajectories(&cfg, trajectory_count, trajectory_steps)?;
                write_atomic(&path, &render_csv(&rows)?)?;
            }
            Ok(report)
        }
        Command::JacobiIndex {
            curvature,
            length,
            eps_min,
            eps_max,
            points,
        } => commands::jacobi_index(curvature, length, &commands::geometric_eps(eps_min, eps_max, points)?),
        Command::JacobiVerify { samples } => commands::jacobi_verify(samples, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.format;
    let out = cli.out.clone();
    let result = run(cli).and_then(|report| {
        let bytes = report.render(format)?;
        match &out {
            Some(path) => write_atomic(path, &bytes)?,
            None => std::io::stdout().lock().write_all(&bytes)?,
        }
        Ok(report.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("subindex: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("subindex: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
