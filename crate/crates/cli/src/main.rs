use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Debug, Parser)]
#[command(
    name = "itrp",
    version,
    about = "Interior trust-region point solver for linearly constrained problems"
)]
struct Cli {
    /// Seed for every random choice (oracle sampling).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    First,
    Second,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// a3, a4, a5 or quadratic.
    #[arg(long)]
    pub assumption: Option<String>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Newton-decrement threshold for the starting point.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Grid resolution for the lower bound when the problem file has no `L`.
    #[arg(long, default_value_t = 1e-3)]
    pub grid_resolution: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the method and write the trace and certificate.
    Solve {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long, default_value = "trace.csv")]
        trace: PathBuf,
        #[arg(long, default_value = "certificate.json")]
        cert: PathBuf,
    },
    /// Check a given point (and optionally multipliers).
    Certify {
        #[arg(long)]
        problem: PathBuf,
        /// JSON array `x`, or object `{"x": [...], "lambda": [...]}`.
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Curvature level in second-order mode (defaults to epsilon).
        #[arg(long)]
        curvature_epsilon: Option<f64>,
        #[arg(long, value_enum, default_value = "first")]
        mode: ModeArg,
        #[arg(long, default_value = "certificate.json")]
        cert: PathBuf,
    },
    /// Compute the approximate analytic center.
    Center {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Sweep epsilon and compare iteration counts with the theoretical budget.
    Bench {
        #[arg(long, required = true, num_args = 1..)]
        problem: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        epsilon_sweep: Vec<f64>,
        #[command(flatten)]
        schedule: ScheduleArgs,
        /// CSV destination (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for one trace per run.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
    /// Run the derivative, inequality and trust-region oracles.
    OracleCheck {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 100)]
        fd_points: usize,
        #[arg(long, default_value_t = 200)]
        trs_instances: usize,
        #[arg(long, default_value_t = 100)]
        cross_instances: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ITRP_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            problem,
            epsilon,
            schedule,
            trace,
            cert,
        } => commands::solve(&problem, epsilon, &schedule, &trace, &cert),
        Command::Certify {
            problem,
            point,
            epsilon,
            curvature_epsilon,
            mode,
            cert,
        } => commands::certify(&problem, &point, epsilon, curvature_epsilon, mode, &cert),
        Command::Center { problem, tol } => commands::center(&problem, tol),
        Command::Bench {
            problem,
            epsilon_sweep,
            schedule,
            out,
            trace_dir,
        } => commands::bench(
            &problem,
            &epsilon_sweep,
            &schedule,
            out.as_deref(),
            trace_dir.as_deref(),
        ),
        Command::OracleCheck {
            trials,
            fd_points,
            trs_instances,
            cross_instances,
        } => commands::oracle_check(cli.seed, trials, fd_points, trs_instances, cross_instances),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
