//! `oro`: solve robust LPs with optimism, run the simulation grid, train the
//! linear models and fetch NETLIB instances.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 infeasible problem,
//! 3 external service failure. `ORO_LOG` (error, warn, info, debug) sets the
//! log level.

mod commands;
mod fetch;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "oro", version, about = "Optimistic robust optimization toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one robust LP with budgets of uncertainty and optimism
    SolveOrlp(SolveArgs),
    /// Run the (K, R, M) simulation grid and write its CSV
    Experiment(ExperimentArgs),
    /// Train a linear classifier or regressor
    Train(TrainArgs),
    /// Download a NETLIB LP and store it as plain MPS
    FetchNetlib(FetchArgs),
}

#[derive(Args)]
pub struct SolveArgs {
    /// Nominal problem in MPS format
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub mps: Option<PathBuf>,
    /// Generate a random instance instead
    #[arg(long)]
    pub random: bool,
    /// Columns of the random instance
    #[arg(long, default_value_t = 250)]
    pub n: usize,
    /// Inequality rows of the random instance
    #[arg(long, default_value_t = 50)]
    pub rows: usize,
    /// Budget of uncertainty as a fraction of each row's uncertain entries
    #[arg(long)]
    pub k: f64,
    /// Budget of optimism as a fraction of the budget of uncertainty
    #[arg(long)]
    pub r: f64,
    /// Deviation bound as a fraction of |a_ij|
    #[arg(long, default_value_t = 0.1)]
    pub deviation: f64,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// DCA iteration cap
    #[arg(long, default_value_t = 50)]
    pub max_iters: usize,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Family {
    Random,
    Mps,
}

#[derive(Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Flat key = value grid file
    #[arg(long)]
    pub grid_file: PathBuf,
    /// MPS file for the mps family
    #[arg(long)]
    pub mps: Option<PathBuf>,
    /// CSV output; the manifest goes next to it
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
pub enum Task {
    Svc,
    Svr,
    Trimmed,
    Tsvc,
    RobustSvm,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
pub enum RegKind {
    None,
    ApproxL0,
    L12,
    CappedL1,
    Mcp,
    Scad,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Shape {
    Abs,
    Squared,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Inner {
    Conic,
    Subgradient,
}

#[derive(Args)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub task: Task,
    /// Samples, one per line, label last
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value = "none")]
    pub reg: RegKind,
    /// Order of the approximate L0 regularizer
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Regularizer strength (svc, svr)
    #[arg(long, default_value_t = 1.0)]
    pub z: f64,
    #[arg(long)]
    pub nu: Option<f64>,
    /// Trimmed fraction (trimmed)
    #[arg(long, default_value_t = 0.1)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Per-sample ball radius (tsvc, robust-svm)
    #[arg(long, default_value_t = 0.1)]
    pub radius: f64,
    /// Residual shape (trimmed)
    #[arg(long, value_enum, default_value = "squared")]
    pub shape: Shape,
    /// Box on the weights (svc)
    #[arg(long, default_value_t = 1.0)]
    pub weight_bound: f64,
    #[arg(long, value_enum, default_value = "conic")]
    pub inner: Inner,
    #[arg(long, default_value_t = 50)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct FetchArgs {
    /// Instance name, e.g. CAPRI
    #[arg(long)]
    pub name: String,
    /// Where to write the MPS file (default: <name>.mps)
    #[arg(long)]
    pub dest: Option<PathBuf>,
    /// Base URL (http, https or file)
    #[arg(long, default_value = fetch::DEFAULT_MIRROR)]
    pub mirror: String,
}

/// Failure classes, one per non-zero exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Infeasible(String),
    External(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Infeasible(_) => 2,
            Failure::External(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Infeasible(m) | Failure::External(m) => m,
        }
    }
}

impl From<oro_core::Error> for Failure {
    fn from(e: oro_core::Error) -> Self {
        match e {
            oro_core::Error::Infeasible => Failure::Infeasible(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ORO_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let argv: Vec<String> = std::env::args().collect();
    let result = match &cli.command {
        Command::SolveOrlp(a) => commands::solve_orlp(a, &argv),
        Command::Experiment(a) => commands::experiment(a, &argv),
        Command::Train(a) => commands::train(a, &argv),
        Command::FetchNetlib(a) => fetch::fetch_netlib(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
