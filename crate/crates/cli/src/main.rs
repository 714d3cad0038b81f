//! `bimor`: model generation, reduction, simulation and verification.

mod commands;
mod parse;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "bimor", version, about = "Structure-preserving interpolatory reduction of bilinear systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark model generation.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Interpolation spec files.
    Spec {
        #[command(subcommand)]
        action: SpecAction,
    },
    /// Project a system onto the bases implied by a spec.
    Reduce(ReduceArgs),
    /// Integrate a full or reduced model and write the outputs as CSV.
    Simulate(SimulateArgs),
    /// Relative frequency-domain error of G_1 or G_2 on the imaginary axis.
    Freqerr(FreqerrArgs),
    /// Check every interpolation condition a spec implies.
    Verify(VerifyArgs),
    /// Run one of the benchmark experiments end to end.
    Reproduce(ReproduceArgs),
}

#[derive(Subcommand)]
enum ModelAction {
    Make(ModelArgs),
}

#[derive(Subcommand)]
enum SpecAction {
    Make(SpecArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelName {
    Msd,
    Rod,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    name: ModelName,
    #[arg(long)]
    n: usize,
    /// Two-input, two-output variant of the mass-spring-damper chain.
    #[arg(long)]
    mimo: bool,
    /// Delay of the heated rod.
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Scale of the rod's bilinear term.
    #[arg(long, default_value_t = 1.0)]
    bilinear_scale: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    V,
    W,
    Two,
    #[value(name = "w=v")]
    WEqualsV,
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long, value_enum)]
    side: SideArg,
    /// V tuple: comma-separated complex literals or `logspace:a:b:npts`.
    #[arg(long, allow_hyphen_values = true)]
    v_points: Option<String>,
    #[arg(long)]
    v_orders: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    w_points: Option<String>,
    #[arg(long)]
    w_orders: Option<String>,
    /// Point lists zipped into additional V tuples (repeat once per level).
    #[arg(long, allow_hyphen_values = true)]
    v_zip: Vec<String>,
    /// Point lists zipped into additional W tuples (repeat once per level).
    #[arg(long, allow_hyphen_values = true)]
    w_zip: Vec<String>,
    /// Read every real value `w` as the pair `iw, -iw`.
    #[arg(long)]
    imaginary: bool,
    #[arg(long)]
    realify: bool,
    #[arg(long, default_value_t = bimor::linalg::DEFAULT_RANK_TOL)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Full model or reduced model file.
    #[arg(long)]
    system: PathBuf,
    /// `msd_siso`, `msd_mimo`, `rod` or `constant:VALUE`.
    #[arg(long)]
    input: String,
    #[arg(long)]
    tf: f64,
    #[arg(long)]
    dt: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FreqerrArgs {
    #[arg(long)]
    fom: PathBuf,
    #[arg(long)]
    rom: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    level: u8,
    /// `logspace:a:b:npts` in rad/s.
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    fom: PathBuf,
    #[arg(long)]
    rom: PathBuf,
    /// Defaults to the spec stored in the reduced model file.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Tolerance for derivative conditions (finite-difference oracle).
    #[arg(long, default_value_t = 1e-5)]
    deriv_tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Experiment {
    MsdSiso,
    MsdMimo,
    Rod,
}

#[derive(Args)]
pub struct ReproduceArgs {
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub outdir: PathBuf,
    /// Final time; defaults to 100 for the chains and 20 for the rod.
    #[arg(long)]
    pub tf: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Frequencies per axis of the error grids.
    #[arg(long, default_value_t = 100)]
    pub grid_points: usize,
}

/// Failure reported on stderr as JSON, with the exit code that goes with it.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bimor::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) | CliError::Usage(_) => 2,
            CliError::Failed(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Usage(_) => "Usage",
            CliError::Failed(_) => "ConditionFailed",
        }
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    exit_code: u8,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Model { action: ModelAction::Make(a) } => commands::model_make(&a),
        Command::Spec { action: SpecAction::Make(a) } => commands::spec_make(&a),
        Command::Reduce(a) => commands::reduce(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Freqerr(a) => commands::freqerr(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Reproduce(a) => reproduce::run(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let report = ErrorReport { error: "Usage", message: e.kind().to_string(), exit_code: 2 };
            let _ = e.print();
            eprintln!("{}", serde_json::to_string(&report).unwrap_or_default());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            let report = ErrorReport { error: e.kind(), message: e.to_string(), exit_code: code };
            eprintln!("{}", serde_json::to_string(&report).unwrap_or_default());
            ExitCode::from(code)
        }
    }
}
