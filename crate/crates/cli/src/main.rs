//! `relent`: fit relevant distributions, run the double-well experiment,
//! estimate drifts, integrate the transport equation and verify the library.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod manifest;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relent::ErrorClass;

pub use manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(name = "relent", version, about = "Least-biased ensembles, drift estimation and transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit the relevant distribution of a discrete system to expectation constraints.
    Fit(FitArgs),
    /// Run the double-well molecular dynamics experiment from a `key value` config file.
    Simulate(SimulateArgs),
    /// Estimate the reweighted drift of F on a grid of targets from a trajectory file.
    Drift(DriftArgs),
    /// Integrate df/dt = s·v(f) on a drift curve and compare with a trajectory.
    Transport(TransportArgs),
    /// Run the cross-route and oracle checks.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitMode {
    /// Maximize the Gibbs-Jaynes entropy.
    Jaynes,
    /// Maximize the Gibbs-Jaynes entropy with the shell probabilities of --base imposed.
    JaynesInvariant,
    /// Maximize the relative entropy from --base.
    Relative,
    /// Relative entropy from --base, normalized inside every invariant shell.
    Shellwise,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Discrete system file.
    #[arg(long)]
    pub system: PathBuf,
    /// Constraints file: `observable_name target_value` lines.
    #[arg(long)]
    pub constraints: PathBuf,
    /// Maximization route.
    #[arg(long, value_enum, default_value = "jaynes")]
    pub mode: FitMode,
    /// Base distribution as `state,probability` CSV.
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// Output distribution CSV (stdout when omitted).
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Output multipliers report (stderr when omitted).
    #[arg(long)]
    pub multipliers: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Configuration file of `key value` lines; unset keys take their defaults.
    pub config: PathBuf,
    /// Output trajectory file (stdout when omitted).
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DriftArgs {
    /// Trajectory file written by `simulate`.
    pub trajectory: PathBuf,
    /// Target grid `first:last:step`, last included.
    #[arg(long)]
    pub targets: String,
    /// Kernel half-width; defaults to 5% of the well minimum position.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Root seed of the bootstrap streams.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Block length of the moving-block bootstrap, in samples.
    #[arg(long, default_value_t = 100)]
    pub block_length: usize,
    /// Number of bootstrap resamples per target.
    #[arg(long, default_value_t = 200)]
    pub resamples: usize,
    /// Output drift CSV (stdout when omitted).
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TransportArgs {
    /// Drift CSV written by `drift`.
    #[arg(long)]
    pub drift: PathBuf,
    /// Trajectory file to compare against.
    #[arg(long)]
    pub trajectory: PathBuf,
    /// Initial value; defaults to F at the first sample, moved to the nearest
    /// end of the drift curve when it lies outside.
    #[arg(long)]
    pub f0: Option<f64>,
    /// End time; defaults to the last sample time.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// RK4 step.
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// Sign s of the drift term, +1 or -1.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sign: f64,
    /// Output `t,f` CSV (stdout when omitted).
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// `quick` checks the fixtures; `full` adds the randomized suites and a desk-scale run.
    #[arg(long, value_enum, default_value = "quick")]
    pub level: Level,
    /// Directory holding the fixture files; the built-in copies are used when omitted.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Unreadable or malformed input outside the library's own parsers.
    Input(String),
    Io(String, std::io::Error),
    Lib(relent::Error),
    /// Failed verification checks, classified by the worst failure.
    Checks { failed: usize, class: ErrorClass },
}

impl From<relent::Error> for CliError {
    fn from(e: relent::Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) => write!(f, "{m}"),
            CliError::Io(path, e) => write!(f, "{path}: {e}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Checks { failed, .. } => write!(f, "{failed} check(s) failed"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        let class = match self {
            CliError::Usage(_) => return 64,
            CliError::Input(_) | CliError::Io(..) => ErrorClass::Contract,
            CliError::Lib(e) => e.class(),
            CliError::Checks { class, .. } => *class,
        };
        match class {
            ErrorClass::Contract | ErrorClass::Io => 2,
            ErrorClass::Numerical => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Fit(a) => commands::fit(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Drift(a) => commands::drift(&a),
        Command::Transport(a) => commands::transport(&a),
        Command::Verify(a) => verify::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
