use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod boundary;
mod output;
mod planning;
mod verify;

use output::Format;

/// Engagement zones and minimum-time paths around them.
#[derive(Debug, Parser)]
#[command(name = "ezpath", version, about, allow_negative_numbers = true)]
struct Cli {
    /// More log output (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample an engagement-zone boundary for one threat.
    EzBoundary(boundary::BoundaryArgs),
    /// Plan a minimum-time path for a scenario file.
    Plan(planning::PlanArgs),
    /// Compare the planned path with the circumnavigation baselines.
    Compare(planning::PlanArgs),
    /// Check closed-form zone membership against the brute-force oracle.
    Verify(verify::VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Pursuer,
    Turret,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Directory for output files (created if missing).
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Format for tabular output; JSON summaries are always written.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// What a command found, beyond plain success.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    VerificationFailed,
    NotConverged,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::VerificationFailed => 1,
            Status::NotConverged => 4,
        }
    }
}

/// Usage, parse and I/O problems exit 2; infeasible scenarios exit 3.
fn error_code(err: &anyhow::Error) -> u8 {
    let infeasible = |e: &ezpath::Error| matches!(e, ezpath::Error::Infeasible(_));
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<ezpath::Error>() {
            return if infeasible(e) { 3 } else { 2 };
        }
        if let Some(ezpath::ScenarioError::Invalid(e)) =
            cause.downcast_ref::<ezpath::ScenarioError>()
        {
            return if infeasible(e) { 3 } else { 2 };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::EzBoundary(args) => boundary::run(&args),
        Command::Plan(args) => planning::run_plan(&args),
        Command::Compare(args) => planning::run_compare(&args),
        Command::Verify(args) => verify::run(&args),
    };
    match result {
        Ok(status) => ExitCode::from(status.code()),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(error_code(&err))
        }
    }
}
