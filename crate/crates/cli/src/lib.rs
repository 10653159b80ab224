//! Batch front end for `ltlab-core`: every command resolves a flat configuration,
//! runs, and emits one self-describing report.

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{resolve, CommandName, Format, Settings};
pub use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ltlab_core::Error),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    /// The run finished but a check failed; the report is still written.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 0 ok, 1 other, 2 scenario, 3 budget, 4 linear algebra, 5 series, 6 regime.
    pub fn exit_code(&self) -> i32 {
        use ltlab_core::Error as E;
        match self {
            CliError::Scenario(_) | CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                E::InvalidScenario(_) | E::Domain(_) | E::DimensionMismatch { .. } => 2,
                E::BudgetExceeded { .. } => 3,
                E::NotPsd { .. } => 4,
                E::NotConverged(_) | E::SingularDomain { .. } => 5,
                E::RegimeMismatch(_) => 6,
                E::InsufficientSamples { .. } | E::Internal(_) | E::SingularPoint(_) => 1,
            },
            CliError::Io(_) | CliError::Csv(_) | CliError::Failed(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ltlab",
    version,
    about = "Local times of Gaussian fields: thresholds, criteria, simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Invocation {
    /// Flat key/value config (TOML, or JSON with a .json extension); flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a scenario by its threshold inequalities.
    Classify(Invocation),
    /// Evaluate the integral criteria on a cutoff ladder.
    Criterion(Invocation),
    /// Monte Carlo and closed-form moments along an eps ladder.
    Simulate(Invocation),
    /// Chaos series of the regularized local time, or the composition identity.
    Chaos(Invocation),
    /// Ratio bands of the auxiliary integral estimates.
    Lemmas(Invocation),
}

impl Command {
    pub fn parts(&self) -> (CommandName, &Invocation) {
        match self {
            Command::Classify(i) => (CommandName::Classify, i),
            Command::Criterion(i) => (CommandName::Criterion, i),
            Command::Simulate(i) => (CommandName::Simulate, i),
            Command::Chaos(i) => (CommandName::Chaos, i),
            Command::Lemmas(i) => (CommandName::Lemmas, i),
        }
    }
}

/// Rendered report plus the failure, if any, that decides the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub settings: Settings,
    pub text: String,
    pub failure: Option<CliError>,
}

/// Resolves the configuration and runs the command. Errors that leave no report are
/// returned as `Err`.
pub fn run(name: CommandName, inv: &Invocation) -> Result<Outcome, CliError> {
    let mut settings = resolve(name, inv.config.as_deref(), &inv.settings)?;
    let (text, failure) = commands::dispatch(name, &mut settings)?;
    Ok(Outcome {
        settings,
        text,
        failure,
    })
}

/// Writes the report to `--out` or standard output.
pub fn emit(outcome: &Outcome) -> Result<(), CliError> {
    match &outcome.settings.out {
        Some(p) => std::fs::write(p, &outcome.text)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.text.as_bytes())?;
        }
    }
    Ok(())
}
