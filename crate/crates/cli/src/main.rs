mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Failure classes with distinct exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or invalid input files (exit 2).
    Config(String),
    /// A numeric routine failed (exit 3).
    Numeric(String),
    /// A check ran and did not pass (exit 1).
    Check(String),
}

impl CliError {
    pub fn io(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<newton_ensemble::Error> for CliError {
    fn from(e: newton_ensemble::Error) -> Self {
        use newton_ensemble::Error::*;
        match e {
            InvalidInput(_)
            | NotFullDimensional { .. }
            | NegativeCoordinate { .. }
            | DimensionUnsupported { .. }
            | Overflow { .. }
            | OutOfSimplex { .. }
            | NonDelzant { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Config(msg) | CliError::Numeric(msg) | CliError::Check(msg)) = &e;
            let kind = match e {
                CliError::Config(_) => "config error",
                CliError::Numeric(_) => "numeric failure",
                CliError::Check(_) => "check failed",
            };
            eprintln!("{kind}: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}
