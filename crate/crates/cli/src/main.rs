//! `polytrack`: synthesize, analyze and simulate tracking algorithms for
//! time-varying quadratic costs.

mod artifacts;
mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use artifacts::ArtifactWriter;
use config::{Flags, NpFlags, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl From<polytrack_core::Error> for CliError {
    fn from(e: polytrack_core::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "polytrack", version, about = "Rate-optimal tracking of polynomially moving optima")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize the rate-optimal algorithm for a sector and order
    Synth(Flags),
    /// Worst-case convergence rate of an algorithm over the sector
    Analyze(Flags),
    /// Run one algorithm on a moving quadratic cost
    Simulate(Flags),
    /// Run several algorithms on the same cost
    Compare(Flags),
    /// Interpolation feasibility check for a candidate rate
    NpCheck {
        #[command(flatten)]
        flags: Flags,
        #[command(flatten)]
        np: NpFlags,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (name, flags, np) = match &cli.command {
        Command::Synth(f) => ("synth", f, None),
        Command::Analyze(f) => ("analyze", f, None),
        Command::Simulate(f) => ("simulate", f, None),
        Command::Compare(f) => ("compare", f, None),
        Command::NpCheck { flags, np } => ("np-check", flags, Some(np)),
    };
    let cfg = RunConfig::resolve(flags, np)?;
    let mut out = ArtifactWriter::new(&flags.out)?;
    match name {
        "synth" => commands::synth(&cfg, &mut out)?,
        "analyze" => commands::analyze(&cfg, &mut out)?,
        "simulate" => commands::simulate(&cfg, &mut out)?,
        "compare" => commands::compare(&cfg, &mut out)?,
        _ => commands::np_check(&cfg, &mut out)?,
    }
    out.finish(name, flags.config.as_deref())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
