//! `hankel`: Grunsky tables, coefficient-relation checks, bound-chain audits
//! and extremal search, with JSON or CSV reports.
//!
//! Exit codes: 0 success, 1 verification failure on certified input,
//! 2 configuration error, 3 truncation order too small.

mod commands;
mod config;
mod exit;
mod family;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Settings;
use crate::exit::CliError;

#[derive(Debug, Parser)]
#[command(name = "hankel", version, about = "Grunsky coefficients and Hankel determinants of univalent functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grunsky table of the square-root transform, plus H2(2) and H3(1)
    Grunsky(Settings),
    /// Coefficient-relation residuals and canonical Grunsky probes
    Verify(Settings),
    /// Every step of the bound chain, plus the phi/psi extrema
    Audit(Settings),
    /// Multi-start search for extremal determinants over a family
    Search(Settings),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, flags, command): (&str, &Settings, fn(&Settings) -> Result<commands::Outcome, CliError>) =
        match &cli.command {
            Command::Grunsky(s) => ("grunsky", s, commands::grunsky),
            Command::Verify(s) => ("verify", s, commands::verify),
            Command::Audit(s) => ("audit", s, commands::audit),
            Command::Search(s) => ("search", s, commands::search),
        };
    let settings = flags.resolve(name)?;
    let outcome = command(&settings)?;
    report::write(&outcome.report, settings.format(), settings.out.as_deref())?;
    match outcome.failure {
        Some(msg) => Err(CliError::Verification(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on malformed arguments, matching the config-error code
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hankel: {e}");
            e.code()
        }
    }
}
