//! `besselinv`: generate benchmark scattering data, solve the inverse
//! problem on an x-grid and recover the potential.
//!
//! Exit status is 0 on success, 1 when the numerics fail (outputs still carry
//! diagnostics) and 2 for configuration or input errors.

// `!(a > b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "besselinv", version, about = "Inverse scattering for the perturbed Bessel equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Args {
    /// JSON file with any of the flags below (kebab-case keys); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: RunConfig,
}

#[derive(Subcommand)]
enum Command {
    /// Write exact scattering data for a benchmark potential.
    Generate(Args),
    /// Solve for the β profile of a dataset.
    Invert(Args),
    /// Turn a β profile into the potential.
    Recover(Args),
    /// Generate, invert and recover in one run, with diagnostics.
    Pipeline(Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (Command::Generate(args) | Command::Invert(args) | Command::Recover(args) | Command::Pipeline(args)) =
        &cli.command;
    let cfg = match &args.config {
        Some(path) => match RunConfig::from_file(path) {
            Ok(file) => file.overlay(args.flags.clone()),
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        },
        None => args.flags.clone(),
    };
    let result = match cli.command {
        Command::Generate(_) => run::generate(&cfg),
        Command::Invert(_) => run::invert_cmd(&cfg),
        Command::Recover(_) => run::recover_cmd(&cfg),
        Command::Pipeline(_) => run::pipeline(&cfg),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.exit_code())
        }
    }
}
