//! `skellam`: simulate Skellam-family counting processes, tabulate their
//! closed-form distributions, and run the verification harness.
//!
//! Output is data for external plotting: paths and pmfs as CSV, reports as
//! JSON. Exit codes: 0 success, 1 usage or input error, 2 a verification
//! check failed.

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

mod cmd;
mod emit;
mod specio;

#[derive(Parser)]
#[command(
    name = "skellam",
    version,
    about = "Skellam-family process simulator and distribution calculator",
    after_help = "Times are in the same (dimensionless) units as the rate functions. \
                  When --seed is absent the SKELLAM_SEED environment variable is read, \
                  defaulting to 0."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample process paths to CSV files plus a run manifest
    Simulate(cmd::simulate::SimulateArgs),
    /// Tabulate a probability mass function, one CSV per requested time
    Pmf(cmd::pmf::PmfArgs),
    /// Mean, variance, and dispersion as a JSON report
    Moments(cmd::reports::MomentsArgs),
    /// Correlation-decay classification as a JSON report
    Classify(cmd::reports::ClassifyArgs),
    /// Level-occupancy distribution values as a JSON report
    Hitting(cmd::reports::HittingArgs),
    /// Run Monte Carlo verification checks against the closed forms
    Verify(cmd::verify::VerifyArgs),
    /// Filter a tick stream to bid jumps and fit waiting-time laws
    Tick(cmd::tick::TickArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let ok = matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = err.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    let outcome = match cli.command {
        Command::Simulate(args) => cmd::simulate::run(args),
        Command::Pmf(args) => cmd::pmf::run(args),
        Command::Moments(args) => cmd::reports::run_moments(args),
        Command::Classify(args) => cmd::reports::run_classify(args),
        Command::Hitting(args) => cmd::reports::run_hitting(args),
        Command::Verify(args) => cmd::verify::run(args),
        Command::Tick(args) => cmd::tick::run(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
