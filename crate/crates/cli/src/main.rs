//! `pcfcalc`: monomial tables, exact verification suites and convergence data for p.c.f. fractals.

mod config;
mod converge;
mod error;
mod output;
mod tables;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Options, RunConfig};
use converge::{Experiment, TestFunction};
use error::CliError;
use verify::Suite;

#[derive(Parser, Debug)]
#[command(
    name = "pcfcalc",
    version,
    about = "Exact multiharmonic calculus on fully symmetric p.c.f. fractals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    options: Options,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the alpha, beta, gamma tables and check them against the printed reference digits
    Tables {
        /// Also fail on the listed misprinted reference cells
        #[arg(long)]
        strict: bool,
    },
    /// Run exact identity suites and report pass/fail
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Emit convergence data for plotting
    Converge {
        #[arg(value_enum)]
        experiment: Experiment,
        /// monomial:J for Q_(J,1) or multiharmonic:K for random jets of order K
        #[arg(long = "fn", value_name = "FAMILY:ORDER")]
        function: Option<TestFunction>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::from_options(cli.options)?;
    match cli.command {
        Command::Tables { strict } => tables::run(&cfg, strict),
        Command::Verify { suite } => verify::run(&cfg, suite),
        Command::Converge {
            experiment,
            function,
        } => converge::run(&cfg, experiment, function),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
