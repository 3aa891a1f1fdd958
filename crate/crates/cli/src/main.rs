use std::process::ExitCode;

use clap::Parser;
use omsig_cli::args::Cli;

fn main() -> ExitCode {
    match omsig_cli::run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
