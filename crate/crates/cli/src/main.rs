mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::commands::{execute, Outcome};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(Outcome::Holds) => ExitCode::SUCCESS,
        Ok(Outcome::Violated) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
