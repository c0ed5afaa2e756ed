//! Command-line front end for extremal optimization experiments.

mod args;
mod commands;
mod error;
mod manifest;
mod solve;
mod values;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match args::Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match commands::dispatch(&cli.command, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eo: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
