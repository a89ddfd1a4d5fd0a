//! `envderiv` command-line front end.

mod args;
mod commands;
mod failure;
mod input;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use failure::Failure;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.record());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.global.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("worker pool: {e}")))?;
    }
    let outcome = commands::dispatch(&cli.global, &cli.command)?;
    match &cli.global.out {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| Failure::Core(e.into()))?,
        None => print!("{}", outcome.text),
    }
    match outcome.violation {
        Some(msg) => Err(Failure::Claim(msg)),
        None => Ok(()),
    }
}
