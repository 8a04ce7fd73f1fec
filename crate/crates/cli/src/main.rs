mod args;
mod commands;
mod error;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("--threads {n}: {e}")))?;
    }
    match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Threshold(a) => commands::threshold(a),
        Command::Generate(a) => commands::generate(a),
        Command::Replay(a) => commands::replay(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.class.exit_code() as u8)
        }
    }
}
