use std::process::ExitCode;

use casimir_cyl::error::CliError;
use casimir_cyl::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("casimir-cyl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
