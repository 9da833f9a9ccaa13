use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    match gsrisk_cli::execute(gsrisk_cli::Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
