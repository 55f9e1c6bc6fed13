use std::process::ExitCode;

use clap::Parser;
use uec_cli::config::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match uec_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("uec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
