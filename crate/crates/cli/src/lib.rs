//! Command-line front end for the `uec` codec and redundancy laboratory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod tokens;
pub mod verify;

use config::{Cli, Command, RunConfig};
use error::CliError;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Encode(a) => commands::encode(a),
        Command::Decode(a) => commands::decode(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Shtarkov(a) => commands::shtarkov(a),
        Command::Redundancy(a) => commands::redundancy(a),
        Command::Verify(a) => {
            let c = &a.common;
            if c.trials < 10_000 {
                return Err(CliError::Usage("--trials must be at least 10000".into()));
            }
            if !(c.tol > 0.0) {
                return Err(CliError::Usage("--tol must be positive".into()));
            }
            let settings = verify::Settings {
                seed: c.seed,
                trials: c.trials,
                tol: c.tol,
            };
            let config =
                RunConfig::from_common("verify", c).with_option("suite", format!("{:?}", a.suite).to_lowercase());
            let report = verify::report(config, a.suite, settings)?;
            output::emit(&report, Some(&report.claims), c.format, c.output.as_deref())?;
            if report.summary.passed {
                Ok(())
            } else {
                Err(CliError::Failed {
                    failed: report.summary.failed,
                    total: report.summary.total,
                })
            }
        }
    }
}
