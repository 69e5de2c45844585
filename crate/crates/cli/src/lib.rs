//! Command-line front end: configuration, dispatch, reports and the
//! acceptance suite.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod input;
pub mod report;
pub mod suite;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Format};
use config::{Settings, BUDGET_ENV};
use error::{CliError, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use report::Report;

/// Parses settings and runs the command, without writing anything.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let env = std::env::var(BUDGET_ENV).ok();
    let settings = Settings::resolve(&cli.global, env.as_deref())?;
    let start = Instant::now();
    let outcome = commands::dispatch(&cli.command, &settings)?;
    Ok(Report::new(
        cli.command.name(),
        serde_json::to_value(&cli.command)?,
        settings,
        outcome,
        start.elapsed(),
    ))
}

pub fn write_report(report: &Report) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match &report.config.output {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    match report.config.format {
        Format::Json => writeln!(sink, "{}", report.to_json()?)?,
        Format::Csv => report.write_csv(&mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

/// Full program: returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if let Err(e) = write_report(&report) {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    if report.pass || report.config.no_fail {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
