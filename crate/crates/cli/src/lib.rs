//! Batch front end: measure specs in, CSV and JSON artifacts out.

pub mod acceptance;
pub mod bundled;
pub mod cli;
pub mod commands;
pub mod config;
pub mod output;
pub mod report;

use williamson::Error;

pub use config::{Command, RunConfig};

/// Exit status: every check passed.
pub const EXIT_PASS: i32 = 0;
/// Exit status: a check failed or a numeric routine did not converge.
pub const EXIT_FAIL: i32 = 1;
/// Exit status: the input was malformed.
pub const EXIT_INPUT: i32 = 2;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::InvalidMeasure(_) | Error::InvalidArgument(_) | Error::NotNormalizable(_) => EXIT_INPUT,
        _ => EXIT_FAIL,
    }
}

/// Runs one subcommand and returns its exit status; errors go to stderr.
pub fn run(cfg: &RunConfig) -> i32 {
    let result = cfg.validate().and_then(|_| commands::dispatch(cfg));
    match result {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
