//! `expsum` command-line tool.
//!
//! Exit codes: 0 success, 2 invalid input or parameters, 3 a verification
//! invariant failed, 4 numerical failure.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<expsum::Error> for Failure {
    fn from(e: expsum::Error) -> Self {
        use expsum::Error::*;
        let code = match e {
            InvalidInput(_) | DegenerateSum | InvalidRadius { .. } | NotCommensurable(_) | ZeroAtAnchor { .. } => 2,
            NearZeroDivide { .. } | ZeroOnPath { .. } | NoConvergence { .. } | PerturbationExhausted { .. } => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("EXPSUM_THREADS") else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::input(format!("EXPSUM_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::input(format!("cannot configure thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|_| commands::run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
