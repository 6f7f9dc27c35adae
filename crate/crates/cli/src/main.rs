//! `solharm` command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on
//! invalid input. `SOLHARM_THREADS` sets the worker thread count.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("SOLHARM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("SOLHARM_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let result = match &cli.command {
        Command::Verify(a) => commands::verify(a, cli.format),
        Command::Eigenfunction(a) => commands::eigenfunction(a, cli.format),
        Command::Bm(a) => commands::bm(a, cli.format),
    };
    match result {
        Ok(outcome) => {
            if let Err(e) = output::emit(cli.out.as_deref(), &outcome.body) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            eprintln!("{}", outcome.summary);
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
