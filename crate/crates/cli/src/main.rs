//! `curveop`: build curve operators, run verification suites and tabulate
//! eigenbasis pairings.

mod args;
mod operator;
mod output;
mod pairing;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("CURVEOP_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow::anyhow!("CURVEOP_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| match cli.command {
        Command::Operator(a) => operator::run(&a).map(|()| true),
        Command::Verify(a) => verify::run(&a),
        Command::Pairing(a) => pairing::run(&a).map(|()| true),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
