use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use optomech::run::{load, run_to_disk, Command};
use optomech::AppError;

/// Quantum noise budgets for optomechanical force measurement.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Force-referred noise spectrum over the grid.
    Spectrum(Args),
    /// Noise at one frequency across a parameter range.
    Sweep(Args),
    /// Time-domain simulation checked against the analytic spectra.
    Oracle(Args),
    /// Monte Carlo detection threshold.
    Detect(Args),
    /// Check the configuration without running anything.
    Validate(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON scenario file.
    config: PathBuf,
}

const THREADS_VAR: &str = "OPTOMECH_THREADS";

fn configure_threads() -> Result<(), AppError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| AppError::validation_at(THREADS_VAR, format!("expected a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| AppError::validation_at(THREADS_VAR, e.to_string()))
}

fn run(cli: Cli) -> Result<(), AppError> {
    configure_threads()?;
    let (command, args) = match cli.command {
        Cmd::Spectrum(a) => (Some(Command::Spectrum), a),
        Cmd::Sweep(a) => (Some(Command::Sweep), a),
        Cmd::Oracle(a) => (Some(Command::Oracle), a),
        Cmd::Detect(a) => (Some(Command::Detect), a),
        Cmd::Validate(a) => (None, a),
    };
    let sc = load(&args.config)?;
    match command {
        None => {
            let report = json!({"valid": true, "normalized": sc.normalized_echo()});
            println!("{}", serde_json::to_string_pretty(&report).expect("serializes"));
        }
        Some(c) => {
            for p in run_to_disk(c, &sc)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let diag = serde_json::to_string(&e.diagnostic()).expect("serializes");
            eprintln!("{diag}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
