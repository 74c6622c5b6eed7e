//! `sovlab` — command-line harness around the spin-chain laboratory.
//!
//! Every subcommand reads an optional JSON config, resolves defaults into an
//! effective configuration, runs its checks, and persists
//! `<out>/<run-id>/{config.json, report.json, tables/*.csv}`. Exit codes:
//! 0 all verdicts pass, 1 a residual exceeded its bound, 2 configuration or
//! evaluation error, 3 a capacity guard fired or an iterative run came back
//! incomplete.

mod commands;
mod config;
mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{Completed, Method, Outcome, VerifyTarget};
use config::Overrides;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, or evaluation at an invalid point (exit 2).
    Config(String),
    /// A capacity guard fired or an iterative run stayed incomplete (exit 3).
    Incomplete(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Incomplete(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Incomplete(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "sovlab",
    version,
    about = "Separation-of-variables laboratory for twisted graded spin chains \
             and the Hubbard model"
)]
struct Cli {
    /// JSON run configuration; defaults are used when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed override (beats the config; SOVLAB_SEED is the fallback).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Residual tolerance override.
    #[arg(long, global = true, value_name = "BOUND")]
    tol: Option<f64>,

    /// Output directory override for run artifacts.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Spectrum method (spectrum subcommand only).
    #[arg(long, global = true, value_enum)]
    method: Option<Method>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one algebraic relation family and report its residuals.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
    },
    /// Solve the joint node spectrum and cross-check it against
    /// diagonalization, eigenvector reconstruction, and the root columns.
    Spectrum,
    /// Build the separated basis and certify its rank.
    SovRank,
    /// Construct a Q-function per state and extract its root content.
    Qsc,
    /// Run the Hubbard-chain relation, commutation, and rank checks.
    Hubbard,
    /// Rebuild the two-site reference table and diff it against the solvers.
    ReproduceAppendixB,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = Cli::parse();
    let method = cli.method.unwrap_or_default();
    let execute = || -> Result<Completed, CliError> {
        let raw = config::load_raw(cli.config.as_deref())?;
        let overrides = Overrides {
            seed: cli.seed,
            tol: cli.tol,
            out: cli.out.as_ref().map(|p| p.to_string_lossy().into_owned()),
        };
        let cfg = raw.resolve(&overrides)?;
        match cli.command {
            Command::Verify { target } => commands::run_verify(cfg, target),
            Command::Spectrum => commands::run_spectrum(cfg, method),
            Command::SovRank => commands::run_sov_rank(cfg),
            Command::Qsc => commands::run_qsc(cfg),
            Command::Hubbard => commands::run_hubbard(cfg),
            Command::ReproduceAppendixB => commands::run_reproduce(cfg),
        }
    };
    match execute() {
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Ok(completed) => {
            let dir = match report::persist(&completed.report) {
                Ok(dir) => dir,
                Err(e) => {
                    eprintln!("error: {e}");
                    return e.exit_code();
                }
            };
            for v in &completed.report.verdicts {
                let tag = if v.pass { "PASS" } else { "FAIL" };
                println!("[{tag}] {}: {:e} {} {:e}", v.check, v.value, v.op, v.bound);
            }
            for note in &completed.report.notes {
                println!("note: {note}");
            }
            println!("report: {}", dir.display());
            match completed.outcome {
                Outcome::Pass => 0,
                Outcome::ResidualFailure => 1,
                Outcome::Incomplete => 3,
            }
        }
    }
}
