//! `stochairy`: batch runs for the stochastic Airy operator.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 numerical
//! failure, 1 I/O failure. Errors are also reported on stderr as one JSON
//! object. `STOCHAIRY_THREADS` caps the worker pool.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;
mod svg;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{compare, ensemble, riccati, solve, tools};
use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "stochairy", version, about = "Spectra of the stochastic Airy operator and the β-ensemble edge")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lowest Dirichlet eigenvalues per noise realization.
    SolveSao(solve::SolveArgs),
    /// Edge-scaled top eigenvalues of the tridiagonal β-ensemble.
    Ensemble(ensemble::EnsembleArgs),
    /// KS distance and moments between an edge sample and operator eigenvalues.
    Compare(compare::CompareArgs),
    /// Riccati explosion counts over a λ grid, with the eigenvalue-count check.
    Riccati(riccati::RiccatiArgs),
    /// Growth ratios of the averaged noise path.
    Diagnose(tools::DiagnoseArgs),
    /// One sampled noise path.
    SamplePath(tools::SamplePathArgs),
    /// Raw propagation of (u, u^[1]) for one λ.
    Propagate(tools::PropagateArgs),
    /// The finite-difference matrix of one realization.
    Assemble(tools::AssembleArgs),
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("STOCHAIRY_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("STOCHAIRY_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    match cli.command {
        Command::SolveSao(a) => solve::run(a),
        Command::Ensemble(a) => ensemble::run(a),
        Command::Compare(a) => compare::run(a),
        Command::Riccati(a) => riccati::run(a),
        Command::Diagnose(a) => tools::diagnose(a),
        Command::SamplePath(a) => tools::sample_path(a),
        Command::Propagate(a) => tools::propagate(a),
        Command::Assemble(a) => tools::assemble(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let err = CliError::Usage(e.kind().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
