//! `dicke-witness`: witness coefficients, noise thresholds, figure data and
//! verification reports for Dicke-state entanglement witnesses.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dicke_witness::robustness::{Criterion, Figure};
use dicke_witness::Family;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "dicke-witness", version, about)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the coefficients ω_i of a witness.
    Witness {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Excitation number; defaults to N/2 for prop5 and 1 for cor8/prop9.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Critical white-noise fraction of a witness or of the reference criterion (`huber`).
    Pcrit {
        #[arg(long)]
        family: Criterion,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Data behind one of the comparison figures.
    Compare {
        /// One of 2, 3a, 3b, 4.
        #[arg(long)]
        figure: Figure,
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Numerical verification; exits 1 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// Every partial transpose of the witness is positive semidefinite.
    Ppt,
    /// Cross-sector singular values against their closed form.
    Svd,
    /// Exhaustive split-product maximum and overlap bounds.
    Lemma10,
    /// Random biseparable states never reach negative expectation.
    Bisep,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub check: Check,
    #[arg(long)]
    pub family: Option<Family>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub delta: Option<usize>,
    #[arg(long)]
    pub x: Option<usize>,
    #[arg(long, default_value_t = 24)]
    pub nmax: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Pass threshold for eigenvalues and expectations.
    #[arg(long, default_value_t = dicke_witness::verification::DEFAULT_TOL)]
    pub tol: f64,
}

fn configure_threads() -> Result<(), commands::CliError> {
    let Ok(raw) = std::env::var("WITNESS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            commands::CliError::Usage(format!("WITNESS_THREADS must be a positive integer, got '{raw}'"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| commands::CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command_line = std::iter::once("dicke-witness".to_owned())
        .chain(std::env::args().skip(1))
        .collect::<Vec<_>>()
        .join(" ");
    let result = configure_threads().and_then(|()| commands::run(&cli, &command_line));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
