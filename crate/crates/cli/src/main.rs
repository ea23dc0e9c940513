//! `bootperc`: command-line front end for the bootstrap percolation library.
//!
//! Every run writes its resolved configuration to stderr as a single JSON
//! line before any result is printed to stdout. Exit status: 0 success,
//! 1 domain or configuration error, 2 numeric error, 3 I/O error.

mod commands;
mod format;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "bootperc", version, about = "Bootstrap percolation on thickened lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Growth root β_k(u).
    Beta {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        u: f64,
    },
    /// g_k(z) = −log β_k(1 − e^{−z}).
    G {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        z: f64,
    },
    /// Threshold constant λ(d, r).
    Lambda {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// All λ(d, r) for 2 ≤ r ≤ d ≤ dmax as CSV.
    LambdaTable {
        #[arg(long, default_value_t = 7)]
        dmax: u32,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Probability of no L-gap, exactly or by simulation.
    Lgap {
        #[arg(long)]
        ell: u32,
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Closure of the infected set in a grid file, printed as a grid file.
    Closure {
        #[arg(long)]
        input: std::path::PathBuf,
    },
    /// Span of the infected set in a grid file.
    Span {
        #[arg(long)]
        input: std::path::PathBuf,
        /// Compute the span from the closure instead of by merging.
        #[arg(long)]
        direct: bool,
    },
    /// Internally spanned rectangle and internally filled component with
    /// L ≤ size ≤ 2L.
    Witness {
        #[arg(long)]
        input: std::path::PathBuf,
        #[arg(long = "L")]
        #[serde(rename = "L")]
        l: usize,
    },
    /// Monte Carlo estimate of an event probability.
    Estimate {
        #[arg(long)]
        event: String,
        #[arg(long)]
        structure: std::path::PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Stochastic bisection for p_α = inf{p : P(event) ≥ α}.
    Threshold {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        structure: std::path::PathBuf,
        #[arg(long)]
        event: String,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1e-3)]
        ptol: f64,
    },
    /// Batch of estimates from a sweep configuration, written as CSV.
    Sweep {
        #[arg(long)]
        config: std::path::PathBuf,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("BOOTPERC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("BOOTPERC_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        return Err("BOOTPERC_THREADS must be a positive integer, got `0`".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    match commands::run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
