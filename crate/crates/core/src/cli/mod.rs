//! Command-line driver.
//!
//! Every subcommand reads an optional JSON config (unknown keys rejected),
//! applies flag overrides on top, writes CSV outputs plus a `summary.json`
//! into `--out`, and maps failures to exit codes: 0 success, 1 numerical or
//! acceptance failure, 2 usage error.

mod common;
mod gadget;
mod mix;
mod mixbound;
mod pseudospec;
mod qsigs;
mod table;

use std::ffi::OsString;

use clap::{Parser, Subcommand};

pub use common::CliError;

#[derive(Debug, Parser)]
#[command(name = "nhps", version, about = "Non-Hermitian pseudospectrum estimation by simulated dissipative preparation and QSIGS")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep σ₀(A − z) over a complex grid.
    Pseudospec(pseudospec::Args),
    /// Prepare a state and estimate σ₀ with simulated shots; print the membership verdict.
    Qsigs(qsigs::Args),
    /// Measure discrete-channel mixing times for the Hatano–Nelson chain.
    Mix(mix::Args),
    /// Build a complexity gadget and verify its spectral contract.
    #[command(subcommand)]
    Gadget(gadget::GadgetCommand),
    /// Tabulate and certify the analytic mixing-time bound.
    MixBound(mixbound::Args),
    /// Regenerate a reference result table.
    #[command(subcommand)]
    Reproduce(table::ReproduceCommand),
}

/// Caps the global rayon pool at `NHPS_THREADS` when set.
fn configure_threads() {
    if let Some(n) = std::env::var("NHPS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    configure_threads();
    let result = match cli.command {
        Command::Pseudospec(a) => pseudospec::run(a),
        Command::Qsigs(a) => qsigs::run(a),
        Command::Mix(a) => mix::run(a),
        Command::Gadget(g) => gadget::run(g),
        Command::MixBound(a) => mixbound::run(a),
        Command::Reproduce(r) => table::run(r),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
