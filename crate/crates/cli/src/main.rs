//! `valseries`: χ tables, single `v_λ` evaluations, non-coherence
//! certificates, purity divisions and the seeded self-test.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::ConfigFile;

#[derive(Parser, Debug)]
#[command(name = "valseries", version, about = "Exact valuations of power series over a dense rank-1 valuation ring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// TOML config with one section per subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every pseudo-random choice (default 42).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Truncation order.
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate λ ↦ v_λ(f) over a geometric grid as CSV.
    Chi(Wrapped),
    /// Evaluate v_λ(f) once.
    Vlambda(Wrapped),
    /// Refute a candidate generating set of the critical ideal and write the certificate.
    Incoherence(Wrapped),
    /// Replay a certificate written by `incoherence`.
    Verify {
        certificate: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run purity divisions on explicit or seeded witnesses.
    Purity(Wrapped),
    /// Run every invariant sweep with the seed.
    Selftest {
        /// Plant a named fault to check that the sweep catches it.
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Wrapped {
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> anyhow::Result<Outcome> {
    let common = match &command {
        Command::Chi(w) | Command::Vlambda(w) | Command::Incoherence(w) | Command::Purity(w) => &w.common,
        Command::Verify { common, .. } | Command::Selftest { common, .. } => common,
    };
    anyhow::ensure!(common.order != Some(0), "--order must be at least 1");
    let cfg = ConfigFile::load(common.config.as_deref())?;
    let (text, outcome) = match &command {
        Command::Chi(w) => commands::chi(&cfg, &w.common)?,
        Command::Vlambda(w) => commands::vlambda(&cfg, &w.common)?,
        Command::Incoherence(w) => commands::incoherence(&cfg, &w.common)?,
        Command::Verify { certificate, common } => commands::verify(&cfg, common, certificate)?,
        Command::Purity(w) => commands::purity(&cfg, &w.common)?,
        Command::Selftest { inject_fault, common } => commands::selftest(&cfg, common, inject_fault.as_deref())?,
    };
    match &common.out {
        Some(path) => std::fs::write(path, &text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(outcome)
}
