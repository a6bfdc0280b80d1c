//! `orgsignals`: ingest mailboxes, compute communication signals, calibrate
//! them against performance, and simulate corpora with known answers.

mod analyze;
mod calibrate;
mod config;
mod ingest;
mod output;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::ConfigFile;

#[derive(Parser, Debug)]
#[command(name = "orgsignals", version, about, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse mbox files into the canonical event CSV plus an ingest report.
    Ingest(ingest::IngestArgs),
    /// Compute per-unit signals from an event CSV.
    Analyze(analyze::AnalyzeArgs),
    /// Fit nested OLS models of performance on signal columns.
    Calibrate(calibrate::CalibrateArgs),
    /// Generate a synthetic corpus from a scenario file.
    Simulate(simulate::SimulateArgs),
}

/// Flags every command takes.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// `key = value` file supplying defaults for any long flag.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Run directory receiving all outputs; created if missing.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Overwrite existing outputs.
    #[arg(long)]
    pub force: bool,
    /// Omit the generation timestamp from reports.
    #[arg(long)]
    pub no_timestamps: bool,
}

impl Common {
    /// Loads the config file and merges the shared keys.
    pub fn resolve(&mut self) -> anyhow::Result<ConfigFile> {
        let cfg = ConfigFile::load(self.config.as_deref())?;
        cfg.fill_path(&mut self.out_dir, "out-dir");
        cfg.fill_flag(&mut self.force, "force")?;
        cfg.fill_flag(&mut self.no_timestamps, "no-timestamps")?;
        Ok(cfg)
    }
}

/// A broken internal invariant, as opposed to bad input. Exits with 2.
#[derive(Debug)]
pub struct Internal(pub String);

impl std::fmt::Display for Internal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "internal invariant violated: {}", self.0)
    }
}

impl std::error::Error for Internal {}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Ingest(a) => ingest::run(a),
        Command::Analyze(a) => analyze::run(a),
        Command::Calibrate(a) => calibrate::run(a),
        Command::Simulate(a) => simulate::run(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Internal>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
        Err(_) => ExitCode::from(2),
    }
}
