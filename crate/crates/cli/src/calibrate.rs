use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use orgsignals::calibrate::{parse_model_specs, read_performance_csv, ModelSpec, TableOptions, DEFAULT_MODELS};
use orgsignals::nested_model_table;
use orgsignals::signals::read_signal_csv;

use crate::output::{require_file, required, OutDir};
use crate::Common;

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    /// signals.csv written by `analyze`, one row per unit.
    #[arg(long)]
    pub signals: Option<PathBuf>,
    /// CSV `unit,performance`.
    #[arg(long)]
    pub performance: Option<PathBuf>,
    /// Models separated by `|`, terms by `,`; an empty model is intercept
    /// only [default: honest_sentiment|honest_sentiment,responsiveness|honest_sentiment,responsiveness,central_leadership].
    #[arg(long)]
    pub models: Option<String>,
    /// Standardize performance and predictors before fitting.
    #[arg(long)]
    pub zscore: bool,
    #[command(flatten)]
    pub common: Common,
}

pub fn run(mut a: CalibrateArgs) -> Result<()> {
    let cfg = a.common.resolve()?;
    cfg.fill_path(&mut a.signals, "signals");
    cfg.fill_path(&mut a.performance, "performance");
    cfg.fill(&mut a.models, "models")?;
    cfg.fill_flag(&mut a.zscore, "zscore")?;
    cfg.check_unused()?;

    let signals_path = required(a.signals, "signals")?;
    let perf_path = required(a.performance, "performance")?;
    require_file(&signals_path, "signal file")?;
    require_file(&perf_path, "performance file")?;
    let specs: Vec<ModelSpec> = match &a.models {
        Some(m) => parse_model_specs(m)?,
        None => DEFAULT_MODELS
            .iter()
            .map(|m| m.iter().map(|s| s.to_string()).collect())
            .collect(),
    };

    let out = OutDir::prepare(&a.common, &["calibration.csv", "calibration.txt"], &[])?;
    let signals = read_signal_csv(&signals_path)?;
    let performance = read_performance_csv(&perf_path)?;
    let table = nested_model_table(&signals, &performance, &specs, TableOptions { zscore: a.zscore })?;
    for unit in &table.unmatched_units {
        eprintln!("warning: unit {unit:?} is in only one input and was dropped");
    }
    for unit in &table.incomplete_units {
        eprintln!("warning: unit {unit:?} has missing signal values and was dropped");
    }

    out.write("calibration.csv", table.to_csv())?;
    let text = table.render_text();
    out.write("calibration.txt", &text)?;
    print!("{text}");
    Ok(())
}
