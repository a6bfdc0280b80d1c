use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use chrono::TimeDelta;
use clap::{Args, ValueEnum};
use rayon::prelude::*;

use orgsignals::graph::write_edge_list;
use orgsignals::ingest::sort_events;
use orgsignals::signals::{analyze_corpus, periods_for, write_signal_csv, PeriodGranularity};
use orgsignals::time::format_utc;
use orgsignals::{
    build_windows, read_event_csv, AliasMap, LexiconConfig, SignalConfig, SignalRecord, TimeWindowConfig, UnitMapping,
};

use crate::output::{require_file, required, OutDir};
use crate::{Common, Internal};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Granularity {
    Whole,
    Monthly,
}

impl std::str::FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Canonical event CSV.
    #[arg(long)]
    pub events: Option<PathBuf>,
    /// CSV `address,unit`; without it the whole corpus is one unit `all`.
    #[arg(long)]
    pub units: Option<PathBuf>,
    /// Alias map applied to unit-map addresses.
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    /// Positive sentiment words, one per line.
    #[arg(long)]
    pub positive: Option<PathBuf>,
    /// Negative sentiment words, one per line.
    #[arg(long)]
    pub negative: Option<PathBuf>,
    /// Reference dictionary CSV `word,relative_frequency`.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Window length in days [default: 7].
    #[arg(long)]
    pub window_days: Option<f64>,
    /// Window step in days [default: 7].
    #[arg(long)]
    pub step_days: Option<f64>,
    /// One record per unit for the whole corpus or per calendar month.
    #[arg(long, value_enum)]
    pub period: Option<Granularity>,
    /// Replies later than this many days after a run starts do not count [default: 14].
    #[arg(long)]
    pub response_horizon_days: Option<f64>,
    /// Also write each window's edge list under `windows/`.
    #[arg(long)]
    pub debug_windows: bool,
    #[command(flatten)]
    pub common: Common,
}

fn days(v: f64, flag: &str) -> Result<TimeDelta> {
    let secs = (v * 86_400.0).round();
    if !(secs.is_finite() && secs >= 1.0) {
        bail!("--{flag} must be positive, got {v}");
    }
    Ok(TimeDelta::seconds(secs as i64))
}

fn check_record(r: &SignalRecord) -> Result<(), Internal> {
    let unit_interval = [
        "central_leadership",
        "degree_centralization",
        "rotating_leadership",
        "rotating_leadership_ci",
        "responsiveness",
        "honest_sentiment",
        "innovative_language",
        "oov_rate",
    ];
    for c in orgsignals::signals::SIGNAL_COLUMNS[6..].iter() {
        if let Some(v) = r.signal(c) {
            let ok = v.is_finite() && v >= 0.0 && (!unit_interval.contains(c) || v <= 1.0 + 1e-9);
            if !ok {
                return Err(Internal(format!("unit {}: {c} = {v}", r.unit)));
            }
        }
    }
    Ok(())
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn run(mut a: AnalyzeArgs) -> Result<()> {
    let cfg = a.common.resolve()?;
    for (slot, key) in [
        (&mut a.events, "events"),
        (&mut a.units, "units"),
        (&mut a.aliases, "aliases"),
        (&mut a.positive, "positive"),
        (&mut a.negative, "negative"),
        (&mut a.reference, "reference"),
    ] {
        cfg.fill_path(slot, key);
    }
    cfg.fill(&mut a.window_days, "window-days")?;
    cfg.fill(&mut a.step_days, "step-days")?;
    cfg.fill(&mut a.period, "period")?;
    cfg.fill(&mut a.response_horizon_days, "response-horizon-days")?;
    cfg.fill_flag(&mut a.debug_windows, "debug-windows")?;
    cfg.check_unused()?;

    let events_path = required(a.events, "events")?;
    require_file(&events_path, "event file")?;
    for (p, what) in [
        (&a.units, "unit map"),
        (&a.aliases, "alias map"),
        (&a.positive, "positive lexicon"),
        (&a.negative, "negative lexicon"),
        (&a.reference, "reference dictionary"),
    ] {
        if let Some(p) = p {
            require_file(p, what)?;
        }
    }
    let signal_cfg = SignalConfig {
        window_length: days(a.window_days.unwrap_or(7.0), "window-days")?,
        step: days(a.step_days.unwrap_or(7.0), "step-days")?,
        response_horizon: days(a.response_horizon_days.unwrap_or(14.0), "response-horizon-days")?,
        lexicon: LexiconConfig::load(a.positive.as_deref(), a.negative.as_deref(), a.reference.as_deref())?,
    };
    let granularity = match a.period.unwrap_or(Granularity::Whole) {
        Granularity::Whole => PeriodGranularity::Whole,
        Granularity::Monthly => PeriodGranularity::Monthly,
    };
    let aliases = match &a.aliases {
        Some(p) => AliasMap::from_csv(p)?,
        None => AliasMap::default(),
    };
    let units = a
        .units
        .as_deref()
        .map(|p| UnitMapping::from_csv(p, &aliases))
        .transpose()?;

    let subdirs: &[&str] = if a.debug_windows { &["windows"] } else { &[] };
    let out = OutDir::prepare(&a.common, &["signals.csv"], subdirs)?;

    let mut events = read_event_csv(&events_path)?;
    sort_events(&mut events);
    let records = analyze_corpus(&events, units.as_ref(), granularity, &signal_cfg);
    for r in &records {
        check_record(r)?;
    }
    let signals_path = out.path("signals.csv");
    write_signal_csv(&records, &signals_path).with_context(|| format!("writing {}", signals_path.display()))?;

    if a.debug_windows {
        let periods = periods_for(&events, granularity);
        let jobs: Vec<(&SignalRecord, usize)> = records
            .iter()
            .filter_map(|r| periods.iter().position(|p| p.start == r.period_start).map(|i| (r, i)))
            .collect();
        jobs.par_iter().try_for_each(|&(r, pi)| -> Result<()> {
            let period = periods[pi];
            let windows = TimeWindowConfig::new(signal_cfg.window_length, signal_cfg.step, period.start, period.end)?;
            let lo = events.partition_point(|e| e.timestamp < period.start);
            let hi = events.partition_point(|e| e.timestamp < period.end);
            let filter = units.as_ref().map(|m| (r.unit.as_str(), m));
            let graphs = build_windows(&events[lo..hi], &windows, filter);
            let name = format!(
                "windows/{}_{}.csv",
                file_safe(&r.unit),
                file_safe(&format_utc(period.start))
            );
            let file = std::fs::File::create(out.path(&name)).with_context(|| format!("writing {name}"))?;
            write_edge_list(&graphs, std::io::BufWriter::new(file)).with_context(|| format!("writing {name}"))?;
            Ok(())
        })?;
    }

    let complete = records.iter().filter(|r| r.central_leadership.is_some()).count();
    println!(
        "{} record(s) over {} event(s), {} with structure signals -> {}",
        records.len(),
        events.len(),
        complete,
        signals_path.display()
    );
    Ok(())
}
