use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use rayon::prelude::*;

use orgsignals::ingest::merge_streams;
use orgsignals::time::parse_utc;
use orgsignals::{parse_mbox, write_event_csv, AliasMap, IngestConfig};

use crate::output::{generated_at, require_file, OutDir};
use crate::{Common, Internal};

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// mbox files; parsed in parallel and merged by timestamp.
    #[arg(value_name = "MBOX")]
    pub inputs: Vec<PathBuf>,
    /// CSV `raw_address,canonical_address`.
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    /// Messages with more recipients than this are dropped [default: 100].
    #[arg(long)]
    pub broadcast_threshold: Option<usize>,
    /// Weight of To recipients [default: 1.0].
    #[arg(long)]
    pub to_weight: Option<f64>,
    /// Weight of Cc recipients [default: 0.5].
    #[arg(long)]
    pub cc_weight: Option<f64>,
    /// Keep messages at or after this instant (RFC 3339 or YYYY-MM-DD, UTC).
    #[arg(long)]
    pub since: Option<String>,
    /// Keep messages before this instant.
    #[arg(long)]
    pub until: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

pub fn run(mut a: IngestArgs) -> Result<()> {
    let cfg = a.common.resolve()?;
    cfg.fill_paths(&mut a.inputs, "inputs");
    cfg.fill_path(&mut a.aliases, "aliases");
    cfg.fill(&mut a.broadcast_threshold, "broadcast-threshold")?;
    cfg.fill(&mut a.to_weight, "to-weight")?;
    cfg.fill(&mut a.cc_weight, "cc-weight")?;
    cfg.fill(&mut a.since, "since")?;
    cfg.fill(&mut a.until, "until")?;
    cfg.check_unused()?;

    if a.inputs.is_empty() {
        bail!("no input mbox files given");
    }
    for p in &a.inputs {
        require_file(p, "mbox")?;
    }
    let mut ingest = IngestConfig::default();
    if let Some(p) = &a.aliases {
        require_file(p, "alias map")?;
        ingest.aliases = AliasMap::from_csv(p)?;
    }
    if let Some(t) = a.broadcast_threshold {
        ingest.broadcast_threshold = t;
    }
    for (w, slot, flag) in [
        (a.to_weight, &mut ingest.to_weight, "to-weight"),
        (a.cc_weight, &mut ingest.cc_weight, "cc-weight"),
    ] {
        if let Some(w) = w {
            if !(w > 0.0 && w <= 1.0) {
                bail!("--{flag} must lie in (0, 1], got {w}");
            }
            *slot = w;
        }
    }
    let instant = |s: &Option<String>, flag: &str| -> Result<Option<chrono::DateTime<chrono::Utc>>> {
        s.as_deref()
            .map(|v| parse_utc(v).with_context(|| format!("--{flag}: cannot parse {v:?}")))
            .transpose()
    };
    let since = instant(&a.since, "since")?;
    let until = instant(&a.until, "until")?;
    if since.is_some() || until.is_some() {
        let lo = since.unwrap_or(chrono::DateTime::<chrono::Utc>::MIN_UTC);
        let hi = until.unwrap_or(chrono::DateTime::<chrono::Utc>::MAX_UTC);
        if lo >= hi {
            bail!("--since must precede --until");
        }
        ingest.date_range = Some((lo, hi));
    }

    let out = OutDir::prepare(&a.common, &["events.csv", "ingest_report.json"], &[])?;
    let streams = a
        .inputs
        .par_iter()
        .map(|p| parse_mbox(p, &ingest))
        .collect::<Result<Vec<_>, _>>()?;
    let (events, report) = merge_streams(streams);
    if let Some(bad) = events.iter().find_map(|e| e.validate().err()) {
        return Err(Internal(bad.to_string()).into());
    }

    let events_path = out.path("events.csv");
    write_event_csv(&events, &events_path)?;
    let mut json = serde_json::Map::new();
    json.insert(
        "inputs".into(),
        a.inputs
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .into(),
    );
    json.insert("events".into(), events.len().into());
    if let serde_json::Value::Object(fields) = serde_json::to_value(&report)? {
        json.extend(fields);
    }
    if !a.common.no_timestamps {
        json.insert("generated_at".into(), generated_at().into());
    }
    let mut text = serde_json::to_string_pretty(&json)?;
    text.push('\n');
    out.write("ingest_report.json", text)?;
    println!(
        "ingested {} event(s) from {} file(s): {} skipped, {} deduplicated, {} broadcast(s) dropped -> {}",
        events.len(),
        a.inputs.len(),
        report.skipped,
        report.deduped,
        report.broadcast_dropped,
        events_path.display()
    );
    Ok(())
}
