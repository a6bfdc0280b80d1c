use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use orgsignals::synth::write_mbox;
use orgsignals::{generate, ScenarioSpec};

use crate::output::{require_file, required, OutDir};
use crate::Common;

const OUTPUTS: [&str; 5] = [
    "events.csv",
    "expected.json",
    "positive.txt",
    "negative.txt",
    "reference.csv",
];

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Scenario JSON.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Also render the corpus as `corpus.mbox`.
    #[arg(long)]
    pub mbox: bool,
    #[command(flatten)]
    pub common: Common,
}

pub fn run(mut a: SimulateArgs) -> Result<()> {
    let cfg = a.common.resolve()?;
    cfg.fill_path(&mut a.scenario, "scenario");
    cfg.fill_flag(&mut a.mbox, "mbox")?;
    cfg.check_unused()?;

    let scenario = required(a.scenario, "scenario")?;
    require_file(&scenario, "scenario")?;
    let spec = ScenarioSpec::from_path(&scenario)?;
    let mut files = OUTPUTS.to_vec();
    if a.mbox {
        files.push("corpus.mbox");
    }
    let out = OutDir::prepare(&a.common, &files, &[])?;
    let corpus = generate(&spec)?;
    corpus.write_to_dir(&out.path(""))?;
    if a.mbox {
        write_mbox(&corpus.events, &out.path("corpus.mbox"))?;
    }
    println!(
        "simulated {} message(s) among {} actor(s) -> {}",
        corpus.events.len(),
        corpus.actors.len(),
        out.path("events.csv").display()
    );
    Ok(())
}
