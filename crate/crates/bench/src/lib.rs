//! Fixtures shared by the benchmarks under `benches/`.

use orgsignals::synth::{DelaySpec, Topology};
use orgsignals::{generate, ScenarioSpec, SyntheticCorpus};

/// Sparse random organisation with one to three day reply delays.
pub fn random_corpus(n_actors: usize, duration_days: u32, p: f64) -> SyntheticCorpus {
    let mut spec = ScenarioSpec::new(n_actors, duration_days, Topology::Random { p }, 17);
    spec.reply_delay_hours = DelaySpec::Uniform { a: 24.0, b: 72.0 };
    generate(&spec).expect("valid scenario")
}
