//! Seeded synthetic corpora with planted communication regimes.
//!
//! A scenario fixes who talks to whom ([`Topology`]), how fast replies come
//! back, how many nudges precede each reply and how emotional and how
//! off-dictionary the message bodies are. [`generate`] turns it into a
//! time-sorted event stream plus the lexicon files the content signals need,
//! and records the signal values the construction guarantees in
//! [`ExpectedSignals`].
//!
//! Conversations are pairwise ping-pong: each turn is a burst of `nudges`
//! messages one minute apart, and the other side answers `reply_delay` after
//! the burst began.

mod generate;
mod mbox;

use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::ActorId;

pub use generate::{generate, ExpectedSignals, SyntheticCorpus, SyntheticLexicon};
pub use mbox::{write_mbox, write_mbox_to};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid scenario field `{field}`: {reason}")]
    InvalidField { field: &'static str, reason: String },
    #[error("scenario json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> SynthError {
    SynthError::InvalidField {
        field,
        reason: reason.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Topology {
    /// Actor 0 talks with everyone else.
    Star,
    /// Actor i talks with i + 1, wrapping around.
    Ring,
    /// A star whose hub moves every `rotation_period_days`, cycling through
    /// the first `hubs` actors.
    RotatingStar {
        rotation_period_days: u32,
        #[serde(default = "default_hubs")]
        hubs: usize,
    },
    /// Erdős–Rényi: each pair talks with probability `p`.
    Random { p: f64 },
}

fn default_hubs() -> usize {
    2
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DelaySpec {
    Constant { hours: f64 },
    Uniform { a: f64, b: f64 },
}

impl DelaySpec {
    pub fn min_hours(&self) -> f64 {
        match *self {
            DelaySpec::Constant { hours } => hours,
            DelaySpec::Uniform { a, .. } => a,
        }
    }

    pub fn max_hours(&self) -> f64 {
        match *self {
            DelaySpec::Constant { hours } => hours,
            DelaySpec::Uniform { b, .. } => b,
        }
    }
}

/// Per message the emotional share of tokens is drawn uniformly from
/// `emotional_fraction ± spread` (clamped to [0, 1]), so its variance grows
/// with `spread²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconMix {
    pub emotional_fraction: f64,
    #[serde(default)]
    pub spread: f64,
}

impl Default for LexiconMix {
    fn default() -> Self {
        LexiconMix {
            emotional_fraction: 0.2,
            spread: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vocabulary {
    /// Share of non-emotional tokens drawn from the reference dictionary;
    /// the rest are out-of-dictionary words.
    pub in_dictionary_fraction: f64,
    #[serde(default = "default_tokens")]
    pub tokens_per_message: usize,
}

fn default_tokens() -> usize {
    20
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary {
            in_dictionary_fraction: 0.9,
            tokens_per_message: default_tokens(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub n_actors: usize,
    pub duration_days: u32,
    pub topology: Topology,
    pub reply_delay_hours: DelaySpec,
    /// Messages per turn; every reply answers a run of this many.
    #[serde(default = "default_nudges", alias = "nudge_profile")]
    pub nudges: u32,
    #[serde(default)]
    pub lexicon_mix: LexiconMix,
    #[serde(default)]
    pub vocabulary: Vocabulary,
    pub seed: u64,
    #[serde(default = "default_start")]
    pub start: DateTime<Utc>,
    #[serde(default = "default_domain")]
    pub domain: String,
}

fn default_nudges() -> u32 {
    1
}

fn default_start() -> DateTime<Utc> {
    DateTime::parse_from_rfc3339("2024-01-01T00:00:00Z")
        .expect("constant")
        .with_timezone(&Utc)
}

fn default_domain() -> String {
    "synth.example".into()
}

impl ScenarioSpec {
    /// A minimal scenario; tweak fields from here.
    pub fn new(n_actors: usize, duration_days: u32, topology: Topology, seed: u64) -> Self {
        ScenarioSpec {
            n_actors,
            duration_days,
            topology,
            reply_delay_hours: DelaySpec::Constant { hours: 4.0 },
            nudges: 1,
            lexicon_mix: LexiconMix::default(),
            vocabulary: Vocabulary::default(),
            seed,
            start: default_start(),
            domain: default_domain(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SynthError> {
        let spec: ScenarioSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self, SynthError> {
        let text = std::fs::read_to_string(path).map_err(|source| SynthError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n_actors < 2 {
            return Err(invalid("n_actors", "need at least 2 actors"));
        }
        if self.duration_days == 0 {
            return Err(invalid("duration_days", "must be positive"));
        }
        match self.topology {
            Topology::Ring if self.n_actors < 3 => {
                return Err(invalid("n_actors", "a ring needs at least 3 actors"));
            }
            Topology::RotatingStar {
                rotation_period_days,
                hubs,
            } => {
                if self.n_actors < 3 {
                    return Err(invalid("n_actors", "a rotating star needs at least 3 actors"));
                }
                if rotation_period_days == 0 || !self.duration_days.is_multiple_of(rotation_period_days) {
                    return Err(invalid(
                        "topology.rotation_period_days",
                        "must be positive and divide duration_days",
                    ));
                }
                if hubs == 0 || hubs > self.n_actors {
                    return Err(invalid("topology.hubs", "must be between 1 and n_actors"));
                }
            }
            Topology::Random { p } if !(0.0..=1.0).contains(&p) => {
                return Err(invalid("topology.p", "must lie in [0, 1]"));
            }
            _ => {}
        }
        let (lo, hi) = (self.reply_delay_hours.min_hours(), self.reply_delay_hours.max_hours());
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(invalid("reply_delay_hours", "need 0 < min <= max, finite"));
        }
        if self.nudges == 0 {
            return Err(invalid("nudges", "must be at least 1"));
        }
        if lo * 3600.0 <= (self.nudges as f64 - 1.0) * 60.0 + 1.0 {
            return Err(invalid(
                "reply_delay_hours",
                "shortest reply must come after the last nudge (nudges are one minute apart)",
            ));
        }
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.lexicon_mix.emotional_fraction) {
            return Err(invalid("lexicon_mix.emotional_fraction", "must lie in [0, 1]"));
        }
        if !unit(self.lexicon_mix.spread) {
            return Err(invalid("lexicon_mix.spread", "must lie in [0, 1]"));
        }
        if !unit(self.vocabulary.in_dictionary_fraction) {
            return Err(invalid("vocabulary.in_dictionary_fraction", "must lie in [0, 1]"));
        }
        if self.vocabulary.tokens_per_message == 0 {
            return Err(invalid("vocabulary.tokens_per_message", "must be positive"));
        }
        if ActorId::new(format!("user0@{}", self.domain)).is_err() {
            return Err(invalid(
                "domain",
                format!("{:?} is not a usable mail domain", self.domain),
            ));
        }
        Ok(())
    }
}
