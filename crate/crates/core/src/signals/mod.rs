//! The six per-unit communication signals.
//!
//! | signal                  | dimension | computed from                         |
//! |-------------------------|-----------|---------------------------------------|
//! | central leadership      | structure | betweenness centralization per window |
//! | balanced contribution   | structure | variance of contribution indices      |
//! | rotating leadership     | dynamics  | oscillation of actor betweenness      |
//! | rapid response          | dynamics  | reply delays and nudges               |
//! | honest sentiment        | content   | dispersion of message emotionality    |
//! | innovative language     | content   | JS divergence from a reference corpus |

mod content;
mod contribution;
mod record;
mod response;
mod rotation;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use content::{
    honest_sentiment, innovative_language, jensen_shannon, message_emotionality, Emotionality, LanguageDeviation,
    LexiconConfig, ReferenceDictionary,
};
pub use contribution::{
    activity_counts, balanced_contribution, balanced_contribution_from, contribution_index, Activity,
};
pub use record::{
    analyze_corpus, compute_signal_record, periods_for, read_signal_csv, read_signal_csv_from, write_signal_csv,
    write_signal_csv_to, Period, PeriodGranularity, SignalConfig, SignalRecord, UnitScope, SIGNAL_COLUMNS,
};
pub use response::{extract_response_events, rapid_response, RapidResponse, ResponseEvent};
pub use rotation::{oscillation_count, rotating_leadership, rotation_rate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("no activity")]
    NoActivity,
    #[error("insufficient actors: {found} active, need at least 2")]
    InsufficientActors { found: usize },
    #[error("series too short: {windows} window(s), need at least 3")]
    SeriesTooShort { windows: usize },
    #[error("no response events")]
    NoResponses,
    #[error("empty message")]
    EmptyMessage,
    #[error("insufficient messages: {found} non-empty, need at least 2")]
    InsufficientMessages { found: usize },
    #[error("no content")]
    NoContent,
    #[error("no events for unit {unit:?} in period")]
    NoEvents { unit: String },
    #[error("invalid lexicon: {0}")]
    InvalidLexicon(String),
    #[error("{0}")]
    Input(String),
}

/// Which axis of group communication a signal describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Structure,
    Dynamics,
    Content,
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub(crate) fn population_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}
