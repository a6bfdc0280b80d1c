//! Raw archives in, canonical [`MessageEvent`] streams out.
//!
//! Two input forms are supported: RFC 4155 mbox files ([`parse_mbox`]) and the
//! canonical event CSV ([`read_event_csv`] / [`write_event_csv`]). Actor
//! identities are resolved through [`canonicalize_actor`] and an optional
//! [`AliasMap`]; organizational units come from a [`UnitMapping`].

mod address;
mod events_csv;
mod mbox;
mod text;
mod units;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::PathBuf;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use address::{canonicalize_actor, AliasMap};
pub use events_csv::{read_event_csv, read_event_csv_from, write_event_csv, write_event_csv_to};
pub use mbox::{parse_mbox, parse_mbox_bytes, split_mbox};
pub use text::{strip_html, strip_quoted, subject_key, tokenize};
pub use units::{UnitMapping, EXTERNAL_UNIT};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unparseable address: {0:?}")]
    UnparseableAddress(String),
    #[error("row {row}, column {column}: {message}")]
    Schema { row: u64, column: String, message: String },
    #[error("invalid event {message_id}: {reason}")]
    InvalidEvent { message_id: String, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl IngestError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn schema(row: u64, column: &str, message: impl Into<String>) -> Self {
        IngestError::Schema {
            row,
            column: column.to_string(),
            message: message.into(),
        }
    }
}

/// Canonical lowercase e-mail address identifying one actor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ActorId(String);

impl ActorId {
    /// Validates an already-canonical address: lowercase, one `@`, no
    /// whitespace or display-name decoration.
    pub fn new(canonical: impl Into<String>) -> Result<Self, IngestError> {
        let s = canonical.into();
        let bad = || IngestError::UnparseableAddress(s.clone());
        let (local, domain) = s.split_once('@').ok_or_else(bad)?;
        if local.is_empty()
            || domain.is_empty()
            || domain.contains('@')
            || s.chars()
                .any(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"' | ',' | ';'))
            || s.chars().any(char::is_uppercase)
        {
            return Err(bad());
        }
        Ok(ActorId(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for ActorId {
    type Error = IngestError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        ActorId::new(s)
    }
}

impl From<ActorId> for String {
    fn from(a: ActorId) -> String {
        a.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Recipient {
    pub actor: ActorId,
    /// Tie strength in (0, 1]; To and Cc carry different weights.
    pub weight: f64,
}

/// One e-mail after canonicalization.
#[derive(Clone, Debug, PartialEq)]
pub struct MessageEvent {
    pub message_id: String,
    pub timestamp: DateTime<Utc>,
    pub sender: ActorId,
    pub recipients: Vec<Recipient>,
    pub in_reply_to: Option<String>,
    pub subject_key: String,
    pub tokens: Vec<String>,
}

impl MessageEvent {
    /// Checks the structural invariants every emitted event must satisfy.
    pub fn validate(&self) -> Result<(), IngestError> {
        let fail = |reason: &str| IngestError::InvalidEvent {
            message_id: self.message_id.clone(),
            reason: reason.to_string(),
        };
        if self.message_id.is_empty() {
            return Err(fail("empty message id"));
        }
        if self.recipients.is_empty() {
            return Err(fail("no recipients"));
        }
        let mut seen = HashSet::new();
        for r in &self.recipients {
            if r.actor == self.sender {
                return Err(fail("sender listed as recipient"));
            }
            if !(r.weight > 0.0 && r.weight <= 1.0) {
                return Err(fail("recipient weight outside (0, 1]"));
            }
            if !seen.insert(&r.actor) {
                return Err(fail("duplicate recipient"));
            }
        }
        if self
            .tokens
            .iter()
            .any(|t| t.is_empty() || t.contains(char::is_whitespace))
        {
            return Err(fail("malformed token"));
        }
        Ok(())
    }

    pub fn involves(&self, actor: &ActorId) -> bool {
        &self.sender == actor || self.recipients.iter().any(|r| &r.actor == actor)
    }
}

#[derive(Clone, Debug)]
pub struct IngestConfig {
    pub to_weight: f64,
    pub cc_weight: f64,
    /// Messages with more distinct recipients than this are dropped as broadcasts.
    pub broadcast_threshold: usize,
    pub aliases: AliasMap,
    /// Inclusive start, exclusive end.
    pub date_range: Option<(DateTime<Utc>, DateTime<Utc>)>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            to_weight: 1.0,
            cc_weight: 0.5,
            broadcast_threshold: 100,
            aliases: AliasMap::default(),
            date_range: None,
        }
    }
}

/// Counters produced while parsing. Skips are never fatal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub parsed: usize,
    pub skipped: usize,
    pub deduped: usize,
    pub broadcast_dropped: usize,
    pub skip_reasons: BTreeMap<String, usize>,
}

impl IngestReport {
    pub(crate) fn skip(&mut self, reason: &str) {
        self.skipped += 1;
        *self.skip_reasons.entry(reason.to_string()).or_default() += 1;
    }

    pub fn absorb(&mut self, other: &IngestReport) {
        self.parsed += other.parsed;
        self.skipped += other.skipped;
        self.deduped += other.deduped;
        self.broadcast_dropped += other.broadcast_dropped;
        for (k, v) in &other.skip_reasons {
            *self.skip_reasons.entry(k.clone()).or_default() += v;
        }
    }
}

/// Stable sort by timestamp; ties keep their input order.
pub fn sort_events(events: &mut [MessageEvent]) {
    events.sort_by_key(|e| e.timestamp);
}

/// Concatenates per-file streams in the given order, keeps the first
/// occurrence of every message id and sorts the result by timestamp.
pub fn merge_streams(streams: Vec<(Vec<MessageEvent>, IngestReport)>) -> (Vec<MessageEvent>, IngestReport) {
    let mut report = IngestReport::default();
    let mut seen = HashSet::new();
    let mut merged = Vec::new();
    for (events, r) in streams {
        report.absorb(&r);
        for e in events {
            if seen.insert(e.message_id.clone()) {
                merged.push(e);
            } else {
                report.deduped += 1;
                report.parsed -= 1;
            }
        }
    }
    sort_events(&mut merged);
    (merged, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn actor_id_invariants() {
        assert!(ActorId::new("a@x.com").is_ok());
        for bad in ["", "a", "a@", "@x", "a@b@c", "A@x.com", " a@x.com", "<a@x.com>"] {
            assert!(ActorId::new(bad).is_err(), "{bad:?} accepted");
        }
        assert_eq!(ActorId::new("a@x.com").unwrap(), ActorId::new("a@x.com").unwrap());
    }

    fn ev(id: &str, secs: i64) -> MessageEvent {
        MessageEvent {
            message_id: id.into(),
            timestamp: DateTime::from_timestamp(secs, 0).unwrap(),
            sender: ActorId::new("a@x.com").unwrap(),
            recipients: vec![Recipient {
                actor: ActorId::new("b@x.com").unwrap(),
                weight: 1.0,
            }],
            in_reply_to: None,
            subject_key: String::new(),
            tokens: vec![],
        }
    }

    #[test]
    fn validate_rejects_self_send() {
        let mut e = ev("m1", 0);
        assert!(e.validate().is_ok());
        e.recipients.push(Recipient {
            actor: e.sender.clone(),
            weight: 1.0,
        });
        assert!(e.validate().is_err());
    }

    #[test]
    fn merge_keeps_first_and_sorts() {
        let a = (
            vec![ev("m1", 10), ev("m2", 5)],
            IngestReport {
                parsed: 2,
                ..Default::default()
            },
        );
        let b = (
            vec![ev("m1", 1), ev("m3", 7)],
            IngestReport {
                parsed: 2,
                ..Default::default()
            },
        );
        let (merged, report) = merge_streams(vec![a, b]);
        let ids: Vec<_> = merged.iter().map(|e| e.message_id.as_str()).collect();
        assert_eq!(ids, ["m2", "m3", "m1"]);
        assert_eq!(merged[2].timestamp.timestamp(), 10);
        assert_eq!(report.deduped, 1);
        assert_eq!(report.parsed, 3);
    }
}
