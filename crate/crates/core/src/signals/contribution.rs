use std::collections::BTreeMap;

use super::{population_variance, SignalError};
use crate::ingest::{ActorId, MessageEvent};

/// `(sent - received) / (sent + received)`, in `[-1, 1]`.
pub fn contribution_index(sent: u64, received: u64) -> Result<f64, SignalError> {
    let total = sent + received;
    if total == 0 {
        return Err(SignalError::NoActivity);
    }
    Ok((sent as f64 - received as f64) / total as f64)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Activity {
    pub sent: u64,
    pub received: u64,
}

impl Activity {
    pub fn contribution_index(&self) -> Result<f64, SignalError> {
        contribution_index(self.sent, self.received)
    }
}

/// Messages sent and recipient occurrences per actor, for actors accepted by
/// `include`. To and Cc receipts count the same.
pub fn activity_counts<'a>(
    events: impl IntoIterator<Item = &'a MessageEvent>,
    include: impl Fn(&ActorId) -> bool,
) -> BTreeMap<ActorId, Activity> {
    let mut counts: BTreeMap<ActorId, Activity> = BTreeMap::new();
    for e in events {
        if include(&e.sender) {
            counts.entry(e.sender.clone()).or_default().sent += 1;
        }
        for r in &e.recipients {
            if include(&r.actor) {
                counts.entry(r.actor.clone()).or_default().received += 1;
            }
        }
    }
    counts
}

/// Population variance of contribution indices over active actors.
pub fn balanced_contribution_from(counts: &BTreeMap<ActorId, Activity>) -> Result<f64, SignalError> {
    let cis: Vec<f64> = counts.values().filter_map(|a| a.contribution_index().ok()).collect();
    if cis.len() < 2 {
        return Err(SignalError::InsufficientActors { found: cis.len() });
    }
    Ok(population_variance(&cis))
}

pub fn balanced_contribution<'a>(
    events: impl IntoIterator<Item = &'a MessageEvent>,
    include: impl Fn(&ActorId) -> bool,
) -> Result<f64, SignalError> {
    balanced_contribution_from(&activity_counts(events, include))
}
