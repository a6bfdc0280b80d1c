use std::collections::{BTreeMap, BTreeSet};

use super::SignalError;
use crate::graph::CentralityVector;
use crate::ingest::ActorId;

/// Number of direction changes in `series` after collapsing runs of equal
/// values, i.e. the count of strict local extrema.
pub fn oscillation_count(series: &[f64]) -> usize {
    let mut compressed: Vec<f64> = Vec::with_capacity(series.len());
    for &x in series {
        if compressed.last() != Some(&x) {
            compressed.push(x);
        }
    }
    compressed.windows(3).filter(|w| (w[1] > w[0]) != (w[2] > w[1])).count()
}

/// Mean oscillation count per actor divided by `windows - 2`, a rate in `[0, 1]`.
///
/// Actors missing from a window score 0 there. Only actors whose series is
/// not identically zero enter the mean, so actors that never hold the
/// measured role do not dilute the rate.
pub fn rotation_rate(per_window: &[BTreeMap<ActorId, f64>]) -> Result<f64, SignalError> {
    let w = per_window.len();
    if w < 3 {
        return Err(SignalError::SeriesTooShort { windows: w });
    }
    let actors: BTreeSet<&ActorId> = per_window.iter().flat_map(|m| m.keys()).collect();
    let counts: Vec<usize> = actors
        .into_iter()
        .map(|a| {
            per_window
                .iter()
                .map(|m| m.get(a).copied().unwrap_or(0.0))
                .collect::<Vec<_>>()
        })
        .filter(|s| s.iter().any(|&x| x != 0.0))
        .map(|s| oscillation_count(&s))
        .collect();
    if counts.is_empty() {
        return Ok(0.0);
    }
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    Ok(mean / (w - 2) as f64)
}

/// `(betweenness oscillation rate, contribution-index oscillation rate)` over
/// aligned per-window series.
pub fn rotating_leadership(
    betweenness: &[CentralityVector],
    contribution: &[BTreeMap<ActorId, f64>],
) -> Result<(f64, f64), SignalError> {
    if betweenness.len() != contribution.len() {
        return Err(SignalError::Input(format!(
            "series length mismatch: {} betweenness windows, {} contribution windows",
            betweenness.len(),
            contribution.len()
        )));
    }
    let bc: Vec<BTreeMap<ActorId, f64>> = betweenness
        .iter()
        .map(|c| c.iter().map(|(a, v)| (a.clone(), v)).collect())
        .collect();
    Ok((rotation_rate(&bc)?, rotation_rate(contribution)?))
}
