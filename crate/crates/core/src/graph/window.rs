use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::ops::Range;

use chrono::{DateTime, TimeDelta, Utc};

use super::centrality::SimpleGraph;
use super::GraphError;
use crate::ingest::{ActorId, MessageEvent, UnitMapping};

/// Window placement over a corpus range.
///
/// Window `k` covers `[corpus_start + k*step, corpus_start + k*step + window_length)`.
/// Every position whose interval overlaps `[corpus_start, corpus_end)` is
/// kept, so with sliding windows each instant is covered the same number of
/// times, including near the range edges.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeWindowConfig {
    pub window_length: TimeDelta,
    pub step: TimeDelta,
    pub corpus_start: DateTime<Utc>,
    pub corpus_end: DateTime<Utc>,
}

impl TimeWindowConfig {
    pub fn new(
        window_length: TimeDelta,
        step: TimeDelta,
        corpus_start: DateTime<Utc>,
        corpus_end: DateTime<Utc>,
    ) -> Result<Self, GraphError> {
        let cfg = TimeWindowConfig {
            window_length,
            step,
            corpus_start,
            corpus_end,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Seven-day tumbling windows.
    pub fn weekly(corpus_start: DateTime<Utc>, corpus_end: DateTime<Utc>) -> Self {
        TimeWindowConfig {
            window_length: TimeDelta::days(7),
            step: TimeDelta::days(7),
            corpus_start,
            corpus_end,
        }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.window_length.num_seconds() <= 0 {
            return Err(GraphError::InvalidConfig("window_length must be positive".into()));
        }
        if self.step.num_seconds() <= 0 {
            return Err(GraphError::InvalidConfig("step must be positive".into()));
        }
        Ok(())
    }

    fn secs(&self) -> (i64, i64) {
        (self.window_length.num_seconds(), self.step.num_seconds())
    }

    /// Range of window offsets `k` relative to `corpus_start`.
    fn k_bounds(&self) -> Option<(i64, i64)> {
        let (len, step) = self.secs();
        let span = (self.corpus_end - self.corpus_start).num_seconds();
        if span <= 0 || len <= 0 || step <= 0 {
            return None;
        }
        let k_min = (-len).div_euclid(step) + 1;
        let k_max = (span - 1).div_euclid(step);
        Some((k_min, k_max))
    }

    pub fn window_count(&self) -> usize {
        self.k_bounds().map_or(0, |(lo, hi)| (hi - lo + 1) as usize)
    }

    /// `(window_start, window_end)` for window `index`.
    pub fn bounds(&self, index: usize) -> (DateTime<Utc>, DateTime<Utc>) {
        let (k_min, _) = self.k_bounds().unwrap_or((0, -1));
        let (_, step) = self.secs();
        let start = self.corpus_start + TimeDelta::seconds(step * (k_min + index as i64));
        (start, start + self.window_length)
    }

    /// Indices of the windows whose interval contains `ts`.
    pub fn windows_containing(&self, ts: DateTime<Utc>) -> Range<usize> {
        let Some((k_min, k_max)) = self.k_bounds() else {
            return 0..0;
        };
        if ts < self.corpus_start || ts >= self.corpus_end {
            return 0..0;
        }
        let (len, step) = self.secs();
        let rel = (ts - self.corpus_start).num_seconds();
        let hi = rel.div_euclid(step).min(k_max);
        let lo = ((rel - len).div_euclid(step) + 1).max(k_min);
        if lo > hi {
            return 0..0;
        }
        (lo - k_min) as usize..(hi - k_min + 1) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeStats {
    pub message_count: u32,
    pub weight_sum: f64,
}

/// Directed weighted interaction graph for one window.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowedGraph {
    pub window_index: usize,
    pub window_start: DateTime<Utc>,
    pub window_end: DateTime<Utc>,
    /// Sorted; only actors that sent or received within the window.
    pub nodes: Vec<ActorId>,
    pub edges: BTreeMap<(ActorId, ActorId), EdgeStats>,
}

impl WindowedGraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Undirected simple graph over `nodes` (same index order).
    pub fn simple_graph(&self) -> SimpleGraph {
        let index: HashMap<&ActorId, usize> = self.nodes.iter().enumerate().map(|(i, a)| (a, i)).collect();
        SimpleGraph::from_edges(self.nodes.len(), self.edges.keys().map(|(s, d)| (index[s], index[d])))
    }
}

/// Folds time-sorted events into one graph per window position.
///
/// With `unit_filter`, only events whose sender belongs to the named unit are
/// used; their recipients are kept whatever their unit.
pub fn build_windows(
    events: &[MessageEvent],
    cfg: &TimeWindowConfig,
    unit_filter: Option<(&str, &UnitMapping)>,
) -> Vec<WindowedGraph> {
    let count = cfg.window_count();
    let mut edge_maps: Vec<HashMap<(&ActorId, &ActorId), EdgeStats>> = (0..count).map(|_| HashMap::new()).collect();

    for event in events {
        if let Some((unit, mapping)) = unit_filter {
            if !mapping.contains(unit, &event.sender) {
                continue;
            }
        }
        for w in cfg.windows_containing(event.timestamp) {
            for r in &event.recipients {
                let stats = edge_maps[w].entry((&event.sender, &r.actor)).or_insert(EdgeStats {
                    message_count: 0,
                    weight_sum: 0.0,
                });
                stats.message_count += 1;
                stats.weight_sum += r.weight;
            }
        }
    }

    edge_maps
        .into_iter()
        .enumerate()
        .map(|(index, map)| {
            let (window_start, window_end) = cfg.bounds(index);
            let mut nodes = BTreeSet::new();
            let edges: BTreeMap<_, _> = map
                .into_iter()
                .map(|((s, d), stats)| {
                    nodes.insert(s.clone());
                    nodes.insert(d.clone());
                    ((s.clone(), d.clone()), stats)
                })
                .collect();
            WindowedGraph {
                window_index: index,
                window_start,
                window_end,
                nodes: nodes.into_iter().collect(),
                edges,
            }
        })
        .collect()
}

/// Debug export: `window_index,src,dst,count,weight_sum`.
pub fn write_edge_list<W: Write>(graphs: &[WindowedGraph], writer: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["window_index", "src", "dst", "count", "weight_sum"])?;
    for g in graphs {
        for ((src, dst), stats) in &g.edges {
            wtr.write_record([
                g.window_index.to_string(),
                src.to_string(),
                dst.to_string(),
                stats.message_count.to_string(),
                stats.weight_sum.to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Recipient;

    fn t(days: f64) -> DateTime<Utc> {
        DateTime::from_timestamp((days * 86_400.0) as i64, 0).unwrap()
    }

    fn actor(s: &str) -> ActorId {
        ActorId::new(format!("{s}@x.com")).unwrap()
    }

    fn event(day: f64, from: &str, to: &[(&str, f64)]) -> MessageEvent {
        MessageEvent {
            message_id: format!("{from}-{day}"),
            timestamp: t(day),
            sender: actor(from),
            recipients: to
                .iter()
                .map(|(a, w)| Recipient {
                    actor: actor(a),
                    weight: *w,
                })
                .collect(),
            in_reply_to: None,
            subject_key: String::new(),
            tokens: vec![],
        }
    }

    #[test]
    fn tumbling_windows() {
        let cfg = TimeWindowConfig::weekly(t(0.0), t(14.0));
        let graphs = build_windows(&[event(0.0, "a", &[("b", 1.0)])], &cfg, None);
        assert_eq!(graphs.len(), 2);
        let e = graphs[0].edges[&(actor("a"), actor("b"))];
        assert_eq!(e.message_count, 1);
        assert!(graphs[1].is_empty());
        assert_eq!(graphs[1].window_start, t(7.0));
    }

    #[test]
    fn recipient_weights_accumulate() {
        let cfg = TimeWindowConfig::weekly(t(0.0), t(7.0));
        let evs = [
            event(1.0, "a", &[("b", 1.0), ("c", 0.5)]),
            event(2.0, "a", &[("c", 0.5)]),
        ];
        let g = &build_windows(&evs, &cfg, None)[0];
        assert_eq!(g.edges[&(actor("a"), actor("b"))].weight_sum, 1.0);
        let ac = g.edges[&(actor("a"), actor("c"))];
        assert_eq!((ac.message_count, ac.weight_sum), (2, 1.0));
        assert_eq!(g.nodes, [actor("a"), actor("b"), actor("c")]);
    }

    /// Oracle: enumerate window intervals directly and test containment.
    fn containing_by_enumeration(cfg: &TimeWindowConfig, ts: DateTime<Utc>) -> Vec<usize> {
        (0..cfg.window_count())
            .filter(|&i| {
                let (s, e) = cfg.bounds(i);
                s <= ts && ts < e && ts >= cfg.corpus_start && ts < cfg.corpus_end
            })
            .collect()
    }

    #[test]
    fn sliding_event_lands_in_seven_windows() {
        let cfg = TimeWindowConfig::new(TimeDelta::days(7), TimeDelta::days(1), t(0.0), t(14.0)).unwrap();
        let expected = containing_by_enumeration(&cfg, t(3.0));
        assert_eq!(expected.len(), 7);
        let graphs = build_windows(&[event(3.0, "a", &[("b", 1.0)])], &cfg, None);
        let hits: Vec<_> = graphs
            .iter()
            .filter(|g| !g.is_empty())
            .map(|g| g.window_index)
            .collect();
        assert_eq!(hits, expected);
        assert!(hits.windows(2).all(|w| w[1] == w[0] + 1));
    }

    #[test]
    fn containment_matches_enumeration() {
        for (len_h, step_h) in [(168, 24), (168, 168), (240, 168), (5, 3), (24, 24)] {
            let cfg =
                TimeWindowConfig::new(TimeDelta::hours(len_h), TimeDelta::hours(step_h), t(0.0), t(20.0)).unwrap();
            for h in (-30..520).step_by(7) {
                let ts = t(h as f64 / 24.0);
                let fast: Vec<_> = cfg.windows_containing(ts).collect();
                assert_eq!(
                    fast,
                    containing_by_enumeration(&cfg, ts),
                    "len {len_h} step {step_h} at {h}h"
                );
            }
        }
    }

    #[test]
    fn empty_range_and_invalid_config() {
        let cfg = TimeWindowConfig::weekly(t(5.0), t(5.0));
        assert!(build_windows(&[event(5.0, "a", &[("b", 1.0)])], &cfg, None).is_empty());
        assert!(TimeWindowConfig::new(TimeDelta::zero(), TimeDelta::days(1), t(0.0), t(1.0)).is_err());
        assert!(TimeWindowConfig::new(TimeDelta::days(1), TimeDelta::seconds(-1), t(0.0), t(1.0)).is_err());
    }

    #[test]
    fn unit_filter_uses_sender() {
        let mut units = UnitMapping::new();
        units.assign(actor("a"), "u1").unwrap();
        units.assign(actor("b"), "u2").unwrap();
        let cfg = TimeWindowConfig::weekly(t(0.0), t(7.0));
        let evs = [event(1.0, "a", &[("b", 1.0)]), event(2.0, "b", &[("c", 1.0)])];
        let g = &build_windows(&evs, &cfg, Some(("u1", &units)))[0];
        assert_eq!(g.edges.len(), 1);
        assert!(g.edges.contains_key(&(actor("a"), actor("b"))));
    }

    #[test]
    fn edge_list_export() {
        let cfg = TimeWindowConfig::weekly(t(0.0), t(7.0));
        let graphs = build_windows(&[event(1.0, "a", &[("b", 1.0), ("c", 0.5)])], &cfg, None);
        let mut out = Vec::new();
        write_edge_list(&graphs, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "window_index,src,dst,count,weight_sum\n0,a@x.com,b@x.com,1,1\n0,a@x.com,c@x.com,1,0.5\n"
        );
    }
}
