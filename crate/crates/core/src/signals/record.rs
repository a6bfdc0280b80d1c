use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, TimeDelta, Utc};

use super::content::{honest_sentiment, innovative_language, LexiconConfig};
use super::contribution::{activity_counts, balanced_contribution_from};
use super::response::{extract_response_events, rapid_response};
use super::rotation::rotating_leadership;
use super::{mean, Dimension, SignalError};
use crate::graph::{
    betweenness_centrality, build_windows, degree_centrality, group_centralization, CentralityKind, CentralityVector,
    TimeWindowConfig,
};
use crate::ingest::{ActorId, MessageEvent, UnitMapping, EXTERNAL_UNIT};
use crate::time::{floor_day, floor_month, format_utc, next_month, parse_utc};

#[derive(Clone, Debug)]
pub struct SignalConfig {
    pub window_length: TimeDelta,
    pub step: TimeDelta,
    pub response_horizon: TimeDelta,
    pub lexicon: LexiconConfig,
}

impl Default for SignalConfig {
    fn default() -> Self {
        SignalConfig {
            window_length: TimeDelta::days(7),
            step: TimeDelta::days(7),
            response_horizon: TimeDelta::days(14),
            lexicon: LexiconConfig::default(),
        }
    }
}

/// Half-open analysis period.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Period {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl Period {
    pub fn contains(&self, ts: DateTime<Utc>) -> bool {
        self.start <= ts && ts < self.end
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PeriodGranularity {
    #[default]
    Whole,
    Monthly,
}

/// Whole corpus: midnight of the first day to midnight after the last.
/// Monthly: calendar months in UTC.
pub fn periods_for(events: &[MessageEvent], granularity: PeriodGranularity) -> Vec<Period> {
    let (Some(first), Some(last)) = (
        events.iter().map(|e| e.timestamp).min(),
        events.iter().map(|e| e.timestamp).max(),
    ) else {
        return Vec::new();
    };
    match granularity {
        PeriodGranularity::Whole => vec![Period {
            start: floor_day(first),
            end: floor_day(last) + TimeDelta::days(1),
        }],
        PeriodGranularity::Monthly => {
            let mut out = Vec::new();
            let mut start = floor_month(first);
            while start <= last {
                let end = next_month(start);
                out.push(Period { start, end });
                start = end;
            }
            out
        }
    }
}

/// The actor set a record describes.
#[derive(Clone, Copy, Debug)]
pub enum UnitScope<'a> {
    /// Every actor, reported under the given name.
    All(&'a str),
    Unit {
        name: &'a str,
        mapping: &'a UnitMapping,
    },
}

impl UnitScope<'_> {
    pub fn name(&self) -> &str {
        match self {
            UnitScope::All(name) => name,
            UnitScope::Unit { name, .. } => name,
        }
    }

    pub fn contains(&self, actor: &ActorId) -> bool {
        match self {
            UnitScope::All(_) => true,
            UnitScope::Unit { name, mapping } => mapping.contains(name, actor),
        }
    }

    fn filter(&self) -> Option<(&str, &UnitMapping)> {
        match self {
            UnitScope::All(_) => None,
            UnitScope::Unit { name, mapping } => Some((name, mapping)),
        }
    }
}

/// Signal values for one unit over one period. `None` marks a signal the data
/// could not support.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalRecord {
    pub unit: String,
    pub period_start: DateTime<Utc>,
    pub period_end: DateTime<Utc>,
    pub messages: usize,
    pub active_actors: usize,
    pub windows: usize,
    pub central_leadership: Option<f64>,
    pub degree_centralization: Option<f64>,
    pub balanced_contribution: Option<f64>,
    pub rotating_leadership: Option<f64>,
    pub rotating_leadership_ci: Option<f64>,
    pub avg_response_time_hours: Option<f64>,
    pub avg_nudges: Option<f64>,
    pub responsiveness: Option<f64>,
    pub honest_sentiment: Option<f64>,
    pub innovative_language: Option<f64>,
    pub oov_rate: Option<f64>,
}

pub const SIGNAL_COLUMNS: [&str; 17] = [
    "unit",
    "period_start",
    "period_end",
    "messages",
    "active_actors",
    "windows",
    "central_leadership",
    "degree_centralization",
    "balanced_contribution",
    "rotating_leadership",
    "rotating_leadership_ci",
    "avg_response_time_hours",
    "avg_nudges",
    "responsiveness",
    "honest_sentiment",
    "innovative_language",
    "oov_rate",
];

impl SignalRecord {
    /// Dimension of every signal column, including sub-metrics.
    pub const DIMENSIONS: [(&'static str, Dimension); 11] = [
        ("central_leadership", Dimension::Structure),
        ("degree_centralization", Dimension::Structure),
        ("balanced_contribution", Dimension::Structure),
        ("rotating_leadership", Dimension::Dynamics),
        ("rotating_leadership_ci", Dimension::Dynamics),
        ("avg_response_time_hours", Dimension::Dynamics),
        ("avg_nudges", Dimension::Dynamics),
        ("responsiveness", Dimension::Dynamics),
        ("honest_sentiment", Dimension::Content),
        ("innovative_language", Dimension::Content),
        ("oov_rate", Dimension::Content),
    ];

    pub fn dimension_of(column: &str) -> Option<Dimension> {
        Self::DIMENSIONS.iter().find(|(c, _)| *c == column).map(|(_, d)| *d)
    }

    pub fn empty(unit: &str, period: Period) -> Self {
        SignalRecord {
            unit: unit.to_string(),
            period_start: period.start,
            period_end: period.end,
            messages: 0,
            active_actors: 0,
            windows: 0,
            central_leadership: None,
            degree_centralization: None,
            balanced_contribution: None,
            rotating_leadership: None,
            rotating_leadership_ci: None,
            avg_response_time_hours: None,
            avg_nudges: None,
            responsiveness: None,
            honest_sentiment: None,
            innovative_language: None,
            oov_rate: None,
        }
    }

    /// Value of a numeric signal column by name.
    pub fn signal(&self, column: &str) -> Option<f64> {
        match column {
            "central_leadership" => self.central_leadership,
            "degree_centralization" => self.degree_centralization,
            "balanced_contribution" => self.balanced_contribution,
            "rotating_leadership" => self.rotating_leadership,
            "rotating_leadership_ci" => self.rotating_leadership_ci,
            "avg_response_time_hours" => self.avg_response_time_hours,
            "avg_nudges" => self.avg_nudges,
            "responsiveness" => self.responsiveness,
            "honest_sentiment" => self.honest_sentiment,
            "innovative_language" => self.innovative_language,
            "oov_rate" => self.oov_rate,
            "messages" => Some(self.messages as f64),
            "active_actors" => Some(self.active_actors as f64),
            "windows" => Some(self.windows as f64),
            _ => None,
        }
    }

    fn set_signal(&mut self, column: &str, value: Option<f64>) -> bool {
        let slot = match column {
            "central_leadership" => &mut self.central_leadership,
            "degree_centralization" => &mut self.degree_centralization,
            "balanced_contribution" => &mut self.balanced_contribution,
            "rotating_leadership" => &mut self.rotating_leadership,
            "rotating_leadership_ci" => &mut self.rotating_leadership_ci,
            "avg_response_time_hours" => &mut self.avg_response_time_hours,
            "avg_nudges" => &mut self.avg_nudges,
            "responsiveness" => &mut self.responsiveness,
            "honest_sentiment" => &mut self.honest_sentiment,
            "innovative_language" => &mut self.innovative_language,
            "oov_rate" => &mut self.oov_rate,
            _ => return false,
        };
        *slot = value;
        true
    }
}

/// Computes every signal for `scope` over `period`.
///
/// `events` is the whole time-sorted corpus; messages sent by unit members
/// drive the graph and content signals, contribution indices count only
/// members, and response events are kept when a member is the responder.
pub fn compute_signal_record(
    scope: UnitScope<'_>,
    period: Period,
    events: &[MessageEvent],
    cfg: &SignalConfig,
) -> Result<SignalRecord, SignalError> {
    let lo = events.partition_point(|e| e.timestamp < period.start);
    let hi = events.partition_point(|e| e.timestamp < period.end);
    let period_events = &events[lo..hi];
    let unit_events: Vec<&MessageEvent> = period_events.iter().filter(|e| scope.contains(&e.sender)).collect();
    if unit_events.is_empty() {
        return Err(SignalError::NoEvents {
            unit: scope.name().to_string(),
        });
    }

    let mut record = SignalRecord::empty(scope.name(), period);
    record.messages = unit_events.len();

    // structure and its dynamics, window by window
    let windows = TimeWindowConfig::new(cfg.window_length, cfg.step, period.start, period.end)
        .map_err(|e| SignalError::Input(e.to_string()))?;
    let graphs = build_windows(period_events, &windows, scope.filter());
    record.windows = graphs.len();

    let mut window_ci: Vec<BTreeMap<ActorId, f64>> = vec![BTreeMap::new(); graphs.len()];
    let mut window_activity = vec![BTreeMap::new(); graphs.len()];
    for e in period_events {
        for w in windows.windows_containing(e.timestamp) {
            let counts: &mut BTreeMap<ActorId, (u64, u64)> = &mut window_activity[w];
            if scope.contains(&e.sender) {
                counts.entry(e.sender.clone()).or_default().0 += 1;
            }
            for r in e.recipients.iter().filter(|r| scope.contains(&r.actor)) {
                counts.entry(r.actor.clone()).or_default().1 += 1;
            }
        }
    }
    for (ci, counts) in window_ci.iter_mut().zip(window_activity) {
        for (actor, (sent, received)) in counts {
            if let Ok(v) = super::contribution_index(sent, received) {
                ci.insert(actor, v);
            }
        }
    }

    let mut bc_series: Vec<CentralityVector> = Vec::new();
    let mut ci_series = Vec::new();
    let mut bc_centralization = Vec::new();
    let mut dc_centralization = Vec::new();
    for (g, ci) in graphs.iter().zip(window_ci) {
        let Ok(bc) = betweenness_centrality(g) else {
            continue;
        };
        if let Ok(c) = group_centralization(&bc, CentralityKind::Betweenness) {
            bc_centralization.push(c);
        }
        if let Ok(c) = degree_centrality(g).and_then(|d| group_centralization(&d, CentralityKind::Degree)) {
            dc_centralization.push(c);
        }
        bc_series.push(bc);
        ci_series.push(ci);
    }
    record.central_leadership = (!bc_centralization.is_empty()).then(|| mean(&bc_centralization));
    record.degree_centralization = (!dc_centralization.is_empty()).then(|| mean(&dc_centralization));
    if let Ok((bc_rate, ci_rate)) = rotating_leadership(&bc_series, &ci_series) {
        record.rotating_leadership = Some(bc_rate);
        record.rotating_leadership_ci = Some(ci_rate);
    }

    let counts = activity_counts(period_events, |a| scope.contains(a));
    record.active_actors = counts.len();
    record.balanced_contribution = balanced_contribution_from(&counts).ok();

    let involving: Vec<MessageEvent> = period_events
        .iter()
        .filter(|e| scope.contains(&e.sender) || e.recipients.iter().any(|r| scope.contains(&r.actor)))
        .cloned()
        .collect();
    let responses: Vec<_> = extract_response_events(&involving, cfg.response_horizon)
        .into_iter()
        .filter(|r| scope.contains(&r.responder))
        .collect();
    if let Ok(rr) = rapid_response(&responses) {
        record.avg_response_time_hours = Some(rr.avg_response_time_hours);
        record.avg_nudges = Some(rr.avg_nudges);
        record.responsiveness = Some(rr.responsiveness);
    }

    if cfg.lexicon.has_sentiment() {
        record.honest_sentiment = honest_sentiment(unit_events.iter().map(|e| e.tokens.as_slice()), &cfg.lexicon).ok();
    }
    if !cfg.lexicon.reference.is_empty() {
        let tokens = unit_events.iter().flat_map(|e| e.tokens.iter().map(String::as_str));
        if let Ok(dev) = innovative_language(tokens, &cfg.lexicon.reference) {
            record.innovative_language = Some(dev.divergence);
            record.oov_rate = Some(dev.oov_rate);
        }
    }
    Ok(record)
}

/// One record per (unit, period). Without a mapping everything is one unit
/// named `all`; with one, every mapped unit plus `_external` when unmapped
/// senders exist. Units without messages in a period yield empty records.
pub fn analyze_corpus(
    events: &[MessageEvent],
    units: Option<&UnitMapping>,
    granularity: PeriodGranularity,
    cfg: &SignalConfig,
) -> Vec<SignalRecord> {
    let periods = periods_for(events, granularity);
    let names: Vec<String> = match units {
        None => vec!["all".to_string()],
        Some(mapping) => {
            let mut names: BTreeSet<String> = mapping.units().into_iter().map(str::to_string).collect();
            if events.iter().any(|e| mapping.unit_of(&e.sender) == EXTERNAL_UNIT) {
                names.insert(EXTERNAL_UNIT.to_string());
            }
            names.into_iter().collect()
        }
    };
    let mut out = Vec::new();
    for name in &names {
        let scope = match units {
            None => UnitScope::All(name),
            Some(mapping) => UnitScope::Unit { name, mapping },
        };
        for &period in &periods {
            out.push(
                compute_signal_record(scope, period, events, cfg).unwrap_or_else(|_| SignalRecord::empty(name, period)),
            );
        }
    }
    out
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_signal_csv(records: &[SignalRecord], path: &Path) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    write_signal_csv_to(records, std::io::BufWriter::new(file))
}

pub fn write_signal_csv_to<W: Write>(records: &[SignalRecord], writer: W) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(SIGNAL_COLUMNS)?;
    for r in records {
        let mut row = vec![
            r.unit.clone(),
            format_utc(r.period_start),
            format_utc(r.period_end),
            r.messages.to_string(),
            r.active_actors.to_string(),
            r.windows.to_string(),
        ];
        row.extend(SIGNAL_COLUMNS[6..].iter().map(|c| cell(r.signal(c))));
        wtr.write_record(&row)?;
    }
    wtr.flush()
}

pub fn read_signal_csv(path: &Path) -> Result<Vec<SignalRecord>, SignalError> {
    let file = std::fs::File::open(path).map_err(|e| SignalError::Input(format!("{}: {e}", path.display())))?;
    read_signal_csv_from(file)
}

pub fn read_signal_csv_from<R: Read>(reader: R) -> Result<Vec<SignalRecord>, SignalError> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(reader);
    let err = |m: String| SignalError::Input(m);
    let headers = rdr.headers().map_err(|e| err(e.to_string()))?.clone();
    if headers.iter().ne(SIGNAL_COLUMNS) {
        return Err(err(format!("signal csv: expected header {}", SIGNAL_COLUMNS.join(","))));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| err(e.to_string()))?;
        let row = rec.position().map_or(0, |p| p.line());
        let at = |col: usize, what: &str| err(format!("row {row}, column {}: {what}", SIGNAL_COLUMNS[col]));
        let ts = |col: usize| parse_utc(&rec[col]).ok_or_else(|| at(col, "bad timestamp"));
        let count = |col: usize| rec[col].parse::<usize>().map_err(|_| at(col, "bad count"));
        let period = Period {
            start: ts(1)?,
            end: ts(2)?,
        };
        let mut r = SignalRecord::empty(&rec[0], period);
        r.messages = count(3)?;
        r.active_actors = count(4)?;
        r.windows = count(5)?;
        for (col, name) in SIGNAL_COLUMNS.iter().enumerate().skip(6) {
            let v = match &rec[col] {
                "" => None,
                s => Some(s.parse::<f64>().map_err(|_| at(col, "bad number"))?),
            };
            r.set_signal(name, v);
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Recipient;

    fn actor(s: &str) -> ActorId {
        ActorId::new(format!("{s}@x.com")).unwrap()
    }

    fn msg(hours: i64, from: &str, to: &str) -> MessageEvent {
        MessageEvent {
            message_id: format!("{from}{to}{hours}"),
            timestamp: DateTime::UNIX_EPOCH + TimeDelta::hours(hours),
            sender: actor(from),
            recipients: vec![Recipient {
                actor: actor(to),
                weight: 1.0,
            }],
            in_reply_to: None,
            subject_key: String::new(),
            tokens: vec!["hello".into()],
        }
    }

    fn whole(events: &[MessageEvent]) -> Period {
        periods_for(events, PeriodGranularity::Whole)[0]
    }

    #[test]
    fn static_star_composition() {
        // hub a exchanges with b, c, d every day for three weeks
        let mut events = Vec::new();
        for day in 0..21 {
            for leaf in ["b", "c", "d"] {
                events.push(msg(day * 24 + 1, "a", leaf));
                events.push(msg(day * 24 + 5, leaf, "a"));
            }
        }
        events.sort_by_key(|e| e.timestamp);
        let r =
            compute_signal_record(UnitScope::All("all"), whole(&events), &events, &SignalConfig::default()).unwrap();
        assert_eq!(r.windows, 3);
        assert_eq!(r.central_leadership, Some(1.0));
        assert_eq!(r.degree_centralization, Some(1.0));
        assert_eq!(r.rotating_leadership, Some(0.0));
        assert_eq!(r.messages, events.len());
        assert!(r.avg_response_time_hours.is_some());
        // no lexicon configured
        assert_eq!(r.honest_sentiment, None);
        assert_eq!(r.innovative_language, None);
    }

    #[test]
    fn single_message_unit() {
        let events = vec![msg(0, "a", "b")];
        let r =
            compute_signal_record(UnitScope::All("all"), whole(&events), &events, &SignalConfig::default()).unwrap();
        assert_eq!(r.messages, 1);
        assert_eq!(r.central_leadership, None);
        assert_eq!(r.rotating_leadership, None);
        assert_eq!(r.responsiveness, None);
        assert_eq!(r.balanced_contribution, Some(1.0));
    }

    #[test]
    fn no_events_is_an_error() {
        let events = vec![msg(0, "a", "b")];
        let mut units = UnitMapping::new();
        units.assign(actor("b"), "ops").unwrap();
        let scope = UnitScope::Unit {
            name: "ops",
            mapping: &units,
        };
        assert!(matches!(
            compute_signal_record(scope, whole(&events), &events, &SignalConfig::default()),
            Err(SignalError::NoEvents { .. })
        ));
        let records = analyze_corpus(
            &events,
            Some(&units),
            PeriodGranularity::Whole,
            &SignalConfig::default(),
        );
        let names: Vec<_> = records.iter().map(|r| r.unit.as_str()).collect();
        assert_eq!(names, ["_external", "ops"]);
        assert_eq!(records[1].messages, 0);
    }

    #[test]
    fn monthly_periods() {
        let t0 = parse_utc("2024-01-30T12:00:00Z").unwrap();
        let mut e1 = msg(0, "a", "b");
        e1.timestamp = t0;
        let mut e2 = msg(0, "b", "a");
        e2.timestamp = parse_utc("2024-03-02T00:00:00Z").unwrap();
        let periods = periods_for(&[e1.clone(), e2.clone()], PeriodGranularity::Monthly);
        let starts: Vec<_> = periods.iter().map(|p| format_utc(p.start)).collect();
        assert_eq!(
            starts,
            ["2024-01-01T00:00:00Z", "2024-02-01T00:00:00Z", "2024-03-01T00:00:00Z"]
        );
        let w = periods_for(&[e1, e2], PeriodGranularity::Whole);
        assert_eq!(format_utc(w[0].start), "2024-01-30T00:00:00Z");
        assert_eq!(format_utc(w[0].end), "2024-03-03T00:00:00Z");
        assert!(periods_for(&[], PeriodGranularity::Whole).is_empty());
    }

    #[test]
    fn csv_round_trip_with_missing_cells() {
        let events = vec![msg(0, "a", "b"), msg(3, "b", "a")];
        let mut records = analyze_corpus(&events, None, PeriodGranularity::Whole, &SignalConfig::default());
        records[0].honest_sentiment = Some(0.1 + 0.2);
        let mut buf = Vec::new();
        write_signal_csv_to(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().nth(1).unwrap().contains(",,"));
        assert_eq!(read_signal_csv_from(buf.as_slice()).unwrap(), records);
        assert!(read_signal_csv_from("unit\nx\n".as_bytes()).is_err());
    }

    #[test]
    fn dimensions_are_fixed() {
        assert_eq!(
            SignalRecord::dimension_of("central_leadership"),
            Some(Dimension::Structure)
        );
        assert_eq!(
            SignalRecord::dimension_of("balanced_contribution"),
            Some(Dimension::Structure)
        );
        assert_eq!(
            SignalRecord::dimension_of("rotating_leadership"),
            Some(Dimension::Dynamics)
        );
        assert_eq!(SignalRecord::dimension_of("responsiveness"), Some(Dimension::Dynamics));
        assert_eq!(SignalRecord::dimension_of("honest_sentiment"), Some(Dimension::Content));
        assert_eq!(
            SignalRecord::dimension_of("innovative_language"),
            Some(Dimension::Content)
        );
        assert_eq!(SignalRecord::dimension_of("unit"), None);
    }
}
