use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use chrono::{DateTime, TimeDelta, Utc};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{DelaySpec, ScenarioSpec, SynthError, Topology};
use crate::ingest::{sort_events, write_event_csv, ActorId, MessageEvent, Recipient};
use crate::signals::{LexiconConfig, ReferenceDictionary};
use crate::time::floor_day;

// stream offsets of the scenario seed, one per concern
const TOPOLOGY_STREAM: u64 = 0;
const TIMING_STREAM: u64 = 1;
const MIX_STREAM: u64 = 2;
const TOKEN_STREAM: u64 = 3;

const SENTIMENT_WORDS: usize = 20;
const DICTIONARY_WORDS: usize = 200;
const NOVEL_WORDS: usize = 200;
const NUDGE_GAP_SECS: i64 = 60;

/// Assumptions under which [`ExpectedSignals`] hold.
const WINDOW_DAYS: i64 = 7;
const HORIZON_DAYS: i64 = 14;

/// Signal values the construction guarantees for the whole corpus analysed
/// as one unit over one period, with 7-day windows and steps and a 14-day
/// response horizon. `None` where the scenario does not pin a value down.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectedSignals {
    pub unit: String,
    pub window_days: i64,
    pub step_days: i64,
    pub response_horizon_days: i64,
    pub messages: usize,
    pub central_leadership: Option<f64>,
    pub degree_centralization: Option<f64>,
    pub rotating_leadership: Option<f64>,
    pub avg_response_time_hours: Option<f64>,
    pub avg_nudges: Option<f64>,
    /// Population SD of the planted per-message emotional share; holds when
    /// analysed with the generated word lists.
    pub honest_sentiment: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticLexicon {
    pub positive: Vec<String>,
    pub negative: Vec<String>,
    /// Word to relative frequency, summing to 1.
    pub reference: BTreeMap<String, f64>,
}

impl SyntheticLexicon {
    fn build() -> Self {
        let positive = (0..SENTIMENT_WORDS).map(|i| format!("good{i:02}")).collect();
        let negative = (0..SENTIMENT_WORDS).map(|i| format!("bad{i:02}")).collect();
        let weights: Vec<f64> = (0..DICTIONARY_WORDS).map(|r| 1.0 / (r + 1) as f64).collect();
        let total: f64 = weights.iter().sum();
        let reference = weights
            .iter()
            .enumerate()
            .map(|(r, w)| (dictionary_word(r), w / total))
            .collect();
        SyntheticLexicon {
            positive,
            negative,
            reference,
        }
    }

    pub fn to_config(&self) -> LexiconConfig {
        let set = |v: &[String]| v.iter().cloned().collect::<HashSet<_>>();
        let reference = ReferenceDictionary::new(self.reference.clone()).expect("generated frequencies are positive");
        LexiconConfig::new(set(&self.positive), set(&self.negative), reference)
            .expect("generated word lists are disjoint")
    }

    /// Writes `positive.txt`, `negative.txt` and `reference.csv` into `dir`.
    pub fn write_files(&self, dir: &Path) -> Result<Vec<PathBuf>, SynthError> {
        let io = |path: &Path| {
            let path = path.display().to_string();
            move |source| SynthError::Io { path, source }
        };
        let mut written = Vec::new();
        for (name, words) in [("positive.txt", &self.positive), ("negative.txt", &self.negative)] {
            let path = dir.join(name);
            let mut text = words.join("\n");
            text.push('\n');
            std::fs::write(&path, text).map_err(io(&path))?;
            written.push(path);
        }
        let path = dir.join("reference.csv");
        let mut text = String::from("word,relative_frequency\n");
        for (w, f) in &self.reference {
            text.push_str(&format!("{w},{f}\n"));
        }
        std::fs::write(&path, text).map_err(io(&path))?;
        written.push(path);
        Ok(written)
    }
}

fn dictionary_word(rank: usize) -> String {
    format!("word{rank:03}")
}

#[derive(Clone, Debug)]
pub struct SyntheticCorpus {
    pub spec: ScenarioSpec,
    pub actors: Vec<ActorId>,
    /// Time-sorted.
    pub events: Vec<MessageEvent>,
    pub lexicon: SyntheticLexicon,
    pub expected: ExpectedSignals,
}

impl SyntheticCorpus {
    pub fn expected_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.expected).expect("plain struct");
        s.push('\n');
        s
    }

    /// Writes `events.csv`, `expected.json` and the lexicon files into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<Vec<PathBuf>, SynthError> {
        let events = dir.join("events.csv");
        write_event_csv(&self.events, &events).map_err(|e| SynthError::Io {
            path: events.display().to_string(),
            source: std::io::Error::other(e.to_string()),
        })?;
        let expected = dir.join("expected.json");
        std::fs::write(&expected, self.expected_json()).map_err(|source| SynthError::Io {
            path: expected.display().to_string(),
            source,
        })?;
        let mut out = vec![events, expected];
        out.extend(self.lexicon.write_files(dir)?);
        Ok(out)
    }
}

/// A pair conversation confined to `[from, until)`.
struct Segment {
    initiator: usize,
    other: usize,
    from: DateTime<Utc>,
    until: DateTime<Utc>,
}

fn segments(spec: &ScenarioSpec, rng: &mut ChaCha8Rng) -> Vec<Segment> {
    let n = spec.n_actors;
    let start = spec.start;
    let end = start + TimeDelta::days(spec.duration_days as i64);
    let mut out = Vec::new();
    let mut pair = |a: usize, b: usize, from, until, rng: &mut ChaCha8Rng| {
        let (initiator, other) = if rng.random::<bool>() { (a, b) } else { (b, a) };
        out.push(Segment {
            initiator,
            other,
            from,
            until,
        });
    };
    match spec.topology {
        Topology::Star => {
            for j in 1..n {
                pair(0, j, start, end, rng);
            }
        }
        Topology::Ring => {
            for i in 0..n {
                pair(i, (i + 1) % n, start, end, rng);
            }
        }
        Topology::Random { p } => {
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < p {
                        pair(i, j, start, end, rng);
                    }
                }
            }
        }
        Topology::RotatingStar {
            rotation_period_days,
            hubs,
        } => {
            let slots = spec.duration_days / rotation_period_days;
            for s in 0..slots {
                let from = start + TimeDelta::days((s * rotation_period_days) as i64);
                let until = from + TimeDelta::days(rotation_period_days as i64);
                let hub = s as usize % hubs;
                for j in (0..n).filter(|&j| j != hub) {
                    pair(hub, j, from, until, rng);
                }
            }
        }
    }
    out
}

fn sample_delay_secs(d: DelaySpec, rng: &mut ChaCha8Rng) -> i64 {
    let hours = match d {
        DelaySpec::Constant { hours } => hours,
        DelaySpec::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
    };
    (hours * 3600.0).round() as i64
}

struct Content {
    mix: ChaCha8Rng,
    tokens: ChaCha8Rng,
    dictionary: WeightedIndex<f64>,
    emotional_shares: Vec<f64>,
}

impl Content {
    fn tokens(&mut self, spec: &ScenarioSpec, lex: &SyntheticLexicon) -> Vec<String> {
        let t = spec.vocabulary.tokens_per_message;
        let mix = spec.lexicon_mix;
        let u: f64 = self.mix.random();
        let share = (mix.emotional_fraction + mix.spread * (2.0 * u - 1.0)).clamp(0.0, 1.0);
        let emotional = (share * t as f64).round() as usize;
        self.emotional_shares.push(emotional as f64 / t as f64);
        let rng = &mut self.tokens;
        let mut out = Vec::with_capacity(t);
        for _ in 0..emotional {
            let list = if rng.random::<bool>() {
                &lex.positive
            } else {
                &lex.negative
            };
            out.push(list[rng.random_range(0..list.len())].clone());
        }
        for _ in emotional..t {
            if rng.random::<f64>() < spec.vocabulary.in_dictionary_fraction {
                out.push(dictionary_word(self.dictionary.sample(rng)));
            } else {
                out.push(format!("novel{:03}", rng.random_range(0..NOVEL_WORDS)));
            }
        }
        out
    }
}

/// Builds the corpus for a valid scenario. Deterministic in `spec`.
pub fn generate(spec: &ScenarioSpec) -> Result<SyntheticCorpus, SynthError> {
    spec.validate()?;
    let stream = |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(k);
        rng
    };
    let width = (spec.n_actors - 1).to_string().len().max(3);
    let actors: Vec<ActorId> = (0..spec.n_actors)
        .map(|i| ActorId::new(format!("user{i:0width$}@{}", spec.domain)).expect("validated domain"))
        .collect();
    let lexicon = SyntheticLexicon::build();
    let weights: Vec<f64> = (0..DICTIONARY_WORDS)
        .map(|r| lexicon.reference[&dictionary_word(r)])
        .collect();
    let mut content = Content {
        mix: stream(MIX_STREAM),
        tokens: stream(TOKEN_STREAM),
        dictionary: WeightedIndex::new(&weights).expect("positive weights"),
        emotional_shares: Vec::new(),
    };
    let mut timing = stream(TIMING_STREAM);
    let segs = segments(spec, &mut stream(TOPOLOGY_STREAM));

    let burst = TimeDelta::seconds(NUDGE_GAP_SECS * (spec.nudges as i64 - 1));
    let mut events = Vec::new();
    let mut answered_delays: Vec<i64> = Vec::new();
    for (si, seg) in segs.iter().enumerate() {
        let local = |i: usize| actors[i].as_str().split('@').next().unwrap_or_default().to_string();
        let subject = format!("sync {} {}", local(seg.initiator), local(seg.other));
        let mut t = seg.from + TimeDelta::seconds(timing.random_range(0..3600));
        let mut side = (seg.initiator, seg.other);
        let mut previous: Option<String> = None;
        let mut turn = 0usize;
        while t + burst < seg.until {
            for m in 0..spec.nudges {
                let id = format!("s{si}.t{turn}.m{m}.{}@{}", spec.seed, spec.domain);
                events.push(MessageEvent {
                    message_id: id.clone(),
                    timestamp: t + TimeDelta::seconds(NUDGE_GAP_SECS * m as i64),
                    sender: actors[side.0].clone(),
                    recipients: vec![Recipient {
                        actor: actors[side.1].clone(),
                        weight: 1.0,
                    }],
                    in_reply_to: if m == 0 { previous.clone() } else { None },
                    subject_key: subject.clone(),
                    tokens: content.tokens(spec, &lexicon),
                });
                if m + 1 == spec.nudges {
                    previous = Some(id);
                }
            }
            let delay = sample_delay_secs(spec.reply_delay_hours, &mut timing);
            t += TimeDelta::seconds(delay);
            if t + burst < seg.until {
                answered_delays.push(delay);
            }
            side = (side.1, side.0);
            turn += 1;
        }
    }
    sort_events(&mut events);
    debug_assert!(events.iter().all(|e| e.validate().is_ok()));

    let expected = expected_signals(spec, &events, &answered_delays, &content.emotional_shares);
    Ok(SyntheticCorpus {
        spec: spec.clone(),
        actors,
        events,
        lexicon,
        expected,
    })
}

fn expected_signals(spec: &ScenarioSpec, events: &[MessageEvent], delays: &[i64], shares: &[f64]) -> ExpectedSignals {
    let aligned = spec.start == floor_day(spec.start);
    // every pair of a segment then speaks at least once in any calendar day
    let daily = spec.reply_delay_hours.max_hours() <= 22.0;
    let windows = events.first().zip(events.last()).map_or(0, |(a, b)| {
        let span = (floor_day(b.timestamp) - floor_day(a.timestamp)).num_days() + 1;
        (span + WINDOW_DAYS - 1) / WINDOW_DAYS
    });
    let static_topology = !matches!(spec.topology, Topology::RotatingStar { .. });

    let mut central = None;
    let mut rotating = None;
    match spec.topology {
        Topology::Star if spec.n_actors >= 3 => {
            central = Some(1.0);
            if aligned && daily && windows >= 3 {
                rotating = Some(0.0);
            }
        }
        Topology::Ring if aligned && daily => {
            central = Some(0.0);
        }
        Topology::RotatingStar {
            rotation_period_days,
            hubs,
        } if aligned && rotation_period_days as i64 % WINDOW_DAYS == 0 => {
            central = Some(1.0);
            if daily && hubs == 2 && rotation_period_days as i64 == WINDOW_DAYS && windows >= 3 {
                rotating = Some(1.0);
            }
        }
        _ => {}
    }

    let within_horizon = spec.reply_delay_hours.max_hours() <= (HORIZON_DAYS * 24) as f64;
    let (avg_hours, avg_nudges) = if static_topology && within_horizon && !delays.is_empty() {
        let mean = delays.iter().sum::<i64>() as f64 / delays.len() as f64 / 3600.0;
        (Some(mean), Some(spec.nudges as f64))
    } else {
        (None, None)
    };

    let honest = (!shares.is_empty()).then(|| {
        let n = shares.len() as f64;
        let mean = shares.iter().sum::<f64>() / n;
        (shares.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n).sqrt()
    });

    ExpectedSignals {
        unit: "all".into(),
        window_days: WINDOW_DAYS,
        step_days: WINDOW_DAYS,
        response_horizon_days: HORIZON_DAYS,
        messages: events.len(),
        central_leadership: central,
        degree_centralization: central,
        rotating_leadership: rotating,
        avg_response_time_hours: avg_hours,
        avg_nudges,
        honest_sentiment: honest,
    }
}
