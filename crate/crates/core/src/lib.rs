//! Communication-signal analytics over e-mail archives.
//!
//! The pipeline turns raw mailboxes into a canonical event stream
//! ([`ingest`]), slices it into per-window interaction graphs ([`graph`]),
//! computes six per-unit communication signals ([`signals`]) and regresses an
//! external performance variable on them with nested OLS models
//! ([`calibrate`]). [`synth`] generates corpora with planted regimes that act
//! as ground truth for the whole chain.

pub mod calibrate;
pub mod graph;
pub mod ingest;
pub mod signals;
pub mod synth;
pub mod time;

pub use calibrate::{
    adjusted_r2, fit_ols, nested_model_table, CalibrateError, CalibrationTable, DesignMatrix, RegressionResult,
};
pub use graph::{
    betweenness_centrality, build_windows, degree_centrality, group_centralization, CentralityKind, CentralityVector,
    GraphError, TimeWindowConfig, WindowedGraph,
};
pub use ingest::{
    canonicalize_actor, parse_mbox, read_event_csv, tokenize, write_event_csv, ActorId, AliasMap, IngestConfig,
    IngestError, IngestReport, MessageEvent, Recipient, UnitMapping,
};
pub use signals::{
    compute_signal_record, Dimension, LexiconConfig, ResponseEvent, SignalConfig, SignalError, SignalRecord,
};
pub use synth::{generate, ScenarioSpec, SynthError, SyntheticCorpus};
