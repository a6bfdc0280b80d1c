//! Per-window interaction graphs and structural centrality measures.
//!
//! Structure metrics work on the symmetrized simple graph of a window: an
//! undirected edge joins two actors when at least one message passed between
//! them in either direction. Weights and multiplicities are kept on
//! [`WindowedGraph`] for export but ignored by the centrality functions.

mod centrality;
mod window;

use thiserror::Error;

pub use centrality::{
    betweenness_centrality, brandes_betweenness, centralization, degree_centrality, group_centralization,
    CentralityKind, CentralityVector, SimpleGraph,
};
pub use window::{build_windows, write_edge_list, EdgeStats, TimeWindowConfig, WindowedGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("degenerate window: {nodes} node(s), need at least 2")]
    DegenerateWindow { nodes: usize },
    #[error("centralization undefined for {nodes} node(s), need at least 3")]
    CentralizationUndefined { nodes: usize },
    #[error("invalid window configuration: {0}")]
    InvalidConfig(String),
}
