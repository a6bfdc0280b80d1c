use std::collections::{BTreeMap, VecDeque};

use super::{GraphError, WindowedGraph};
use crate::ingest::ActorId;

/// Undirected simple graph on `0..n`, adjacency lists sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    /// Self-loops and repeated pairs are dropped; direction is ignored.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        SimpleGraph { adj }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Raw (unnormalized) betweenness: for every unordered pair `{s, t}`, each
/// intermediate vertex `v` gains `sigma_st(v) / sigma_st`. Unreachable pairs
/// contribute nothing.
pub fn brandes_betweenness(g: &SimpleGraph) -> Vec<f64> {
    let n = g.node_count();
    let mut scores = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        for v in 0..n {
            sigma[v] = 0.0;
            dist[v] = -1;
            delta[v] = 0.0;
            preds[v].clear();
        }
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);

        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }

        while let Some(w) = order.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                scores[w] += delta[w];
            }
        }
    }
    // each unordered pair was visited from both endpoints
    for x in &mut scores {
        *x /= 2.0;
    }
    scores
}

/// Normalized actor centralities for one window, keyed by actor.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CentralityVector {
    values: BTreeMap<ActorId, f64>,
}

impl CentralityVector {
    pub fn from_map(values: BTreeMap<ActorId, f64>) -> Self {
        CentralityVector { values }
    }

    pub fn get(&self, actor: &ActorId) -> Option<f64> {
        self.values.get(actor).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ActorId, f64)> {
        self.values.iter().map(|(a, v)| (a, *v))
    }

    pub fn values(&self) -> Vec<f64> {
        self.values.values().copied().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CentralityKind {
    Degree,
    Betweenness,
}

fn keyed(g: &WindowedGraph, values: Vec<f64>) -> CentralityVector {
    CentralityVector {
        values: g.nodes.iter().cloned().zip(values).collect(),
    }
}

/// `deg(v) / (n - 1)` on the symmetrized simple graph.
pub fn degree_centrality(g: &WindowedGraph) -> Result<CentralityVector, GraphError> {
    let n = g.nodes.len();
    if n < 2 {
        return Err(GraphError::DegenerateWindow { nodes: n });
    }
    let sg = g.simple_graph();
    let values = (0..n).map(|v| sg.degree(v) as f64 / (n - 1) as f64).collect();
    Ok(keyed(g, values))
}

/// Brandes betweenness on the symmetrized simple graph, divided by
/// `(n-1)(n-2)/2`. With two nodes every value is zero.
pub fn betweenness_centrality(g: &WindowedGraph) -> Result<CentralityVector, GraphError> {
    let n = g.nodes.len();
    if n < 2 {
        return Err(GraphError::DegenerateWindow { nodes: n });
    }
    let raw = brandes_betweenness(&g.simple_graph());
    let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
    let values = raw
        .into_iter()
        .map(|x| if pairs > 0.0 { (x / pairs).clamp(0.0, 1.0) } else { 0.0 })
        .collect();
    Ok(keyed(g, values))
}

/// Freeman group centralization of normalized scores:
/// `sum(max - c_v)` over the star-graph maximum (`n-2` for degree, `n-1` for
/// betweenness), clamped to `[0, 1]`.
pub fn centralization(values: &[f64], kind: CentralityKind) -> Result<f64, GraphError> {
    let n = values.len();
    if n < 3 {
        return Err(GraphError::CentralizationUndefined { nodes: n });
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let gap: f64 = values.iter().map(|c| max - c).sum();
    let bound = match kind {
        CentralityKind::Degree => (n - 2) as f64,
        CentralityKind::Betweenness => (n - 1) as f64,
    };
    Ok((gap / bound).clamp(0.0, 1.0))
}

pub fn group_centralization(c: &CentralityVector, kind: CentralityKind) -> Result<f64, GraphError> {
    centralization(&c.values(), kind)
}
