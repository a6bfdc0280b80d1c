//! Reference implementations and fixtures shared by the integration tests.
//! Each oracle is written from the definition, not from the library code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, TimeDelta, Utc};
use nalgebra::{DMatrix, DVector};
use orgsignals::{build_windows, ActorId, MessageEvent, Recipient, TimeWindowConfig, WindowedGraph};

pub fn t0() -> DateTime<Utc> {
    DateTime::parse_from_rfc3339("2024-01-01T00:00:00Z")
        .unwrap()
        .with_timezone(&Utc)
}

pub fn actor(name: &str) -> ActorId {
    ActorId::new(format!("{name}@example.org")).unwrap()
}

pub fn node(i: usize) -> ActorId {
    actor(&format!("n{i:02}"))
}

pub fn message(id: usize, secs: i64, from: &ActorId, to: &[&ActorId]) -> MessageEvent {
    MessageEvent {
        message_id: format!("m{id}"),
        timestamp: t0() + TimeDelta::seconds(secs),
        sender: from.clone(),
        recipients: to
            .iter()
            .enumerate()
            .map(|(i, a)| Recipient {
                actor: (*a).clone(),
                weight: if i == 0 { 1.0 } else { 0.5 },
            })
            .collect(),
        in_reply_to: None,
        subject_key: String::new(),
        tokens: Vec::new(),
    }
}

/// Single-window graph over `node(i)` actors with one message per edge.
pub fn window_graph(edges: &[(usize, usize)]) -> WindowedGraph {
    let events: Vec<MessageEvent> = edges
        .iter()
        .enumerate()
        .map(|(k, &(u, v))| message(k, k as i64, &node(u), &[&node(v)]))
        .collect();
    let cfg = TimeWindowConfig::new(TimeDelta::days(7), TimeDelta::days(7), t0(), t0() + TimeDelta::days(1)).unwrap();
    build_windows(&events, &cfg, None).into_iter().next().unwrap()
}

/// Betweenness by listing every simple path between every pair and keeping
/// the shortest ones. Undirected, unnormalized.
pub fn brute_force_betweenness(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in edges {
        if u != v {
            adj[u][v] = true;
            adj[v][u] = true;
        }
    }
    fn walk(adj: &[Vec<bool>], at: usize, target: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if at == target {
            out.push(path.clone());
            return;
        }
        for next in 0..adj.len() {
            if adj[at][next] && !path.contains(&next) {
                path.push(next);
                walk(adj, next, target, path, out);
                path.pop();
            }
        }
    }
    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let mut paths = Vec::new();
            walk(&adj, s, t, &mut vec![s], &mut paths);
            let Some(best) = paths.iter().map(Vec::len).min() else {
                continue;
            };
            let shortest: Vec<&Vec<usize>> = paths.iter().filter(|p| p.len() == best).collect();
            let share = 1.0 / shortest.len() as f64;
            for p in shortest {
                for &v in &p[1..p.len() - 1] {
                    score[v] += share;
                }
            }
        }
    }
    score
}

/// Strict local extrema of the series with equal neighbours merged.
pub fn brute_force_oscillations(series: &[f64]) -> usize {
    let mut c: Vec<f64> = Vec::new();
    for &x in series {
        if c.last() != Some(&x) {
            c.push(x);
        }
    }
    (1..c.len().saturating_sub(1))
        .filter(|&i| (c[i] > c[i - 1] && c[i] > c[i + 1]) || (c[i] < c[i - 1] && c[i] < c[i + 1]))
        .count()
}

/// `(requester, responder, run_start, run_last, response_at, nudges)` in seconds.
pub type RunTuple = (String, String, i64, i64, i64, u32);

/// Pair-by-pair run scanner. Returns emitted responses and the
/// `(requester, responder, run_start)` of every run that produced none.
pub fn brute_force_responses(
    events: &[MessageEvent],
    horizon_secs: i64,
) -> (Vec<RunTuple>, Vec<(String, String, i64)>) {
    let secs = |e: &MessageEvent| (e.timestamp - t0()).num_seconds();
    let actors: BTreeSet<&ActorId> = events
        .iter()
        .flat_map(|e| std::iter::once(&e.sender).chain(e.recipients.iter().map(|r| &r.actor)))
        .collect();
    let sends =
        |e: &MessageEvent, a: &ActorId, b: &ActorId| &e.sender == a && e.recipients.iter().any(|r| &r.actor == b);
    let mut emitted = Vec::new();
    let mut silent = Vec::new();
    for &a in &actors {
        for &b in &actors {
            if a == b {
                continue;
            }
            let line: Vec<(bool, i64)> = events
                .iter()
                .filter(|e| sends(e, a, b) || sends(e, b, a))
                .map(|e| (sends(e, a, b), secs(e)))
                .collect();
            let mut pos = 0;
            'runs: while let Some(k) = (pos..line.len()).find(|&k| line[k].0) {
                let (start, mut last, mut count) = (line[k].1, line[k].1, 1u32);
                for (m, &(forward, t)) in line.iter().enumerate().skip(k + 1) {
                    if forward {
                        if t - start <= horizon_secs {
                            last = t;
                            count += 1;
                        } else {
                            silent.push((a.to_string(), b.to_string(), start));
                            pos = m;
                            continue 'runs;
                        }
                    } else if t > last {
                        if t - start <= horizon_secs {
                            emitted.push((a.to_string(), b.to_string(), start, last, t, count));
                        } else {
                            silent.push((a.to_string(), b.to_string(), start));
                        }
                        pos = m + 1;
                        continue 'runs;
                    }
                }
                silent.push((a.to_string(), b.to_string(), start));
                break;
            }
        }
    }
    emitted.sort();
    silent.sort();
    (emitted, silent)
}

/// Least squares through `(X'X) b = X'y` with an LU solve.
pub fn normal_equations(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = rows.len();
    let p = rows[0].len();
    let x = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    let y = DVector::from_column_slice(y);
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * y;
    xtx.lu().solve(&xty).expect("full rank").iter().copied().collect()
}

/// Jensen-Shannon divergence in nats, rescaled to bits.
pub fn jsd_reference(p: &BTreeMap<String, f64>, q: &BTreeMap<String, f64>) -> f64 {
    let words: BTreeSet<&String> = p.keys().chain(q.keys()).collect();
    let mut kl_p = 0.0;
    let mut kl_q = 0.0;
    for w in words {
        let a = p.get(w).copied().unwrap_or(0.0);
        let b = q.get(w).copied().unwrap_or(0.0);
        let m = (a + b) / 2.0;
        if a > 0.0 {
            kl_p += a * (a.ln() - m.ln());
        }
        if b > 0.0 {
            kl_q += b * (b.ln() - m.ln());
        }
    }
    (kl_p + kl_q) / 2.0 / std::f64::consts::LN_2
}
