//! Synthetic graph generators for tests and benchmarks: Erdős–Rényi, a
//! planted two-block structure, and a collaboration-style clique overlay.
//! All emit unweighted edges; derive linear-threshold weights before
//! simulating.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Edge};

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Validation(format!("{name} = {p} outside [0, 1]")));
    }
    Ok(())
}

/// Build an unweighted graph over nodes `0..n` from directed pairs.
pub fn graph_from_pairs(n: usize, pairs: &[(u32, u32)]) -> Result<DirectedGraph> {
    let labels = (0..n).map(|v| v.to_string()).collect();
    let edges = pairs
        .iter()
        .map(|&(s, t)| Edge {
            source: s,
            target: t,
            weight: 0.0,
        })
        .collect();
    DirectedGraph::from_edges(labels, edges, false)
}

/// Directed Erdős–Rényi: every ordered pair `(i, j)`, `i != j`, independently
/// with probability `p`.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Vec<(u32, u32)>> {
    check_probability("p", p)?;
    let mut pairs = Vec::new();
    for i in 0..n as u32 {
        for j in 0..n as u32 {
            if i != j && rng.gen::<f64>() < p {
                pairs.push((i, j));
            }
        }
    }
    Ok(pairs)
}

/// Directed edge pairs plus the planted block id of every node.
pub type PlantedGraph = (Vec<(u32, u32)>, Vec<u32>);

/// Planted two-block graph: nodes split into two equal halves, ordered pairs
/// appear with probability `p_in` inside a half and `p_out` across. Returns
/// the edges and the planted block label per node.
pub fn two_block<R: Rng + ?Sized>(
    n: usize,
    p_in: f64,
    p_out: f64,
    rng: &mut R,
) -> Result<PlantedGraph> {
    check_probability("p_in", p_in)?;
    check_probability("p_out", p_out)?;
    let half = n / 2;
    let blocks: Vec<u32> = (0..n).map(|v| if v < half { 0 } else { 1 }).collect();
    let mut pairs = Vec::new();
    for i in 0..n as u32 {
        for j in 0..n as u32 {
            if i == j {
                continue;
            }
            let p = if blocks[i as usize] == blocks[j as usize] {
                p_in
            } else {
                p_out
            };
            if rng.gen::<f64>() < p {
                pairs.push((i, j));
            }
        }
    }
    Ok((pairs, blocks))
}

/// Collaboration-style graph: `papers` cliques of 2-4 authors, drawn mostly
/// from a local window so the overlay has community structure, plus a few
/// uniform picks for long-range ties. Returns undirected pairs, each once.
pub fn collaboration<R: Rng + ?Sized>(
    n: usize,
    papers: usize,
    rng: &mut R,
) -> Vec<(u32, u32)> {
    assert!(n >= 2);
    let mut pairs: BTreeSet<(u32, u32)> = BTreeSet::new();
    let window = (n / 20).max(4);
    for _ in 0..papers {
        let size = match rng.gen_range(0..10) {
            0..=5 => 2,
            6..=8 => 3,
            _ => 4,
        };
        let center = rng.gen_range(0..n);
        let mut authors: Vec<u32> = Vec::with_capacity(size);
        while authors.len() < size {
            let author = if rng.gen::<f64>() < 0.85 {
                let lo = center.saturating_sub(window);
                let hi = (center + window).min(n - 1);
                rng.gen_range(lo..=hi) as u32
            } else {
                rng.gen_range(0..n) as u32
            };
            if !authors.contains(&author) {
                authors.push(author);
            }
        }
        for a in 0..authors.len() {
            for b in (a + 1)..authors.len() {
                let (x, y) = (authors[a].min(authors[b]), authors[a].max(authors[b]));
                pairs.insert((x, y));
            }
        }
    }
    pairs.into_iter().collect()
}

/// Expand undirected pairs into both directed edges.
pub fn undirected_to_directed(pairs: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(pairs.len() * 2);
    for &(a, b) in pairs {
        out.push((a, b));
        out.push((b, a));
    }
    out
}

/// Random small graph with explicit valid weights: each node draws up to
/// `max_in_degree` in-edges and a random incoming weight budget below one.
/// Oracle-sized fixture for enumeration-backed tests.
pub fn random_lt_graph<R: Rng + ?Sized>(n: usize, max_in_degree: usize, rng: &mut R) -> DirectedGraph {
    assert!(n >= 2);
    let labels = (0..n).map(|v| v.to_string()).collect();
    let mut edges = Vec::new();
    for target in 0..n as u32 {
        let cap = max_in_degree.min(n - 1);
        let deg = rng.gen_range(0..=cap);
        if deg == 0 {
            continue;
        }
        let mut sources: Vec<u32> = (0..n as u32).filter(|&s| s != target).collect();
        for pick in 0..deg {
            let idx = rng.gen_range(pick..sources.len());
            sources.swap(pick, idx);
        }
        let raw: Vec<f64> = (0..deg).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let total_raw: f64 = raw.iter().sum();
        let budget: f64 = rng.gen::<f64>();
        for (k, &src) in sources[..deg].iter().enumerate() {
            edges.push(Edge {
                source: src,
                target,
                weight: raw[k] / total_raw * budget,
            });
        }
    }
    DirectedGraph::from_edges(labels, edges, true).expect("constructed weights are valid")
}
