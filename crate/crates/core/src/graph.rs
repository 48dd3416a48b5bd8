//! Directed graph substrate: edge-list ingestion, linear-threshold weight
//! derivation, and induced-subgraph extraction.
//!
//! Nodes are dense internal ids `0..n-1`; arbitrary external labels from the
//! input file are kept in an id map. Graphs are immutable once built and safe
//! to share across sampling workers.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Absolute tolerance on the per-node incoming weight sum `sum w_ji <= 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// One directed edge with its influence weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: u32,
    pub target: u32,
    pub weight: f64,
}

/// Whether an edge list file describes directed or undirected ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Directedness {
    Directed,
    /// Every input line expands to both directed edges before any weight
    /// derivation, so in-degrees count both directions.
    Undirected,
}

/// Immutable directed graph with per-edge linear-threshold weights.
///
/// Invariants enforced at construction:
/// - no self loops, no duplicate `(source, target)` pairs,
/// - all endpoints in range,
/// - all weights in `[0, 1]`,
/// - per-node incoming weight sum `<= 1 + WEIGHT_SUM_TOL`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    labels: Vec<String>,
    edges: Vec<Edge>,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    in_weights: Vec<f64>,
    in_cum: Vec<f64>,
    explicit_weights: bool,
}

impl DirectedGraph {
    /// Build a graph from dense-id edges. `labels[v]` is the external id of
    /// internal node `v`.
    pub fn from_edges(labels: Vec<String>, mut edges: Vec<Edge>, explicit_weights: bool) -> Result<Self> {
        let n = labels.len();
        for e in &edges {
            if e.source as usize >= n {
                return Err(Error::UnknownNode(e.source as usize));
            }
            if e.target as usize >= n {
                return Err(Error::UnknownNode(e.target as usize));
            }
            if e.source == e.target {
                return Err(Error::Validation(format!("self loop on node {}", e.source)));
            }
            if !(0.0..=1.0).contains(&e.weight) {
                return Err(Error::Validation(format!(
                    "weight {} on edge ({}, {}) outside [0, 1]",
                    e.weight, e.source, e.target
                )));
            }
        }
        edges.sort_by_key(|e| (e.source, e.target));
        for pair in edges.windows(2) {
            if pair[0].source == pair[1].source && pair[0].target == pair[1].target {
                return Err(Error::Validation(format!(
                    "duplicate edge ({}, {})",
                    pair[0].source, pair[0].target
                )));
            }
        }

        let mut out_degree = vec![0usize; n];
        let mut in_degree = vec![0usize; n];
        for e in &edges {
            out_degree[e.source as usize] += 1;
            in_degree[e.target as usize] += 1;
        }
        let out_offsets = prefix_sum(&out_degree);
        let in_offsets = prefix_sum(&in_degree);

        let mut out_targets = vec![0u32; edges.len()];
        let mut cursor = out_offsets.clone();
        for e in &edges {
            out_targets[cursor[e.source as usize]] = e.target;
            cursor[e.source as usize] += 1;
        }

        let mut in_sources = vec![0u32; edges.len()];
        let mut in_weights = vec![0f64; edges.len()];
        let mut cursor = in_offsets.clone();
        for e in &edges {
            let slot = cursor[e.target as usize];
            in_sources[slot] = e.source;
            in_weights[slot] = e.weight;
            cursor[e.target as usize] += 1;
        }

        let mut in_cum = vec![0f64; edges.len()];
        for v in 0..n {
            let mut acc = 0.0;
            for slot in in_offsets[v]..in_offsets[v + 1] {
                acc += in_weights[slot];
                in_cum[slot] = acc;
            }
            if acc > 1.0 + WEIGHT_SUM_TOL {
                return Err(Error::Validation(format!(
                    "incoming weights of node {v} sum to {acc}, exceeding 1"
                )));
            }
        }

        Ok(Self {
            labels,
            edges,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            in_weights,
            in_cum,
            explicit_weights,
        })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(source, target)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// External label of an internal node id.
    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// True when the input carried explicit per-edge weights.
    pub fn has_explicit_weights(&self) -> bool {
        self.explicit_weights
    }

    pub fn out_neighbors(&self, node: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[node]..self.out_offsets[node + 1]]
    }

    pub fn in_neighbors(&self, node: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[node]..self.in_offsets[node + 1]]
    }

    pub fn in_weight_slice(&self, node: usize) -> &[f64] {
        &self.in_weights[self.in_offsets[node]..self.in_offsets[node + 1]]
    }

    /// Cumulative incoming weights of `node`, aligned with `in_neighbors`.
    pub fn in_cumulative_weights(&self, node: usize) -> &[f64] {
        &self.in_cum[self.in_offsets[node]..self.in_offsets[node + 1]]
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.in_offsets[node + 1] - self.in_offsets[node]
    }

    pub fn total_in_weight(&self, node: usize) -> f64 {
        self.in_cumulative_weights(node).last().copied().unwrap_or(0.0)
    }

    /// Replace every weight of edge `(j, i)` with `1 / |N^-(i)|`.
    ///
    /// Nodes without incoming edges are untouched. The result sums incoming
    /// weights to 1 (within float accumulation) for every node of in-degree
    /// at least one.
    pub fn derive_lt_weights(&self) -> DirectedGraph {
        let mut in_degree = vec![0usize; self.node_count()];
        for e in &self.edges {
            in_degree[e.target as usize] += 1;
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                source: e.source,
                target: e.target,
                weight: 1.0 / in_degree[e.target as usize] as f64,
            })
            .collect();
        Self::from_edges(self.labels.clone(), edges, true)
            .expect("reweighting a valid graph cannot fail")
    }

    /// Subgraph keeping exactly the edges with both endpoints in `nodes`.
    ///
    /// Weights are copied verbatim (no renormalization), so incoming sums may
    /// drop below 1 inside a community; the residual mass is the "no live
    /// in-edge" outcome during sampling. Kept nodes are re-densified in
    /// ascending order of their original ids and keep their external labels.
    pub fn induced_subgraph(&self, nodes: &NodeSet) -> Result<DirectedGraph> {
        let n = self.node_count();
        if let Some(&bad) = nodes.iter().find(|&&v| v as usize >= n) {
            return Err(Error::UnknownNode(bad as usize));
        }
        let mut remap = vec![u32::MAX; n];
        let mut labels = Vec::with_capacity(nodes.len());
        for (new_id, &v) in nodes.iter().enumerate() {
            remap[v as usize] = new_id as u32;
            labels.push(self.labels[v as usize].clone());
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| remap[e.source as usize] != u32::MAX && remap[e.target as usize] != u32::MAX)
            .map(|e| Edge {
                source: remap[e.source as usize],
                target: remap[e.target as usize],
                weight: e.weight,
            })
            .collect();
        Self::from_edges(labels, edges, self.explicit_weights)
    }

    /// Serialize as whitespace-separated edge lines using external labels.
    /// Weighted graphs emit a third column that round-trips exactly.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = String::new();
        for e in &self.edges {
            buf.clear();
            if self.explicit_weights {
                // {:?} prints the shortest representation that reparses to
                // the same f64.
                writeln!(
                    buf,
                    "{} {} {:?}",
                    self.labels[e.source as usize], self.labels[e.target as usize], e.weight
                )
                .expect("string write");
            } else {
                writeln!(
                    buf,
                    "{} {}",
                    self.labels[e.source as usize], self.labels[e.target as usize]
                )
                .expect("string write");
            }
            out.write_all(buf.as_bytes())?;
        }
        Ok(())
    }

    /// Two-column id map `external_id,internal_id`.
    pub fn write_id_map<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(b"external_id,internal_id\n")?;
        for (internal, label) in self.labels.iter().enumerate() {
            out.write_all(format!("{label},{internal}\n").as_bytes())?;
        }
        Ok(())
    }
}

fn prefix_sum(counts: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(counts.len() + 1);
    let mut acc = 0usize;
    offsets.push(0);
    for &c in counts {
        acc += c;
        offsets.push(acc);
    }
    offsets
}

/// A set of node ids: sorted, deduplicated, cheap to iterate and test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet {
    ids: Vec<u32>,
}

impl NodeSet {
    pub fn new(mut ids: Vec<u32>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Self { ids }
    }

    pub fn contains(&self, node: u32) -> bool {
        self.ids.binary_search(&node).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u32> {
        self.ids.iter()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

impl FromIterator<u32> for NodeSet {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// Parse a whitespace-separated edge list.
///
/// Lines are `src dst` or `src dst weight`; `#` starts a comment line; blank
/// lines are skipped. External ids are arbitrary tokens, remapped to dense
/// ids in order of first appearance. Undirected input expands each line to
/// both directions before deduplication. Duplicate `(source, target)` pairs
/// collapse to the first occurrence.
pub fn load_edge_list<R: BufRead>(reader: R, directedness: Directedness) -> Result<DirectedGraph> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, u32> = HashMap::new();
    let mut intern = |token: &str, labels: &mut Vec<String>| -> u32 {
        if let Some(&id) = index.get(token) {
            return id;
        }
        let id = labels.len() as u32;
        labels.push(token.to_string());
        index.insert(token.to_string(), id);
        id
    };

    let mut edges: Vec<Edge> = Vec::new();
    let mut seen: HashMap<(u32, u32), ()> = HashMap::new();
    let mut arity: Option<usize> = None;
    let mut explicit = false;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != 2 && tokens.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 'src dst' or 'src dst weight', got {} fields", tokens.len()),
            });
        }
        match arity {
            None => {
                arity = Some(tokens.len());
                explicit = tokens.len() == 3;
            }
            Some(a) if a != tokens.len() => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("line has {} fields but earlier lines had {a}", tokens.len()),
                });
            }
            Some(_) => {}
        }
        let src = intern(tokens[0], &mut labels);
        let dst = intern(tokens[1], &mut labels);
        if src == dst {
            return Err(Error::Parse {
                line: lineno,
                message: format!("self loop on '{}'", tokens[0]),
            });
        }
        let weight = if explicit {
            let w: f64 = tokens[2].parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("cannot parse weight '{}'", tokens[2]),
            })?;
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::Validation(format!(
                    "line {lineno}: weight {w} outside [0, 1]"
                )));
            }
            w
        } else {
            0.0
        };

        let mut push = |s: u32, t: u32, seen: &mut HashMap<(u32, u32), ()>| {
            if seen.insert((s, t), ()).is_none() {
                edges.push(Edge {
                    source: s,
                    target: t,
                    weight,
                });
            }
        };
        push(src, dst, &mut seen);
        if directedness == Directedness::Undirected {
            push(dst, src, &mut seen);
        }
    }

    DirectedGraph::from_edges(labels, edges, explicit)
}
