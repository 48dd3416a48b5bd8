//! Intra-community influence estimation under the linear threshold model.
//!
//! LT diffusion is simulated through its live-edge form: every node
//! independently keeps at most one incoming edge, edge `(j, i)` with
//! probability `w_ji` and none with the residual probability. The spread of a
//! seed equals its reachable set in the sampled graph, so one realization
//! serves every seed of a community at once: the intra-community influence of
//! a node set `S` is the number of ordered ancestor/descendant pairs whose
//! connecting live chain stays inside `S`, seeds excluded from their own
//! counts.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::rng::{stream_rng, tag};

/// Sentinel for "no live in-edge chosen".
const NO_PARENT: u32 = u32::MAX;

/// Enumeration budget for the exact oracle, in live-edge configurations.
pub const EXACT_STATE_BUDGET: u128 = 10_000_000;

/// One element of the ground set `M x V`: node `node` assigned to community
/// `community`. Both indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundSetElement {
    pub community: u32,
    pub node: u32,
}

impl GroundSetElement {
    pub fn new(community: u32, node: u32) -> Self {
        Self { community, node }
    }
}

/// One live-edge realization: the single chosen in-edge per node, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiveEdgeSample {
    parents: Vec<u32>,
}

impl LiveEdgeSample {
    pub fn node_count(&self) -> usize {
        self.parents.len()
    }

    /// Source of the chosen live in-edge of `node`.
    pub fn chosen_in_edge(&self, node: usize) -> Option<u32> {
        match self.parents[node] {
            NO_PARENT => None,
            p => Some(p),
        }
    }
}

/// Monte Carlo estimate with its sampling error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfluenceEstimate {
    /// Estimated expected influence, in nodes.
    pub value: f64,
    /// Number of live-edge samples behind the estimate.
    pub samples: usize,
    /// Standard error of the mean; 0 when `samples == 1`.
    pub std_error: f64,
}

/// Draw one live-edge realization; node `i` keeps in-edge `(j, i)` with
/// probability `w_ji`, independently across nodes.
pub fn sample_live_edge<R: Rng + ?Sized>(graph: &DirectedGraph, rng: &mut R) -> LiveEdgeSample {
    let mut parents = vec![NO_PARENT; graph.node_count()];
    fill_parents(graph, rng, &mut parents);
    LiveEdgeSample { parents }
}

pub(crate) fn fill_parents<R: Rng + ?Sized>(graph: &DirectedGraph, rng: &mut R, parents: &mut [u32]) {
    for (v, slot) in parents.iter_mut().enumerate().take(graph.node_count()) {
        let u: f64 = rng.gen();
        let cum = graph.in_cumulative_weights(v);
        let idx = cum.partition_point(|&c| c <= u);
        *slot = if idx < cum.len() {
            graph.in_neighbors(v)[idx]
        } else {
            NO_PARENT
        };
    }
}

/// Number of nodes (other than the seed) whose live chain leads back to the
/// seed, i.e. the seed's spread in this realization.
pub fn single_seed_spread(sample: &LiveEdgeSample, seed: usize) -> Result<usize> {
    let n = sample.parents.len();
    if seed >= n {
        return Err(Error::UnknownNode(seed));
    }
    // Children lists of the sampled forest, then BFS down from the seed.
    let mut child_count = vec![0usize; n];
    for &p in &sample.parents {
        if p != NO_PARENT {
            child_count[p as usize] += 1;
        }
    }
    let mut offsets = vec![0usize; n + 1];
    for v in 0..n {
        offsets[v + 1] = offsets[v] + child_count[v];
    }
    let mut children = vec![0u32; offsets[n]];
    let mut cursor = offsets.clone();
    for (v, &p) in sample.parents.iter().enumerate() {
        if p != NO_PARENT {
            children[cursor[p as usize]] = v as u32;
            cursor[p as usize] += 1;
        }
    }

    let mut seen = vec![false; n];
    seen[seed] = true;
    let mut queue = vec![seed as u32];
    let mut reached = 0usize;
    while let Some(v) = queue.pop() {
        for &c in &children[offsets[v as usize]..offsets[v as usize + 1]] {
            if !seen[c as usize] {
                seen[c as usize] = true;
                reached += 1;
                queue.push(c);
            }
        }
    }
    Ok(reached)
}

/// Reusable per-worker buffers for chain walking.
struct Scratch {
    parents: Vec<u32>,
    stamp: Vec<u64>,
    member: Vec<u64>,
    walk: u64,
    generation: u64,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            parents: vec![NO_PARENT; n],
            stamp: vec![0; n],
            member: vec![0; n],
            walk: 0,
            generation: 0,
        }
    }

    fn mark_members(&mut self, nodes: &[u32]) -> u64 {
        self.generation += 1;
        for &v in nodes {
            self.member[v as usize] = self.generation;
        }
        self.generation
    }

    /// Ordered ancestor/descendant pairs whose chain stays inside the marked
    /// member set; equals the summed single-seed spread of every member.
    fn intra_pairs(&mut self, members: &[u32], generation: u64) -> u64 {
        let mut total = 0u64;
        for &b in members {
            self.walk += 1;
            self.stamp[b as usize] = self.walk;
            let mut cur = self.parents[b as usize];
            while cur != NO_PARENT
                && self.member[cur as usize] == generation
                && self.stamp[cur as usize] != self.walk
            {
                self.stamp[cur as usize] = self.walk;
                total += 1;
                cur = self.parents[cur as usize];
            }
        }
        total
    }
}

/// Group a ground subset into per-community node lists. Overlap between
/// communities is allowed; duplicate elements collapse.
pub(crate) fn group_by_community(subset: &[GroundSetElement]) -> Vec<(u32, Vec<u32>)> {
    let mut sorted: Vec<GroundSetElement> = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut groups: Vec<(u32, Vec<u32>)> = Vec::new();
    for e in sorted {
        match groups.last_mut() {
            Some((c, nodes)) if *c == e.community => nodes.push(e.node),
            _ => groups.push((e.community, vec![e.node])),
        }
    }
    groups
}

fn estimate_from_counts(r: usize, sum: u64, sum_sq: u128) -> InfluenceEstimate {
    let mean = sum as f64 / r as f64;
    let std_error = if r > 1 {
        let var = (sum_sq as f64 - r as f64 * mean * mean) / (r as f64 - 1.0);
        (var.max(0.0) / r as f64).sqrt()
    } else {
        0.0
    };
    InfluenceEstimate {
        value: mean,
        samples: r,
        std_error,
    }
}

/// Shared-sample estimator: per replicate, one live-edge realization is drawn
/// for the whole graph and every community counts its interior pairs on it.
/// Per-sample totals are integers, so accumulation is exact and independent
/// of worker count.
pub(crate) fn estimate_pair_count(
    graph: &DirectedGraph,
    communities: &[(u32, Vec<u32>)],
    r: usize,
    master_seed: u64,
) -> InfluenceEstimate {
    assert!(r >= 1, "need at least one sample");
    let n = graph.node_count();
    let (sum, sum_sq) = (0..r)
        .into_par_iter()
        .fold(
            || (Scratch::new(n), 0u64, 0u128),
            |(mut scratch, acc, acc_sq), s| {
                let mut rng = stream_rng(master_seed, &[tag::LIVE_EDGE, s as u64]);
                fill_parents(graph, &mut rng, &mut scratch.parents);
                let mut total = 0u64;
                for (_, nodes) in communities {
                    let generation = scratch.mark_members(nodes);
                    total += scratch.intra_pairs(nodes, generation);
                }
                (scratch, acc + total, acc_sq + (total as u128) * (total as u128))
            },
        )
        .map(|(_, acc, acc_sq)| (acc, acc_sq))
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    estimate_from_counts(r, sum, sum_sq)
}

/// Estimate the intra-community influence `sigma(S)` of one community by
/// Monte Carlo over `r` shared live-edge realizations.
pub fn community_influence<R: Rng + ?Sized>(
    graph: &DirectedGraph,
    community: &crate::graph::NodeSet,
    r: usize,
    rng: &mut R,
) -> InfluenceEstimate {
    let groups = vec![(0u32, community.as_slice().to_vec())];
    estimate_pair_count(graph, &groups, r, rng.gen())
}

/// Estimate the partition objective `f(A) = sum_i sigma({j : (i,j) in A})`
/// for any subset of the ground set; communities may overlap.
pub fn partition_objective<R: Rng + ?Sized>(
    graph: &DirectedGraph,
    subset: &[GroundSetElement],
    r: usize,
    rng: &mut R,
) -> InfluenceEstimate {
    let groups = group_by_community(subset);
    estimate_pair_count(graph, &groups, r, rng.gen())
}

/// Same estimator, seeded directly; used wherever a stable evaluation stream
/// must be reproduced independently of caller rng state.
pub fn partition_objective_seeded(
    graph: &DirectedGraph,
    subset: &[GroundSetElement],
    r: usize,
    master_seed: u64,
) -> InfluenceEstimate {
    let groups = group_by_community(subset);
    estimate_pair_count(graph, &groups, r, master_seed)
}

/// Exact expected intra-community influence of one community, by enumeration
/// of every live-edge configuration of its induced subgraph.
pub fn exact_community_influence(graph: &DirectedGraph, community: &[u32]) -> Result<f64> {
    let n = graph.node_count();
    let mut members: Vec<u32> = community.to_vec();
    members.sort_unstable();
    members.dedup();
    if let Some(&bad) = members.iter().find(|&&v| v as usize >= n) {
        return Err(Error::UnknownNode(bad as usize));
    }

    let mut in_set = vec![false; n];
    for &v in &members {
        in_set[v as usize] = true;
    }

    // Per member: candidate live parents inside the set, with probabilities;
    // the residual mass is the "no parent" branch.
    let mut choices: Vec<Vec<(u32, f64)>> = Vec::with_capacity(members.len());
    let mut states: u128 = 1;
    for &v in &members {
        let mut opts: Vec<(u32, f64)> = Vec::new();
        let mut inside = 0.0;
        for (idx, &src) in graph.in_neighbors(v as usize).iter().enumerate() {
            if in_set[src as usize] {
                let w = graph.in_weight_slice(v as usize)[idx];
                if w > 0.0 {
                    opts.push((src, w));
                    inside += w;
                }
            }
        }
        let none_prob = (1.0 - inside).max(0.0);
        if none_prob > 0.0 {
            opts.push((NO_PARENT, none_prob));
        }
        states = states.saturating_mul(opts.len().max(1) as u128);
        if states > EXACT_STATE_BUDGET {
            return Err(Error::EnumerationBudget {
                states,
                budget: EXACT_STATE_BUDGET,
            });
        }
        choices.push(opts);
    }

    let mut scratch = Scratch::new(n);
    let generation = scratch.mark_members(&members);
    let mut expectation = 0.0;

    fn recurse(
        depth: usize,
        prob: f64,
        members: &[u32],
        choices: &[Vec<(u32, f64)>],
        scratch: &mut Scratch,
        generation: u64,
        acc: &mut f64,
    ) {
        if depth == members.len() {
            *acc += prob * scratch.intra_pairs(members, generation) as f64;
            return;
        }
        let node = members[depth] as usize;
        if choices[depth].is_empty() {
            scratch.parents[node] = NO_PARENT;
            recurse(depth + 1, prob, members, choices, scratch, generation, acc);
            return;
        }
        for &(parent, p) in &choices[depth] {
            scratch.parents[node] = parent;
            recurse(depth + 1, prob * p, members, choices, scratch, generation, acc);
        }
    }

    recurse(0, 1.0, &members, &choices, &mut scratch, generation, &mut expectation);
    Ok(expectation)
}

/// Exact partition objective by per-community enumeration. Refuses with an
/// enumeration-budget error when any community exceeds `EXACT_STATE_BUDGET`
/// configurations.
pub fn exact_objective(graph: &DirectedGraph, subset: &[GroundSetElement]) -> Result<f64> {
    let mut total = 0.0;
    for (_, nodes) in group_by_community(subset) {
        total += exact_community_influence(graph, &nodes)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{load_edge_list, Directedness, NodeSet};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::io::Cursor;

    fn graph(text: &str) -> DirectedGraph {
        load_edge_list(Cursor::new(text), Directedness::Directed).unwrap()
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn all_in_one(n: usize) -> Vec<GroundSetElement> {
        (0..n as u32).map(|v| GroundSetElement::new(0, v)).collect()
    }

    #[test]
    fn no_in_edges_never_chooses() {
        let g = graph("0 1 1.0\n");
        for seed in 0..20 {
            let s = sample_live_edge(&g, &mut rng(seed));
            assert_eq!(s.chosen_in_edge(0), None);
        }
    }

    #[test]
    fn weight_one_edge_always_chosen() {
        let g = graph("0 1 1.0\n");
        for seed in 0..20 {
            let s = sample_live_edge(&g, &mut rng(seed));
            assert_eq!(s.chosen_in_edge(1), Some(0));
        }
    }

    #[test]
    fn half_half_selection_frequencies() {
        // Node 1 has two half-weight in-edges (from 0 and from 2).
        let g = graph("0 1 0.5\n2 1 0.5\n");
        let mut r = rng(7);
        let mut picked_zero = 0u32;
        let trials = 10_000;
        for _ in 0..trials {
            match sample_live_edge(&g, &mut r).chosen_in_edge(1) {
                Some(0) => picked_zero += 1,
                Some(2) => {}
                other => panic!("unexpected choice {other:?}"),
            }
        }
        // Binomial(10000, 0.5): sigma = 50, allow 3 sigma.
        assert!((picked_zero as i64 - 5_000).abs() <= 150, "picked {picked_zero}");
    }

    #[test]
    fn spread_examples() {
        // Chain 0 -> 1 -> 2 fully live.
        let g = graph("0 1 1.0\n1 2 1.0\n");
        let s = sample_live_edge(&g, &mut rng(0));
        assert_eq!(single_seed_spread(&s, 0).unwrap(), 2);
        assert_eq!(single_seed_spread(&s, 1).unwrap(), 1);
        assert_eq!(single_seed_spread(&s, 2).unwrap(), 0);
        assert!(single_seed_spread(&s, 3).is_err());
    }

    #[test]
    fn spread_with_no_live_edges_is_zero() {
        let g = graph("0 1 0.0\n1 2 0.0\n");
        let s = sample_live_edge(&g, &mut rng(1));
        for v in 0..3 {
            assert_eq!(single_seed_spread(&s, v).unwrap(), 0);
        }
    }

    #[test]
    fn singleton_community_scores_zero() {
        let g = graph("0 1 1.0\n");
        let est = community_influence(&g, &NodeSet::new(vec![0]), 50, &mut rng(3));
        assert_eq!(est.value, 0.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn empty_community_scores_zero() {
        let g = graph("0 1 1.0\n");
        let est = community_influence(&g, &NodeSet::new(vec![]), 5, &mut rng(3));
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn certain_edge_pair_scores_one() {
        let g = graph("0 1 1.0\n");
        let est = community_influence(&g, &NodeSet::new(vec![0, 1]), 100, &mut rng(5));
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn mutual_pair_scores_two() {
        let g = graph("0 1 1.0\n1 0 1.0\n");
        let est = community_influence(&g, &NodeSet::new(vec![0, 1]), 100, &mut rng(5));
        assert_eq!(est.value, 2.0);
    }

    #[test]
    fn empty_subset_objective_zero() {
        let g = graph("0 1 1.0\n");
        let est = partition_objective(&g, &[], 10, &mut rng(0));
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn one_community_collapses_to_total_spread() {
        let g = graph("0 1 1.0\n1 2 1.0\n");
        let est = partition_objective(&g, &all_in_one(3), 50, &mut rng(0));
        // Deterministic live edges: 0 reaches {1,2}, 1 reaches {2}.
        assert_eq!(est.value, 3.0);
    }

    #[test]
    fn pair_plus_isolated_node_scores_two() {
        let g = graph("0 1 1.0\n1 0 1.0\n2 3 0.0\n");
        let subset = vec![
            GroundSetElement::new(0, 0),
            GroundSetElement::new(0, 1),
            GroundSetElement::new(1, 2),
        ];
        let est = partition_objective(&g, &subset, 200, &mut rng(9));
        assert_eq!(est.value, 2.0);
    }

    #[test]
    fn exact_singleton_is_zero() {
        let g = graph("0 1 1.0\n");
        let v = exact_objective(&g, &[GroundSetElement::new(0, 0)]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn exact_half_edge() {
        let g = graph("0 1 0.5\n");
        let v = exact_objective(&g, &all_in_one(2)).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_full_path() {
        let g = graph("0 1 1.0\n1 2 1.0\n");
        let v = exact_objective(&g, &all_in_one(3)).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn exact_budget_refusal() {
        // 24 nodes, each with 3 interior in-edges: 4^24 states > 1e7.
        let mut lines = String::new();
        let n = 24u32;
        for v in 0..n {
            for k in 1..=3u32 {
                let src = (v + k) % n;
                lines.push_str(&format!("{src} {v} 0.3\n"));
            }
        }
        let g = graph(&lines);
        let err = exact_objective(&g, &all_in_one(n as usize)).unwrap_err();
        assert!(matches!(err, Error::EnumerationBudget { .. }));
    }

    #[test]
    fn estimator_matches_exact_on_random_weights() {
        let g = graph("0 1 0.4\n1 2 0.6\n2 0 0.25\n0 2 0.3\n");
        let subset = all_in_one(3);
        let exact = exact_objective(&g, &subset).unwrap();
        let est = partition_objective(&g, &subset, 20_000, &mut rng(11));
        assert!(
            (est.value - exact).abs() <= 4.0 * est.std_error,
            "estimate {} vs exact {} (se {})",
            est.value,
            exact,
            est.std_error
        );
    }

    #[test]
    fn estimates_are_deterministic_for_fixed_seed() {
        let g = graph("0 1 0.5\n1 2 0.5\n2 0 0.5\n");
        let a = partition_objective(&g, &all_in_one(3), 500, &mut rng(21));
        let b = partition_objective(&g, &all_in_one(3), 500, &mut rng(21));
        assert_eq!(a, b);
    }

    #[test]
    fn overlapping_communities_are_accepted() {
        let g = graph("0 1 1.0\n1 0 1.0\n");
        // Both nodes in both communities: each community contributes 2.
        let subset = vec![
            GroundSetElement::new(0, 0),
            GroundSetElement::new(0, 1),
            GroundSetElement::new(1, 0),
            GroundSetElement::new(1, 1),
        ];
        let est = partition_objective(&g, &subset, 50, &mut rng(2));
        assert_eq!(est.value, 4.0);
        let exact = exact_objective(&g, &subset).unwrap();
        assert_eq!(exact, 4.0);
    }
}
