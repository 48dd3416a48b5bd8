//! Shared test oracles, independent of the library's live-edge machinery.
// Not every test target uses every oracle.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use imcp_core::{CommunityPartition, DirectedGraph, ExactObjective, ObjectiveOracle};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Direct linear-threshold diffusion from a single seed, restricted to
/// `members`: fresh uniform thresholds, frontier expansion on summed active
/// in-weights. Deliberately naive; shares no code with the live-edge paths.
pub fn lt_spread_once<R: Rng>(
    graph: &DirectedGraph,
    members: &[bool],
    seed_node: usize,
    rng: &mut R,
) -> usize {
    let n = graph.node_count();
    // 1 - u keeps thresholds in (0, 1]; a threshold of exactly zero would
    // self-activate nodes.
    let thresholds: Vec<f64> = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();
    let mut active = vec![false; n];
    active[seed_node] = true;
    loop {
        let mut changed = false;
        for v in 0..n {
            if active[v] || !members[v] {
                continue;
            }
            let mut mass = 0.0;
            for (idx, &src) in graph.in_neighbors(v).iter().enumerate() {
                if members[src as usize] && active[src as usize] {
                    mass += graph.in_weight_slice(v)[idx];
                }
            }
            if mass >= thresholds[v] {
                active[v] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    active.iter().filter(|&&a| a).count() - 1
}

/// Naive estimate of sigma(S): per replicate, every member seeds one
/// independent threshold simulation; returns (mean, standard error).
pub fn naive_sigma<R: Rng>(
    graph: &DirectedGraph,
    members: &[u32],
    replicates: usize,
    rng: &mut R,
) -> (f64, f64) {
    let n = graph.node_count();
    let mut mask = vec![false; n];
    for &v in members {
        mask[v as usize] = true;
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..replicates {
        let mut total = 0usize;
        for &s in members {
            total += lt_spread_once(graph, &mask, s as usize, rng);
        }
        sum += total as f64;
        sum_sq += (total * total) as f64;
    }
    let mean = sum / replicates as f64;
    let var = (sum_sq - replicates as f64 * mean * mean) / (replicates as f64 - 1.0);
    (mean, (var.max(0.0) / replicates as f64).sqrt())
}

/// Random small graph with valid LT weights; see `synth::random_lt_graph`.
pub fn random_small_graph<R: Rng>(n: usize, rng: &mut R) -> DirectedGraph {
    imcp_core::synth::random_lt_graph(n, 3, rng)
}

/// Exact brute-force optimum of the partition objective over all m^n
/// assignments; the benchmark for the approximation bound.
pub fn brute_force_opt(graph: &DirectedGraph, m: usize) -> f64 {
    let n = graph.node_count();
    let mut oracle = ExactObjective::new(graph, m);
    let mut best = f64::NEG_INFINITY;
    let total = (m as u64).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut assignment = Vec::with_capacity(n);
        for _ in 0..n {
            assignment.push((c % m as u64) as u32);
            c /= m as u64;
        }
        let partition = CommunityPartition::new(m, assignment).unwrap();
        let value = oracle.evaluate(&partition.ground_subset()).unwrap();
        best = best.max(value);
    }
    best
}
