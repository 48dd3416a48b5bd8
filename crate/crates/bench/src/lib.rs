//! Shared fixtures for the pipeline benchmarks.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use imcp_core::synth::{graph_from_pairs, two_block};
use imcp_core::DirectedGraph;

/// Planted two-block graph with derived weights; the standard bench input.
pub fn bench_graph(n: usize, seed: u64) -> DirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (pairs, _) = two_block(n, 0.05, 0.005, &mut rng).expect("valid probabilities");
    graph_from_pairs(n, &pairs)
        .expect("generated pairs are valid")
        .derive_lt_weights()
}
