//! Loader and weight-derivation properties over generated inputs.

mod common;

use imcp_core::{load_edge_list, Directedness, NodeSet};
use proptest::prelude::*;
use std::io::Cursor;

/// Random raw edge lines: ids from a small pool, optional duplicates.
fn edge_lines() -> impl Strategy<Value = String> {
    prop::collection::vec((0u32..10, 0u32..10), 1..40).prop_map(|pairs| {
        let mut text = String::from("# generated\n");
        for (a, b) in pairs {
            if a != b {
                text.push_str(&format!("n{a} n{b}\n"));
            }
        }
        text
    })
}

/// Label-resolved canonical form; internal id numbering is an artifact of
/// first-appearance order and is not part of graph identity.
fn canonical(g: &imcp_core::DirectedGraph) -> (Vec<String>, Vec<(String, String, u64)>) {
    let mut labels: Vec<String> = g.labels().to_vec();
    labels.sort();
    let mut edges: Vec<(String, String, u64)> = g
        .edges()
        .iter()
        .map(|e| {
            (
                g.label(e.source as usize).to_string(),
                g.label(e.target as usize).to_string(),
                e.weight.to_bits(),
            )
        })
        .collect();
    edges.sort();
    (labels, edges)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, .. ProptestConfig::default() })]

    /// Serialize-then-reload is the identity on loaded graphs.
    #[test]
    fn round_trip_is_identity(text in edge_lines(), undirected in any::<bool>()) {
        let mode = if undirected { Directedness::Undirected } else { Directedness::Directed };
        let Ok(g) = load_edge_list(Cursor::new(text), mode) else {
            // Inputs with no surviving edges are fine to skip.
            return Ok(());
        };
        let weighted = g.derive_lt_weights();
        for graph in [&g, &weighted] {
            let mut buf = Vec::new();
            graph.write_edge_list(&mut buf).unwrap();
            // The written list is already expanded; reload as directed.
            let again = load_edge_list(Cursor::new(buf), Directedness::Directed).unwrap();
            prop_assert_eq!(canonical(graph), canonical(&again));
        }
    }

    /// After weight derivation every node with in-edges sums to one, and any
    /// induced subgraph still satisfies the weight-sum cap.
    #[test]
    fn derived_weights_sum_to_one_and_survive_extraction(
        text in edge_lines(),
        keep_mask in prop::collection::vec(any::<bool>(), 10),
    ) {
        let Ok(g) = load_edge_list(Cursor::new(text), Directedness::Undirected) else {
            return Ok(());
        };
        let g = g.derive_lt_weights();
        for v in 0..g.node_count() {
            if g.in_degree(v) > 0 {
                prop_assert!((g.total_in_weight(v) - 1.0).abs() <= 1e-9);
            }
        }

        let kept: Vec<u32> = (0..g.node_count() as u32)
            .filter(|&v| keep_mask[v as usize % keep_mask.len()])
            .collect();
        let sub = g.induced_subgraph(&NodeSet::new(kept)).unwrap();
        for v in 0..sub.node_count() {
            prop_assert!(sub.total_in_weight(v) <= 1.0 + 1e-9);
        }
    }
}
