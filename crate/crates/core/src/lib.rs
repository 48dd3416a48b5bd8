//! Influence-maximizing community partition of directed social graphs under
//! the linear threshold diffusion model.
//!
//! The pipeline: load or generate a directed graph, derive in-degree-based
//! edge weights, relax the intra-community influence objective through its
//! set-function extension, run a discretized continuous greedy over the
//! partition matroid polytope, and round the fractional result into a hard
//! partition. Exact enumeration oracles back the test suites on small
//! instances, and four baseline partitioners support benchmarking.

pub mod baselines;
pub mod error;
pub mod graph;
pub mod greedy;
pub mod influence;
pub mod lovasz;
pub mod objective;
pub mod rng;
pub mod synth;

pub use baselines::{
    label_propagation, mamkcp, random_partition, run_baseline, samkcp, BaselineConfig,
    BaselineMethod,
};
pub use error::{Error, Result};
pub use graph::{load_edge_list, DirectedGraph, Directedness, Edge, NodeSet};
pub use greedy::{
    best_of_k_roundings, continuous_greedy, continuous_greedy_with_oracle,
    max_weight_independent_set, randomized_round, write_assignment_csv, CommunityPartition,
    GreedyTrace, PartitionMatroid, TimeStep, TraceRecord,
};
pub use influence::{
    community_influence, exact_community_influence, exact_objective, partition_objective,
    partition_objective_seeded, sample_live_edge, single_seed_spread, GroundSetElement,
    InfluenceEstimate, LiveEdgeSample,
};
pub use lovasz::{
    lovasz_gradient, lovasz_value, sort_assignment, AssignmentVector, GradientVector,
    SortedPrefix,
};
pub use objective::{ExactObjective, MonteCarloObjective, ObjectiveOracle};
