//! Discretized continuous greedy over the partition matroid, plus randomized
//! rounding of the fractional solution into a hard community partition.
//!
//! The trajectory starts at zero and, for each of the `K = 1/dt` steps, adds
//! `dt` to the entries of the maximum-weight matroid base under the current
//! extension gradient. Weights are nonnegative, so that base simply assigns
//! every node to its argmax community. After `K` steps every node's column
//! sums to exactly one, which is what independent per-node rounding requires.

use std::io::Write;
use std::time::Instant;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::influence::{partition_objective_seeded, GroundSetElement};
use crate::lovasz::{lovasz_gradient, AssignmentVector, GradientVector};
use crate::objective::{MonteCarloObjective, ObjectiveOracle};
use crate::rng::{derive_seed, stream_rng, tag};

/// Partition matroid on `M x V`: independent sets use each node at most once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionMatroid {
    m: usize,
    n: usize,
}

impl PartitionMatroid {
    pub fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn is_independent(&self, set: &[GroundSetElement]) -> bool {
        let mut used = vec![false; self.n];
        for e in set {
            if e.community as usize >= self.m || e.node as usize >= self.n {
                return false;
            }
            if used[e.node as usize] {
                return false;
            }
            used[e.node as usize] = true;
        }
        true
    }

    /// A base assigns every node exactly once.
    pub fn is_base(&self, set: &[GroundSetElement]) -> bool {
        set.len() == self.n && self.is_independent(set)
    }
}

/// Unit-fraction time step `dt = 1/K`; any other step size would walk the
/// trajectory past the polytope boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeStep {
    steps: usize,
}

impl TimeStep {
    pub fn from_steps(steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidTimeStep(f64::INFINITY));
        }
        Ok(Self { steps })
    }

    pub fn from_dt(dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt <= 1.0) {
            return Err(Error::InvalidTimeStep(dt));
        }
        let k = (1.0 / dt).round();
        if ((1.0 / dt) - k).abs() > 1e-6 {
            return Err(Error::InvalidTimeStep(dt));
        }
        Ok(Self { steps: k as usize })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.steps as f64
    }
}

/// Hard partition: one community id per node (communities may be empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityPartition {
    m: usize,
    assignment: Vec<u32>,
}

impl CommunityPartition {
    pub fn new(m: usize, assignment: Vec<u32>) -> Result<Self> {
        if let Some(&bad) = assignment.iter().find(|&&c| c as usize >= m) {
            return Err(Error::Validation(format!(
                "community id {bad} out of range for m={m}"
            )));
        }
        Ok(Self { m, assignment })
    }

    pub fn community_count(&self) -> usize {
        self.m
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn community_of(&self, node: usize) -> u32 {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    /// Node lists per community id; covers every node exactly once.
    pub fn community_sets(&self) -> Vec<Vec<u32>> {
        let mut sets = vec![Vec::new(); self.m];
        for (node, &c) in self.assignment.iter().enumerate() {
            sets[c as usize].push(node as u32);
        }
        sets
    }

    /// The partition viewed as a ground subset (a matroid base).
    pub fn ground_subset(&self) -> Vec<GroundSetElement> {
        self.assignment
            .iter()
            .enumerate()
            .map(|(node, &c)| GroundSetElement::new(c, node as u32))
            .collect()
    }

    /// CSV `node,community`; community ids are 1-based in files.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(b"node,community\n")?;
        for (node, &c) in self.assignment.iter().enumerate() {
            out.write_all(format!("{node},{}\n", c + 1).as_bytes())?;
        }
        Ok(())
    }
}

/// One greedy step: time, selected base, first-order objective estimate.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub step: usize,
    pub t: f64,
    pub f_hat_estimate: f64,
    pub seconds: f64,
    pub chosen: Vec<GroundSetElement>,
}

/// Audit log of a greedy run.
#[derive(Debug, Clone, Default)]
pub struct GreedyTrace {
    pub records: Vec<TraceRecord>,
}

impl GreedyTrace {
    /// Line log `step,t,f_hat_estimate,seconds`.
    pub fn write_log<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(b"step,t,f_hat_estimate,seconds\n")?;
        for r in &self.records {
            out.write_all(format!("{},{},{},{}\n", r.step, r.t, r.f_hat_estimate, r.seconds).as_bytes())?;
        }
        Ok(())
    }
}

/// Maximum-weight independent set for nonnegative weights: every node goes to
/// its argmax community, ties to the lowest community id. Including every
/// node never decreases total weight, so the result is always a base.
pub fn max_weight_independent_set(
    weights: &GradientVector,
    matroid: &PartitionMatroid,
) -> Vec<GroundSetElement> {
    let (m, n) = matroid.dims();
    debug_assert_eq!(weights.dims(), (m, n));
    let mut chosen = Vec::with_capacity(n);
    for j in 0..n {
        let mut best = 0usize;
        let mut best_w = weights.get(0, j);
        for c in 1..m {
            let w = weights.get(c, j);
            if w > best_w {
                best_w = w;
                best = c;
            }
        }
        chosen.push(GroundSetElement::new(best as u32, j as u32));
    }
    chosen
}

/// Materialize `x` from integer step counts. Exact-sum mode rewrites each
/// node's last nonzero entry as the complement of its predecessors so the
/// column sums are exactly 1.0 under plain index-order summation.
fn materialize(m: usize, n: usize, counts: &[u32], k: usize, exact_columns: bool) -> AssignmentVector {
    let mut x = AssignmentVector::zeros(m, n);
    for c in 0..m {
        for j in 0..n {
            x.set(c, j, counts[c * n + j] as f64 / k as f64);
        }
    }
    if exact_columns {
        for j in 0..n {
            if let Some(last) = (0..m).rev().find(|&c| counts[c * n + j] > 0) {
                let prefix: f64 = (0..last).map(|c| x.get(c, j)).sum();
                x.set(last, j, 1.0 - prefix);
            }
        }
    }
    x
}

/// Discretized continuous greedy against any objective oracle.
///
/// Runs `K = 1/dt` steps of: refresh the oracle batch, take the extension
/// gradient at the current point, clamp it nonnegative, select the
/// maximum-weight base, and advance by `dt` along its indicator. Returns the
/// boundary point (every column sums to exactly 1) plus the step trace.
pub fn continuous_greedy_with_oracle(
    oracle: &mut dyn ObjectiveOracle,
    step: TimeStep,
) -> Result<(AssignmentVector, GreedyTrace)> {
    let (m, n) = oracle.dims();
    assert!(m >= 1, "need at least one community");
    let k = step.steps();
    let matroid = PartitionMatroid::new(m, n);
    let mut counts = vec![0u32; m * n];
    let mut trace = GreedyTrace::default();

    for s in 0..k {
        let started = Instant::now();
        oracle.begin_step(s);
        let x = materialize(m, n, &counts, k, false);
        let weights = lovasz_gradient(&x, oracle)?.clamped_nonnegative();
        let chosen = max_weight_independent_set(&weights, &matroid);
        debug_assert!(matroid.is_base(&chosen));
        for e in &chosen {
            counts[e.community as usize * n + e.node as usize] += 1;
        }
        // First-order estimate of the extension value at the new point under
        // this step's sample batch.
        let x_next = materialize(m, n, &counts, k, false);
        trace.records.push(TraceRecord {
            step: s,
            t: (s + 1) as f64 / k as f64,
            f_hat_estimate: weights.dot(&x_next),
            seconds: started.elapsed().as_secs_f64(),
            chosen,
        });
    }

    Ok((materialize(m, n, &counts, k, true), trace))
}

/// Monte Carlo continuous greedy on a graph; the paper's main routine.
pub fn continuous_greedy<R: Rng + ?Sized>(
    graph: &DirectedGraph,
    m: usize,
    step: TimeStep,
    samples: usize,
    rng: &mut R,
) -> Result<(AssignmentVector, GreedyTrace)> {
    let mut oracle = MonteCarloObjective::new(graph, m, samples, rng.gen());
    continuous_greedy_with_oracle(&mut oracle, step)
}

/// Independently assign each node to community `i` with probability
/// `x_ij`. Requires every column to sum to 1 within `1e-9`; a violation
/// means an upstream bug, not bad luck.
pub fn randomized_round<R: Rng + ?Sized>(
    x: &AssignmentVector,
    rng: &mut R,
) -> Result<CommunityPartition> {
    let (m, n) = x.dims();
    let mut assignment = Vec::with_capacity(n);
    for j in 0..n {
        let sum = x.column_sum(j);
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::UnroundableAssignment { node: j, sum });
        }
        let u: f64 = rng.gen::<f64>() * sum;
        let mut acc = 0.0;
        let mut pick = None;
        for c in 0..m {
            let v = x.get(c, j);
            if v > 0.0 {
                acc += v;
                pick = Some(c as u32);
                if u < acc {
                    break;
                }
            }
        }
        assignment.push(pick.expect("column sums to 1, so some entry is positive"));
    }
    CommunityPartition::new(m, assignment)
}

/// Round `k` times with derived streams, score each candidate with the same
/// evaluation stream, and keep the best. `k = 1` reproduces a single plain
/// rounding.
pub fn best_of_k_roundings<R: Rng + ?Sized>(
    x: &AssignmentVector,
    k: usize,
    graph: &DirectedGraph,
    samples: usize,
    rng: &mut R,
) -> Result<CommunityPartition> {
    assert!(k >= 1, "need at least one rounding");
    let master: u64 = rng.gen();
    let eval_seed = derive_seed(master, &[tag::EVALUATION]);
    let mut best: Option<(f64, CommunityPartition)> = None;
    for i in 0..k {
        let mut round_rng = stream_rng(master, &[tag::ROUNDING, i as u64]);
        let candidate = randomized_round(x, &mut round_rng)?;
        let score =
            partition_objective_seeded(graph, &candidate.ground_subset(), samples, eval_seed).value;
        match &best {
            Some((incumbent, _)) if *incumbent >= score => {}
            _ => best = Some((score, candidate)),
        }
    }
    Ok(best.expect("k >= 1").1)
}

/// CSV `node,community,probability` for a fractional assignment; only
/// positive entries are written, community ids 1-based in files.
pub fn write_assignment_csv<W: Write>(x: &AssignmentVector, mut out: W) -> Result<()> {
    let (m, n) = x.dims();
    out.write_all(b"node,community,probability\n")?;
    for j in 0..n {
        for c in 0..m {
            let v = x.get(c, j);
            if v > 0.0 {
                out.write_all(format!("{j},{},{v}\n", c + 1).as_bytes())?;
            }
        }
    }
    Ok(())
}
