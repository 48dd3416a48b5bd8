//! Comparison partitioners: uniform random assignment, label propagation,
//! and the recursive split / recursive merge heuristics.
//!
//! The split and merge methods score candidate partitions on one fixed batch
//! of live-edge realizations drawn per run, so their interior searches are
//! deterministic given the seed and all candidates are compared under common
//! random numbers.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::greedy::CommunityPartition;
use crate::influence::fill_parents;
use crate::rng::{stream_rng, tag};

const NO_PARENT: u32 = u32::MAX;
const NO_COMMUNITY: u32 = u32::MAX;

/// Baseline selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    Random,
    LabelPropagation,
    Samkcp,
    Mamkcp,
}

/// Shared baseline knobs.
#[derive(Debug, Clone, Copy)]
pub struct BaselineConfig {
    pub method: BaselineMethod,
    /// Target community count.
    pub m: usize,
    /// Label-propagation sweep cap.
    pub max_iterations: usize,
    /// Monte Carlo samples behind interior objective estimates.
    pub samples: usize,
}

impl BaselineConfig {
    pub fn new(method: BaselineMethod, m: usize) -> Self {
        Self {
            method,
            m,
            max_iterations: 50,
            samples: 500,
        }
    }
}

/// Run the configured baseline.
pub fn run_baseline<R: Rng + ?Sized>(
    graph: &DirectedGraph,
    config: &BaselineConfig,
    rng: &mut R,
) -> Result<CommunityPartition> {
    assert!(config.m >= 1, "need at least one community");
    match config.method {
        BaselineMethod::Random => Ok(random_partition(graph, config.m, rng)),
        BaselineMethod::LabelPropagation => label_propagation(
            graph,
            config.m,
            config.max_iterations,
            config.samples,
            rng,
        ),
        BaselineMethod::Samkcp => samkcp(graph, config.m, config.samples, rng),
        BaselineMethod::Mamkcp => mamkcp(graph, config.m, config.samples, rng),
    }
}

/// Assign every node uniformly at random among `m` communities.
pub fn random_partition<R: Rng + ?Sized>(
    graph: &DirectedGraph,
    m: usize,
    rng: &mut R,
) -> CommunityPartition {
    let assignment = (0..graph.node_count())
        .map(|_| rng.gen_range(0..m) as u32)
        .collect();
    CommunityPartition::new(m, assignment).expect("ids drawn in range")
}

/// Fixed batch of live-edge realizations used by a whole baseline run.
struct SampleSet {
    parents: Vec<Vec<u32>>,
}

impl SampleSet {
    fn draw(graph: &DirectedGraph, r: usize, master: u64) -> Self {
        let n = graph.node_count();
        let parents = (0..r)
            .into_par_iter()
            .map(|s| {
                let mut rng = stream_rng(master, &[tag::BASELINE, s as u64]);
                let mut p = vec![NO_PARENT; n];
                fill_parents(graph, &mut rng, &mut p);
                p
            })
            .collect();
        Self { parents }
    }
}

/// Reusable chain-walk buffers.
struct Walker {
    stamp: Vec<u64>,
    member: Vec<u64>,
    walk: u64,
    generation: u64,
}

impl Walker {
    fn new(n: usize) -> Self {
        Self {
            stamp: vec![0; n],
            member: vec![0; n],
            walk: 0,
            generation: 0,
        }
    }

    fn mark(&mut self, nodes: &[u32]) -> u64 {
        self.generation += 1;
        for &v in nodes {
            self.member[v as usize] = self.generation;
        }
        self.generation
    }
}

/// Summed interior pair count of one node set over the whole sample batch.
/// Dividing by the batch size gives the sigma estimate; comparisons can use
/// the raw counts directly.
fn set_pair_count(walker: &mut Walker, samples: &SampleSet, nodes: &[u32]) -> u64 {
    let generation = walker.mark(nodes);
    let mut total = 0u64;
    for parents in &samples.parents {
        for &b in nodes {
            walker.walk += 1;
            walker.stamp[b as usize] = walker.walk;
            let mut cur = parents[b as usize];
            while cur != NO_PARENT
                && walker.member[cur as usize] == generation
                && walker.stamp[cur as usize] != walker.walk
            {
                walker.stamp[cur as usize] = walker.walk;
                total += 1;
                cur = parents[cur as usize];
            }
        }
    }
    total
}

/// Pairwise merge gains for the current community assignment.
///
/// A live pair contributes to `gain(c1, c2)` exactly when its chain touches
/// both communities and nothing else, i.e. it becomes interior once the two
/// merge. Chains stop as soon as a third community appears, which keeps the
/// sweep cheap on fine partitions.
fn merge_gains(
    walker: &mut Walker,
    samples: &SampleSet,
    assignment: &[u32],
) -> HashMap<(u32, u32), u64> {
    let n = assignment.len();
    let mut gains: HashMap<(u32, u32), u64> = HashMap::new();
    for parents in &samples.parents {
        for b in 0..n {
            let c1 = assignment[b];
            let mut c2 = NO_COMMUNITY;
            walker.walk += 1;
            walker.stamp[b] = walker.walk;
            let mut cur = parents[b];
            while cur != NO_PARENT && walker.stamp[cur as usize] != walker.walk {
                walker.stamp[cur as usize] = walker.walk;
                let ca = assignment[cur as usize];
                if ca != c1 && ca != c2 {
                    if c2 != NO_COMMUNITY {
                        break;
                    }
                    c2 = ca;
                }
                if c2 != NO_COMMUNITY {
                    let key = (c1.min(c2), c1.max(c2));
                    *gains.entry(key).or_insert(0) += 1;
                }
                cur = parents[cur as usize];
            }
        }
    }
    gains
}

/// Argmax merge pair: highest gain, ties to the smallest id pair. Pairs
/// absent from the table have gain zero; when every gain is zero the two
/// smallest active ids merge.
fn best_merge(gains: &HashMap<(u32, u32), u64>, active: &[u32]) -> (u32, u32) {
    debug_assert!(active.len() >= 2);
    let mut best: Option<((u32, u32), u64)> = None;
    for (&pair, &gain) in gains {
        let better = match best {
            None => true,
            Some((bp, bg)) => gain > bg || (gain == bg && pair < bp),
        };
        if better {
            best = Some((pair, gain));
        }
    }
    match best {
        Some((pair, _)) => pair,
        None => (active[0], active[1]),
    }
}

/// Recursive merge: start from singletons and merge the argmax-gain pair
/// until `m` communities remain.
pub fn mamkcp<R: Rng + ?Sized>(
    graph: &DirectedGraph,
    m: usize,
    samples: usize,
    rng: &mut R,
) -> Result<CommunityPartition> {
    let n = graph.node_count();
    if m > n {
        return Err(Error::TooManyCommunities { m, n });
    }
    let batch = SampleSet::draw(graph, samples, rng.gen());
    let mut walker = Walker::new(n);
    let mut assignment: Vec<u32> = (0..n as u32).collect();
    let mut active: Vec<u32> = (0..n as u32).collect();

    while active.len() > m {
        let gains = merge_gains(&mut walker, &batch, &assignment);
        let (keep, fold) = best_merge(&gains, &active);
        for c in assignment.iter_mut() {
            if *c == fold {
                *c = keep;
            }
        }
        active.retain(|&c| c != fold);
    }
    debug_assert_eq!(active.len(), m);

    // Renumber surviving ids to 0..m in ascending order.
    let mut renumber = vec![NO_COMMUNITY; n];
    for (new_id, &old) in active.iter().enumerate() {
        renumber[old as usize] = new_id as u32;
    }
    let assignment = assignment.iter().map(|&c| renumber[c as usize]).collect();
    CommunityPartition::new(m, assignment)
}

/// One community as a mutable bisection state during split search.
struct Bisection {
    left: Vec<u32>,
    right: Vec<u32>,
    left_pairs: u64,
    right_pairs: u64,
}

/// Independent descents per split search. Single-node moves stall in local
/// optima easily on supermodular objectives; a few restarts make the split
/// competitive with any batch of random bisections.
const SPLIT_RESTARTS: usize = 5;

/// Best 2-way split over several local-search descents.
fn local_search_split<R: Rng + ?Sized>(
    walker: &mut Walker,
    batch: &SampleSet,
    nodes: &[u32],
    rng: &mut R,
) -> Bisection {
    let mut best: Option<Bisection> = None;
    for _ in 0..SPLIT_RESTARTS {
        let candidate = descend_from_random_bisection(walker, batch, nodes, rng);
        let better = match &best {
            None => true,
            Some(b) => candidate.left_pairs + candidate.right_pairs > b.left_pairs + b.right_pairs,
        };
        if better {
            best = Some(candidate);
        }
    }
    best.expect("at least one restart")
}

/// All single-node move gains for a bisection, in two chain sweeps per side
/// per sample.
///
/// Removal marginals come from through-counting: walking up from `b` inside
/// its side visits distinct chain nodes `c_1..c_L`; pair `(c_t, b)` has
/// exactly the chain `{b, c_1..c_t}`, so `c_s` sits on `L - s + 1` of b's
/// pairs and `b` on all `L`. Insertion gains allow one foreign node on the
/// walk: every ancestor found at or beyond the foreign node `w` is a pair
/// that exists only once `w` joins this side, so it credits `w`.
struct MoveGains {
    /// Pairs destroyed when the node leaves its current side.
    removal: Vec<u64>,
    /// Pairs created when the node joins the opposite side.
    insertion: Vec<u64>,
}

fn sweep_move_gains(
    walker: &mut Walker,
    batch: &SampleSet,
    side_of: &[u8],
    left: &[u32],
    right: &[u32],
    n: usize,
) -> MoveGains {
    let mut gains = MoveGains {
        removal: vec![0; n],
        insertion: vec![0; n],
    };
    let mut path: Vec<u32> = Vec::with_capacity(64);

    for parents in &batch.parents {
        for (side, members) in [(0u8, left), (1u8, right)] {
            let foreign = 1 - side;
            // Removal marginals within this side.
            for &b in members {
                walker.walk += 1;
                walker.stamp[b as usize] = walker.walk;
                path.clear();
                let mut cur = parents[b as usize];
                while cur != NO_PARENT
                    && side_of[cur as usize] == side
                    && walker.stamp[cur as usize] != walker.walk
                {
                    walker.stamp[cur as usize] = walker.walk;
                    path.push(cur);
                    cur = parents[cur as usize];
                }
                let chain_len = path.len() as u64;
                gains.removal[b as usize] += chain_len;
                for (pos, &c) in path.iter().enumerate() {
                    gains.removal[c as usize] += chain_len - pos as u64;
                }
            }
            // Insertion gains for the opposite side's nodes into this side:
            // chains from members that route through one foreign node.
            for &b in members {
                walker.walk += 1;
                walker.stamp[b as usize] = walker.walk;
                let mut cur = parents[b as usize];
                // Skip the purely interior prefix (already counted pairs).
                while cur != NO_PARENT
                    && side_of[cur as usize] == side
                    && walker.stamp[cur as usize] != walker.walk
                {
                    walker.stamp[cur as usize] = walker.walk;
                    cur = parents[cur as usize];
                }
                if cur == NO_PARENT
                    || side_of[cur as usize] != foreign
                    || walker.stamp[cur as usize] == walker.walk
                {
                    continue;
                }
                let bridge = cur;
                walker.stamp[bridge as usize] = walker.walk;
                gains.insertion[bridge as usize] += 1;
                cur = parents[bridge as usize];
                while cur != NO_PARENT
                    && side_of[cur as usize] == side
                    && walker.stamp[cur as usize] != walker.walk
                {
                    walker.stamp[cur as usize] = walker.walk;
                    gains.insertion[bridge as usize] += 1;
                    cur = parents[cur as usize];
                }
            }
            // Chains that start at a foreign node and climb into this side.
            for &v in if side == 0 { right } else { left } {
                walker.walk += 1;
                walker.stamp[v as usize] = walker.walk;
                let mut cur = parents[v as usize];
                while cur != NO_PARENT
                    && side_of[cur as usize] == side
                    && walker.stamp[cur as usize] != walker.walk
                {
                    walker.stamp[cur as usize] = walker.walk;
                    gains.insertion[v as usize] += 1;
                    cur = parents[cur as usize];
                }
            }
        }
    }
    gains
}

/// One descent: random balanced start, then best single-node moves while any
/// strictly improves the summed pair count. Moves that would empty a side
/// are skipped.
fn descend_from_random_bisection<R: Rng + ?Sized>(
    walker: &mut Walker,
    batch: &SampleSet,
    nodes: &[u32],
    rng: &mut R,
) -> Bisection {
    debug_assert!(nodes.len() >= 2);
    let n = walker.stamp.len();
    let mut shuffled = nodes.to_vec();
    shuffled.shuffle(rng);
    let half = shuffled.len() / 2;
    let mut state = Bisection {
        left: shuffled[..half].to_vec(),
        right: shuffled[half..].to_vec(),
        left_pairs: 0,
        right_pairs: 0,
    };
    state.left_pairs = set_pair_count(walker, batch, &state.left);
    state.right_pairs = set_pair_count(walker, batch, &state.right);

    // 2 = not in this community.
    let mut side_of = vec![2u8; n];
    for &v in &state.left {
        side_of[v as usize] = 0;
    }
    for &v in &state.right {
        side_of[v as usize] = 1;
    }

    loop {
        let gains = sweep_move_gains(walker, batch, &side_of, &state.left, &state.right, n);
        let mut best: Option<(i64, u32)> = None;
        for &v in nodes {
            let from_left = side_of[v as usize] == 0;
            let src_len = if from_left {
                state.left.len()
            } else {
                state.right.len()
            };
            if src_len <= 1 {
                continue;
            }
            let delta =
                gains.insertion[v as usize] as i64 - gains.removal[v as usize] as i64;
            let better = match best {
                None => delta > 0,
                Some((bd, bv)) => delta > bd || (delta == bd && v < bv),
            };
            if better && delta > 0 {
                best = Some((delta, v));
            }
        }
        let Some((_, v)) = best else { break };
        let from_left = side_of[v as usize] == 0;
        if from_left {
            state.left.retain(|&u| u != v);
            state.right.push(v);
            state.left_pairs -= gains.removal[v as usize];
            state.right_pairs += gains.insertion[v as usize];
            side_of[v as usize] = 1;
        } else {
            state.right.retain(|&u| u != v);
            state.left.push(v);
            state.right_pairs -= gains.removal[v as usize];
            state.left_pairs += gains.insertion[v as usize];
            side_of[v as usize] = 0;
        }
    }

    for &v in nodes {
        side_of[v as usize] = 2;
    }
    state
}

/// Recursive split: start from one community and, `m - 1` times, split the
/// community whose best found 2-way split costs the least total objective.
/// Heuristic; no optimality claim.
pub fn samkcp<R: Rng + ?Sized>(
    graph: &DirectedGraph,
    m: usize,
    samples: usize,
    rng: &mut R,
) -> Result<CommunityPartition> {
    let n = graph.node_count();
    let batch = SampleSet::draw(graph, samples, rng.gen());
    let mut walker = Walker::new(n);
    let mut communities: Vec<Vec<u32>> = vec![(0..n as u32).collect()];
    let mut pair_counts: Vec<u64> = vec![set_pair_count(&mut walker, &batch, &communities[0])];

    while communities.len() < m {
        let mut best: Option<(i64, usize, Bisection)> = None;
        for (idx, nodes) in communities.iter().enumerate() {
            if nodes.len() < 2 {
                continue;
            }
            let split = local_search_split(&mut walker, &batch, nodes, rng);
            let delta =
                (split.left_pairs + split.right_pairs) as i64 - pair_counts[idx] as i64;
            let better = match &best {
                None => true,
                Some((bd, _, _)) => delta > *bd,
            };
            if better {
                best = Some((delta, idx, split));
            }
        }
        match best {
            Some((_, idx, split)) => {
                communities[idx] = split.left;
                pair_counts[idx] = split.left_pairs;
                communities.push(split.right);
                pair_counts.push(split.right_pairs);
            }
            // Nothing left to split; remaining ids stay empty.
            None => break,
        }
    }

    let mut assignment = vec![0u32; n];
    for (id, nodes) in communities.iter().enumerate() {
        for &v in nodes {
            assignment[v as usize] = id as u32;
        }
    }
    CommunityPartition::new(m, assignment)
}

/// Classic asynchronous label propagation, then a reduction to exactly `m`
/// groups: surplus groups merge by argmax objective gain, missing groups are
/// created by randomly bisecting the largest group.
pub fn label_propagation<R: Rng + ?Sized>(
    graph: &DirectedGraph,
    m: usize,
    max_iterations: usize,
    samples: usize,
    rng: &mut R,
) -> Result<CommunityPartition> {
    assert!(max_iterations >= 1);
    let n = graph.node_count();
    if n == 0 {
        return CommunityPartition::new(m, Vec::new());
    }

    // Undirected neighborhood: union of in- and out-neighbors.
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (v, list) in neighbors.iter_mut().enumerate() {
        list.extend_from_slice(graph.out_neighbors(v));
        list.extend_from_slice(graph.in_neighbors(v));
        list.sort_unstable();
        list.dedup();
    }

    let mut labels: Vec<u32> = (0..n as u32).collect();
    let mut order: Vec<u32> = (0..n as u32).collect();
    let mut counts: Vec<u32> = vec![0; n];
    let mut touched: Vec<u32> = Vec::new();

    for _ in 0..max_iterations {
        order.shuffle(rng);
        let mut changes = 0usize;
        for &v in &order {
            let neigh = &neighbors[v as usize];
            if neigh.is_empty() {
                continue;
            }
            touched.clear();
            for &u in neigh {
                let l = labels[u as usize];
                if counts[l as usize] == 0 {
                    touched.push(l);
                }
                counts[l as usize] += 1;
            }
            let top = touched
                .iter()
                .map(|&l| counts[l as usize])
                .max()
                .expect("nonempty neighborhood");
            let mut candidates: Vec<u32> = touched
                .iter()
                .copied()
                .filter(|&l| counts[l as usize] == top)
                .collect();
            candidates.sort_unstable();
            let new_label = *candidates
                .choose(rng)
                .expect("at least one top label");
            for &l in &touched {
                counts[l as usize] = 0;
            }
            if labels[v as usize] != new_label {
                labels[v as usize] = new_label;
                changes += 1;
            }
        }
        if changes == 0 {
            break;
        }
    }

    // Label groups in ascending order of their smallest member.
    let mut groups: Vec<Vec<u32>> = Vec::new();
    let mut group_of_label: HashMap<u32, usize> = HashMap::new();
    for v in 0..n as u32 {
        let l = labels[v as usize];
        match group_of_label.get(&l) {
            Some(&g) => groups[g].push(v),
            None => {
                group_of_label.insert(l, groups.len());
                groups.push(vec![v]);
            }
        }
    }

    let batch = SampleSet::draw(graph, samples, rng.gen());
    let mut walker = Walker::new(n);

    // Too many groups: merge the pair with the largest objective gain.
    while groups.len() > m {
        let mut assignment = vec![0u32; n];
        for (g, nodes) in groups.iter().enumerate() {
            for &v in nodes {
                assignment[v as usize] = g as u32;
            }
        }
        let gains = merge_gains(&mut walker, &batch, &assignment);
        let active: Vec<u32> = (0..groups.len() as u32).collect();
        let (keep, fold) = best_merge(&gains, &active);
        let folded = groups.remove(fold as usize);
        groups[keep as usize].extend(folded);
        groups[keep as usize].sort_unstable();
    }

    // Too few: bisect the largest group at random until there are m.
    while groups.len() < m {
        let (largest, _) = groups
            .iter()
            .enumerate()
            .max_by_key(|(idx, g)| (g.len(), std::cmp::Reverse(*idx)))
            .expect("at least one group");
        if groups[largest].len() < 2 {
            break;
        }
        let mut nodes = std::mem::take(&mut groups[largest]);
        nodes.shuffle(rng);
        let half = nodes.len() / 2;
        let mut left = nodes[..half].to_vec();
        let mut right = nodes[half..].to_vec();
        left.sort_unstable();
        right.sort_unstable();
        groups[largest] = left;
        groups.push(right);
    }

    groups.sort_by_key(|g| g.first().copied().unwrap_or(u32::MAX));
    let mut assignment = vec![0u32; n];
    for (id, nodes) in groups.iter().enumerate() {
        for &v in nodes {
            assignment[v as usize] = id as u32;
        }
    }
    CommunityPartition::new(m, assignment)
}
