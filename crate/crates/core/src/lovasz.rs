//! The relaxation layer: fractional assignments, their sorted prefix order,
//! and the extension value/gradient of the partition objective.
//!
//! For a point `x` over the ground set `M x V`, sort the entries descending
//! (ties by ascending community then node). With sorted values
//! `v_1 >= ... >= v_N` and prefixes `S_k` of the sorted order, the extension
//! is `sum_k (v_k - v_{k+1}) f(S_k) + v_N f(S_N)`, and its partial derivative
//! at an entry equals the marginal gain of appending that entry to its
//! predecessor prefix.

use crate::error::{Error, Result};
use crate::influence::GroundSetElement;
use crate::objective::ObjectiveOracle;

/// Fractional assignment `x_ij in [0,1]`, community-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentVector {
    m: usize,
    n: usize,
    values: Vec<f64>,
}

impl AssignmentVector {
    pub fn zeros(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            values: vec![0.0; m * n],
        }
    }

    pub fn from_values(m: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != m * n {
            return Err(Error::Validation(format!(
                "expected {} entries, got {}",
                m * n,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Validation(format!("entry {bad} outside [0, 1]")));
        }
        Ok(Self { m, n, values })
    }

    /// Characteristic vector of a ground subset.
    pub fn characteristic(m: usize, n: usize, subset: &[GroundSetElement]) -> Self {
        let mut x = Self::zeros(m, n);
        for e in subset {
            x.set(e.community as usize, e.node as usize, 1.0);
        }
        x
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn get(&self, community: usize, node: usize) -> f64 {
        self.values[community * self.n + node]
    }

    pub fn set(&mut self, community: usize, node: usize, value: f64) {
        debug_assert!((0.0..=1.0).contains(&value));
        self.values[community * self.n + node] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column_sum(&self, node: usize) -> f64 {
        (0..self.m).map(|c| self.get(c, node)).sum()
    }

    /// Matroid polytope membership: every entry in `[0,1]` and every node's
    /// column sums to at most 1 within `tol`.
    pub fn in_polytope(&self, tol: f64) -> bool {
        (0..self.n).all(|j| self.column_sum(j) <= 1.0 + tol)
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        Self::from_values(self.m, self.n, self.values.iter().map(|v| v * factor).collect())
    }
}

/// Gradient (or any weight vector) over the ground set.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientVector {
    m: usize,
    n: usize,
    values: Vec<f64>,
}

impl GradientVector {
    pub fn new(m: usize, n: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), m * n);
        Self { m, n, values }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn get(&self, community: usize, node: usize) -> f64 {
        self.values[community * self.n + node]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Inner product with an assignment; with the gradient of `x` itself this
    /// telescopes back to the extension value.
    pub fn dot(&self, x: &AssignmentVector) -> f64 {
        self.values
            .iter()
            .zip(x.values())
            .map(|(w, v)| w * v)
            .sum()
    }

    /// Entrywise `max(0, .)`; estimator noise must not leak negative weights
    /// into the base selection.
    pub fn clamped_nonnegative(&self) -> GradientVector {
        GradientVector::new(
            self.m,
            self.n,
            self.values.iter().map(|v| v.max(0.0)).collect(),
        )
    }
}

/// Ground-set permutation ordered by descending assignment value with the
/// deterministic tie rule (ascending community, then node).
#[derive(Debug, Clone)]
pub struct SortedPrefix {
    order: Vec<GroundSetElement>,
    values: Vec<f64>,
}

impl SortedPrefix {
    /// Elements from largest to smallest assignment value.
    pub fn order(&self) -> &[GroundSetElement] {
        &self.order
    }

    /// Assignment values aligned with `order`, non-increasing.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Sort an assignment into its prefix order.
pub fn sort_assignment(x: &AssignmentVector) -> SortedPrefix {
    let (m, n) = x.dims();
    let mut order: Vec<GroundSetElement> = Vec::with_capacity(m * n);
    for c in 0..m as u32 {
        for j in 0..n as u32 {
            order.push(GroundSetElement::new(c, j));
        }
    }
    order.sort_by(|a, b| {
        let va = x.get(a.community as usize, a.node as usize);
        let vb = x.get(b.community as usize, b.node as usize);
        vb.partial_cmp(&va)
            .expect("assignment values are finite")
            .then(a.community.cmp(&b.community))
            .then(a.node.cmp(&b.node))
    });
    let values = order
        .iter()
        .map(|e| x.get(e.community as usize, e.node as usize))
        .collect();
    SortedPrefix { order, values }
}

/// Extension value at `x`: the prefix-weighted sum over the sorted order,
/// equal to the level-set integral over the breakpoints of `x`.
pub fn lovasz_value(x: &AssignmentVector, oracle: &mut dyn ObjectiveOracle) -> Result<f64> {
    let sp = sort_assignment(x);
    let n = sp.len();
    let mut total = 0.0;
    for k in 0..n {
        let weight = if k + 1 < n {
            sp.values()[k] - sp.values()[k + 1]
        } else {
            sp.values()[k]
        };
        if weight > 0.0 {
            total += weight * oracle.evaluate(&sp.order()[..=k])?;
        }
    }
    Ok(total)
}

/// Extension gradient at `x`: the component of entry `e` is the marginal gain
/// of appending `e` to its predecessor prefix in the sorted order. Monotone
/// objectives make every component nonnegative up to oracle noise.
pub fn lovasz_gradient(
    x: &AssignmentVector,
    oracle: &mut dyn ObjectiveOracle,
) -> Result<GradientVector> {
    let (m, n) = x.dims();
    let sp = sort_assignment(x);
    let marginals = oracle.prefix_marginals(sp.order())?;
    let mut values = vec![0.0; m * n];
    for (e, w) in sp.order().iter().zip(marginals) {
        values[e.community as usize * n + e.node as usize] = w;
    }
    Ok(GradientVector::new(m, n, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{load_edge_list, Directedness};
    use crate::objective::ExactObjective;
    use std::io::Cursor;

    fn graph(text: &str) -> crate::graph::DirectedGraph {
        load_edge_list(Cursor::new(text), Directedness::Directed).unwrap()
    }

    #[test]
    fn sorting_is_descending_with_lexicographic_ties() {
        let x = AssignmentVector::from_values(2, 2, vec![0.9, 0.5, 0.1, 0.5]).unwrap();
        let sp = sort_assignment(&x);
        let got: Vec<(u32, u32)> = sp.order().iter().map(|e| (e.community, e.node)).collect();
        // 0.9 first, then the two 0.5 ties in (community, node) order, then 0.1.
        assert_eq!(got, vec![(0, 0), (0, 1), (1, 1), (1, 0)]);
    }

    #[test]
    fn all_equal_sorts_lexicographically() {
        let x = AssignmentVector::from_values(2, 2, vec![0.3; 4]).unwrap();
        let sp = sort_assignment(&x);
        let got: Vec<(u32, u32)> = sp.order().iter().map(|e| (e.community, e.node)).collect();
        assert_eq!(got, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn single_nonzero_entry_comes_first() {
        let x = AssignmentVector::from_values(2, 2, vec![0.0, 0.0, 0.0, 0.7]).unwrap();
        let sp = sort_assignment(&x);
        assert_eq!(sp.order()[0], GroundSetElement::new(1, 1));
    }

    #[test]
    fn characteristic_vectors_recover_set_values() {
        let g = graph("0 1 0.5\n1 2 0.5\n");
        let mut oracle = ExactObjective::new(&g, 2);
        let subset = vec![
            GroundSetElement::new(0, 0),
            GroundSetElement::new(0, 1),
            GroundSetElement::new(1, 2),
        ];
        let x = AssignmentVector::characteristic(2, 3, &subset);
        let value = lovasz_value(&x, &mut oracle).unwrap();
        let direct = oracle.evaluate(&subset).unwrap();
        assert!((value - direct).abs() < 1e-12);
    }

    #[test]
    fn zero_point_scores_zero() {
        let g = graph("0 1 0.5\n");
        let mut oracle = ExactObjective::new(&g, 2);
        let x = AssignmentVector::zeros(2, 2);
        assert_eq!(lovasz_value(&x, &mut oracle).unwrap(), 0.0);
    }

    #[test]
    fn positive_homogeneity_on_characteristic_rays() {
        let g = graph("0 1 0.5\n1 0 0.5\n");
        let mut oracle = ExactObjective::new(&g, 2);
        let subset = vec![GroundSetElement::new(0, 0), GroundSetElement::new(0, 1)];
        let x = AssignmentVector::characteristic(2, 2, &subset);
        let full = lovasz_value(&x, &mut oracle).unwrap();
        for &c in &[0.25, 0.5, 0.75, 1.0] {
            let scaled = x.scale(c).unwrap();
            let v = lovasz_value(&scaled, &mut oracle).unwrap();
            assert!((v - c * full).abs() < 1e-12, "c={c}");
        }
    }

    #[test]
    fn euler_identity_gradient_dot_x_equals_value() {
        let g = graph("0 1 0.4\n1 2 0.3\n2 0 0.5\n");
        let mut oracle = ExactObjective::new(&g, 2);
        let x = AssignmentVector::from_values(
            2,
            3,
            vec![0.9, 0.2, 0.6, 0.1, 0.8, 0.3],
        )
        .unwrap();
        let value = lovasz_value(&x, &mut oracle).unwrap();
        let grad = lovasz_gradient(&x, &mut oracle).unwrap();
        assert!((grad.dot(&x) - value).abs() < 1e-9);
    }

    #[test]
    fn single_element_ground_set_gradient() {
        let g = graph("0 1 1.0\n");
        // One community, restrict attention to entry (0, 0) by keeping the
        // other coordinate at zero; any positive value yields the same
        // first-prefix marginal.
        let mut oracle = ExactObjective::new(&g, 1);
        for &t in &[0.2, 0.7, 1.0] {
            let x = AssignmentVector::from_values(1, 2, vec![t, 0.0]).unwrap();
            let grad = lovasz_gradient(&x, &mut oracle).unwrap();
            assert_eq!(grad.get(0, 0), 0.0);
        }
    }

    #[test]
    fn gradient_matches_finite_differences_away_from_ties() {
        let g = graph("0 1 0.4\n1 2 0.3\n2 0 0.5\n");
        let mut oracle = ExactObjective::new(&g, 2);
        let x = AssignmentVector::from_values(
            2,
            3,
            vec![0.91, 0.23, 0.57, 0.12, 0.78, 0.34],
        )
        .unwrap();
        let grad = lovasz_gradient(&x, &mut oracle).unwrap();
        let h = 1e-5;
        for c in 0..2 {
            for j in 0..3 {
                let mut plus = x.clone();
                plus.set(c, j, x.get(c, j) + h);
                let mut minus = x.clone();
                minus.set(c, j, x.get(c, j) - h);
                let fd = (lovasz_value(&plus, &mut oracle).unwrap()
                    - lovasz_value(&minus, &mut oracle).unwrap())
                    / (2.0 * h);
                assert!(
                    (fd - grad.get(c, j)).abs() < 1e-6,
                    "entry ({c},{j}): fd {fd} vs grad {}",
                    grad.get(c, j)
                );
            }
        }
    }
}
