//! Block-aligned type grids with per-block trapezoid quadrature.
//!
//! Grids never straddle block boundaries: each block carries its own nodes
//! including both endpoints, so an interior breakpoint appears twice — once
//! as the right endpoint of the left block and once as the left endpoint of
//! the right block. The duplicate lets fields that jump across blocks store
//! both one-sided values, and kernel evaluation at a left endpoint is nudged
//! one ulp into the (left-open) block it belongs to.

use crate::numeric::{block_of, linspace};

#[derive(Debug, Clone, PartialEq)]
pub struct TypeGrid {
    /// Node coordinates, ascending, with duplicates at interior breakpoints.
    coords: Vec<f64>,
    /// Coordinates to use when evaluating a kernel at each node.
    eval_coords: Vec<f64>,
    /// Block id of each node.
    blocks: Vec<usize>,
    /// Per-block trapezoid weights; sums to 1 over the whole grid.
    weights: Vec<f64>,
    /// Full partition 0 = b_0 < ... < b_m = 1.
    partition: Vec<f64>,
    /// Node index range of each block.
    block_ranges: Vec<std::ops::Range<usize>>,
}

impl TypeGrid {
    /// Builds a grid with roughly `k` nodes in total, apportioned to blocks
    /// by length (at least two nodes per block), uniform within each block.
    pub fn new(partition: &[f64], k: usize) -> TypeGrid {
        assert!(partition.len() >= 2);
        let m = partition.len() - 1;
        let nodes_per_block: Vec<usize> = (0..m)
            .map(|j| {
                let len = partition[j + 1] - partition[j];
                ((k as f64 * len).round() as usize).max(2)
            })
            .collect();
        let block_nodes: Vec<Vec<f64>> = (0..m)
            .map(|j| linspace(partition[j], partition[j + 1], nodes_per_block[j]))
            .collect();
        Self::from_block_nodes(partition, block_nodes)
    }

    /// Builds a grid from explicit per-block node lists (each sorted and
    /// containing its block's endpoints). Weights are general trapezoid
    /// weights, valid for non-uniform spacing.
    pub fn from_block_nodes(partition: &[f64], block_nodes: Vec<Vec<f64>>) -> TypeGrid {
        assert_eq!(block_nodes.len(), partition.len() - 1);
        let mut coords = Vec::new();
        let mut eval_coords = Vec::new();
        let mut blocks = Vec::new();
        let mut weights = Vec::new();
        let mut block_ranges = Vec::new();
        for (j, nodes) in block_nodes.iter().enumerate() {
            assert!(nodes.len() >= 2, "each block needs at least two nodes");
            let start = coords.len();
            for (i, &c) in nodes.iter().enumerate() {
                coords.push(c);
                // Left endpoint of a non-first block lies in the previous
                // (half-open) block; evaluate kernels one ulp inside.
                let ec = if j > 0 && i == 0 { c.next_up() } else { c };
                eval_coords.push(ec);
                blocks.push(j);
                let w = if i == 0 {
                    (nodes[1] - nodes[0]) / 2.0
                } else if i == nodes.len() - 1 {
                    (nodes[i] - nodes[i - 1]) / 2.0
                } else {
                    (nodes[i + 1] - nodes[i - 1]) / 2.0
                };
                weights.push(w);
            }
            block_ranges.push(start..coords.len());
        }
        TypeGrid {
            coords,
            eval_coords,
            blocks,
            weights,
            partition: partition.to_vec(),
            block_ranges,
        }
    }

    /// Uniform grid with `intervals` cells split at the given breakpoints
    /// (duplicating any breakpoint that is not already a multiple of
    /// `1/intervals`). Used for reference solves that must contain specific
    /// query coordinates exactly.
    pub fn uniform_with_breaks(partition: &[f64], intervals: usize) -> TypeGrid {
        assert!(intervals >= 1);
        let base: Vec<f64> = (0..=intervals).map(|i| i as f64 / intervals as f64).collect();
        let m = partition.len() - 1;
        let block_nodes: Vec<Vec<f64>> = (0..m)
            .map(|j| {
                let (lo, hi) = (partition[j], partition[j + 1]);
                let mut nodes: Vec<f64> = base
                    .iter()
                    .copied()
                    .filter(|c| *c > lo && *c < hi)
                    .collect();
                nodes.insert(0, lo);
                nodes.push(hi);
                nodes
            })
            .collect();
        Self::from_block_nodes(partition, block_nodes)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn eval_coords(&self) -> &[f64] {
        &self.eval_coords
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn partition(&self) -> &[f64] {
        &self.partition
    }

    pub fn block_of_node(&self, node: usize) -> usize {
        self.blocks[node]
    }

    pub fn block_range(&self, block: usize) -> std::ops::Range<usize> {
        self.block_ranges[block].clone()
    }

    pub fn n_blocks(&self) -> usize {
        self.block_ranges.len()
    }

    /// Quadrature `∫ f(u) du` over the grid.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len());
        let terms: Vec<f64> = values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .collect();
        crate::numeric::pairwise_sum(&terms)
    }

    /// Index of the node nearest to `u`. When the nearest coordinate is a
    /// duplicated breakpoint, the duplicate lying in the block that owns `u`
    /// (half-open convention) is returned.
    pub fn nearest(&self, u: f64) -> usize {
        let i = self.coords.partition_point(|c| *c < u);
        let mut best = if i < self.coords.len() { i } else { self.coords.len() - 1 };
        if i > 0 && (u - self.coords[i - 1]).abs() <= (self.coords[best] - u).abs() {
            best = i - 1;
        }
        // Resolve duplicate-coordinate runs toward the block owning u.
        let mut lo = best;
        while lo > 0 && self.coords[lo - 1] == self.coords[best] {
            lo -= 1;
        }
        let mut hi = best;
        while hi + 1 < self.coords.len() && self.coords[hi + 1] == self.coords[best] {
            hi += 1;
        }
        if lo != hi {
            let owner = block_of(&self.partition, u);
            for j in lo..=hi {
                if self.blocks[j] == owner {
                    return j;
                }
            }
            return lo;
        }
        best
    }

    /// The (block, node cell) bracketing `u` for within-block interpolation:
    /// returns node indices `(lo, hi)` with `coords[lo] <= u <= coords[hi]`
    /// inside the owning block.
    pub fn bracket(&self, u: f64) -> (usize, usize) {
        let b = block_of(&self.partition, u);
        let range = self.block_range(b);
        let nodes = &self.coords[range.clone()];
        let k = nodes.partition_point(|c| *c < u).min(nodes.len() - 1);
        let hi = range.start + k.max(1).min(nodes.len() - 1);
        (hi - 1, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trivial_partition_grid() {
        let g = TypeGrid::new(&[0.0, 1.0], 5);
        assert_eq!(g.len(), 5);
        assert_eq!(g.coords(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_abs_diff_eq!(g.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        let ones = vec![1.0; 5];
        assert_abs_diff_eq!(g.integrate(&ones), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn block_grid_duplicates_breakpoints() {
        let g = TypeGrid::new(&[0.0, 0.5, 1.0], 8);
        let dup: Vec<usize> = (0..g.len()).filter(|&i| g.coords()[i] == 0.5).collect();
        assert_eq!(dup.len(), 2);
        assert_eq!(g.block_of_node(dup[0]), 0);
        assert_eq!(g.block_of_node(dup[1]), 1);
        // The right block's duplicate evaluates one ulp inside.
        assert_eq!(g.eval_coords()[dup[0]], 0.5);
        assert!(g.eval_coords()[dup[1]] > 0.5);
        assert_abs_diff_eq!(g.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn nearest_prefers_owning_block() {
        let g = TypeGrid::new(&[0.0, 0.5, 1.0], 8);
        let i = g.nearest(0.5);
        assert_eq!(g.coords()[i], 0.5);
        assert_eq!(g.block_of_node(i), 0);
        // Just past the breakpoint the right duplicate wins.
        let j = g.nearest(0.52);
        assert_eq!(g.coords()[j], 0.5);
        assert_eq!(g.block_of_node(j), 1);
    }

    #[test]
    fn uniform_with_breaks_contains_queries() {
        let g = TypeGrid::uniform_with_breaks(&[0.0, 1.0], 32);
        for n in [4usize, 8, 16, 32] {
            for i in 1..=n {
                let u = i as f64 / n as f64;
                let j = g.nearest(u);
                assert_eq!(g.coords()[j], u, "query {u} not a node");
            }
        }
    }

    #[test]
    fn integrate_affine_exactly() {
        let g = TypeGrid::new(&[0.0, 0.3, 1.0], 16);
        let vals: Vec<f64> = g.coords().iter().map(|u| 2.0 * u - 0.5).collect();
        assert_abs_diff_eq!(g.integrate(&vals), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn bracket_stays_in_block() {
        let g = TypeGrid::new(&[0.0, 0.5, 1.0], 8);
        let (lo, hi) = g.bracket(0.51);
        assert_eq!(g.block_of_node(lo), 1);
        assert_eq!(g.block_of_node(hi), 1);
        assert!(g.coords()[lo] <= 0.51 && 0.51 <= g.coords()[hi]);
        let (lo, hi) = g.bracket(0.5);
        assert_eq!(g.block_of_node(lo), 0);
        assert_eq!(g.block_of_node(hi), 0);
    }
}
