//! Uniform triangulations of the unit square.

use crate::error::{Error, Result};

pub const MIN_LEVEL: u32 = 2;
pub const MAX_LEVEL: u32 = 7;

/// Uniform mesh of `(0,1)²` with `h = 2⁻ᵏ`. Nodes are numbered
/// lexicographically (`x` fastest); each cell is split along a diagonal whose
/// direction alternates in a checkerboard pattern.
#[derive(Clone, Debug)]
pub struct Mesh {
    level: u32,
    nodes: Vec<[f64; 2]>,
    elements: Vec<[usize; 3]>,
    boundary_edges: Vec<[usize; 2]>,
}

impl Mesh {
    pub fn new(level: u32) -> Result<Self> {
        if !(MIN_LEVEL..=MAX_LEVEL).contains(&level) {
            return Err(Error::InvalidArgument(format!(
                "mesh level must lie in {MIN_LEVEL}..={MAX_LEVEL}, got {level}"
            )));
        }
        let n = 1usize << level;
        let h = 1.0 / n as f64;
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut nodes = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                nodes.push([i as f64 * h, j as f64 * h]);
            }
        }
        let mut elements = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (v00, v10, v01, v11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
                if (i + j) % 2 == 0 {
                    elements.push([v00, v10, v11]);
                    elements.push([v00, v11, v01]);
                } else {
                    elements.push([v00, v10, v01]);
                    elements.push([v10, v11, v01]);
                }
            }
        }
        let mut boundary_edges = Vec::with_capacity(4 * n);
        for i in 0..n {
            boundary_edges.push([id(i, 0), id(i + 1, 0)]);
            boundary_edges.push([id(n, i), id(n, i + 1)]);
            boundary_edges.push([id(i + 1, n), id(i, n)]);
            boundary_edges.push([id(0, i + 1), id(0, i)]);
        }
        Ok(Mesh { level, nodes, elements, boundary_edges })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn h(&self) -> f64 {
        1.0 / (1u64 << self.level) as f64
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn elements(&self) -> &[[usize; 3]] {
        &self.elements
    }

    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }

    /// Sorted indices of nodes on `∂Ω`.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut b: Vec<usize> = self.boundary_edges.iter().flatten().copied().collect();
        b.sort_unstable();
        b.dedup();
        b
    }

    /// Signed area of element `e` (positive for counter-clockwise vertices).
    pub fn element_area(&self, e: usize) -> f64 {
        let [a, b, c] = self.elements[e].map(|v| self.nodes[v]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Nodal interpolation of `f`.
    pub fn interpolate(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|[x, y]| f(*x, *y)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        for (k, nodes) in [(4, 289), (5, 1089), (6, 4225)] {
            let m = Mesh::new(k).unwrap();
            assert_eq!(m.num_nodes(), nodes);
            assert_eq!(m.elements().len(), 2 * 4usize.pow(k));
            assert_eq!(m.boundary_nodes().len(), 4 * (1 << k));
        }
        assert!(Mesh::new(1).is_err() && Mesh::new(8).is_err());
    }

    #[test]
    fn areas_are_positive_and_equal() {
        let m = Mesh::new(3).unwrap();
        let target = m.h() * m.h() / 2.0;
        for e in 0..m.elements().len() {
            assert!((m.element_area(e) - target).abs() < 1e-15);
        }
    }
}
