//! Gauss–Hermite velocity grids for the standard Gaussian measure.
//!
//! Nodes and weights integrate against `exp(-v²/2)/√(2π)` in 1D and the
//! product measure in 2D, so `Σ_j w_j = 1` and the quadrature average
//! `⟨g⟩ = Σ_j w_j g(v_j)` approximates the Gaussian expectation of `g`.

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

/// Errors raised while building a velocity grid.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadratureError {
    #[error("velocity grid needs at least one node per axis")]
    Empty,
}

/// Discrete symmetric velocity space with quadrature weights.
///
/// In 2D the nodes form a tensor product ordered as `j = jx * J + jy`,
/// so the mirror of node `j` is always node `len() - 1 - j`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    dim: usize,
    per_axis: usize,
    vx: Vec<f64>,
    vy: Vec<f64>,
    weights: Vec<f64>,
}

impl VelocityGrid {
    /// Spatial dimension (1 or 2).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of nodes per velocity axis.
    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    /// Total number of velocity nodes.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    /// Always false: grids hold at least one node.
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// First velocity component of every node.
    pub fn vx(&self) -> &[f64] {
        &self.vx
    }

    /// Second velocity component of every node (all zero in 1D).
    pub fn vy(&self) -> &[f64] {
        &self.vy
    }

    /// Quadrature weights, positive and summing to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Velocity vector of node `j`; the second entry is zero in 1D.
    pub fn node(&self, j: usize) -> [f64; 2] {
        [self.vx[j], self.vy[j]]
    }

    /// Index of the mirrored node `-v_j`.
    pub fn mirror(&self, j: usize) -> usize {
        self.len() - 1 - j
    }

    /// Quadrature average `⟨g⟩ = Σ_j w_j g(v_j)`.
    pub fn average<F: Fn([f64; 2]) -> f64>(&self, g: F) -> f64 {
        (0..self.len()).map(|j| self.weights[j] * g(self.node(j))).sum()
    }
}

/// Gauss–Hermite grid with `j` nodes for the 1D standard Gaussian measure.
///
/// Nodes are eigenvalues of the Jacobi matrix of the probabilists' Hermite
/// polynomials; weights use the Christoffel formula. The result is then
/// mirrored so that `v_j = -v_{J-1-j}` and paired weights agree bit for bit.
pub fn gauss_hermite_1d(j: usize) -> Result<VelocityGrid, QuadratureError> {
    let (nodes, weights) = hermite_rule(j)?;
    Ok(VelocityGrid {
        dim: 1,
        per_axis: j,
        vy: vec![0.0; j],
        vx: nodes,
        weights,
    })
}

/// Tensor-product Gauss–Hermite grid with `j_per_axis²` nodes in 2D.
pub fn gauss_hermite_2d(j_per_axis: usize) -> Result<VelocityGrid, QuadratureError> {
    let (nodes, weights) = hermite_rule(j_per_axis)?;
    let n = j_per_axis * j_per_axis;
    let mut vx = Vec::with_capacity(n);
    let mut vy = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for a in 0..j_per_axis {
        for b in 0..j_per_axis {
            vx.push(nodes[a]);
            vy.push(nodes[b]);
            w.push(weights[a] * weights[b]);
        }
    }
    Ok(VelocityGrid {
        dim: 2,
        per_axis: j_per_axis,
        vx,
        vy,
        weights: w,
    })
}

fn hermite_rule(j: usize) -> Result<(Vec<f64>, Vec<f64>), QuadratureError> {
    if j == 0 {
        return Err(QuadratureError::Empty);
    }
    let jacobi = DMatrix::from_fn(j, j, |r, c| {
        if r + 1 == c || c + 1 == r {
            (r.max(c) as f64).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    let mut weights: Vec<f64> = nodes.iter().map(|&v| christoffel_weight(v, j)).collect();

    for a in 0..j / 2 {
        let b = j - 1 - a;
        let v = 0.5 * (nodes[b] - nodes[a]);
        let w = 0.5 * (weights[a] + weights[b]);
        nodes[a] = -v;
        nodes[b] = v;
        weights[a] = w;
        weights[b] = w;
    }
    if j % 2 == 1 {
        nodes[j / 2] = 0.0;
    }

    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    for a in 0..j / 2 {
        weights[j - 1 - a] = weights[a];
    }
    Ok((nodes, weights))
}

/// `1 / Σ_{n<j} p_n(v)²` with `p_n` the orthonormal Hermite polynomials.
fn christoffel_weight(v: f64, j: usize) -> f64 {
    let mut p_prev = 0.0;
    let mut p = 1.0;
    let mut sum = 1.0;
    for n in 1..j {
        let next = (v * p - ((n - 1) as f64).sqrt() * p_prev) / (n as f64).sqrt();
        p_prev = p;
        p = next;
        sum += p * p;
    }
    1.0 / sum
}
