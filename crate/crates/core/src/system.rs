//! Semi-discrete BGK system `D_t f = -D_{x,v} f + (ν/ε)(M(ρ) - f)`.
//!
//! The state is stored space-major: the `J` velocity values of cell `c`
//! occupy `values[c*J .. (c+1)*J]`.

use crate::maxwellian::equilibrium_shape;
use crate::quadrature::VelocityGrid;
use crate::spatial::{reconstruct, SchemeId, SpaceGrid, HALO};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while building or evaluating a system.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error("epsilon must be positive and finite, got {0}")]
    Epsilon(f64),
    #[error("collision frequency levels must be positive and finite, got {0}")]
    Level(f64),
    #[error("profile needs {expected} breakpoints for {levels} levels, got {got}")]
    Breakpoints { levels: usize, expected: usize, got: usize },
    #[error("profile breakpoints must increase strictly inside (0, 1)")]
    BreakpointOrder,
    #[error("velocity grid dimension {velocity} differs from space dimension {space}")]
    Dimension { space: usize, velocity: usize },
    #[error("state has {got} values, expected {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("nonfinite value in cell {cell}")]
    Nonfinite { cell: usize },
}

/// Distribution values on the (space × velocity) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    cells: usize,
    nodes: usize,
    values: Vec<f64>,
}

impl StateField {
    /// Wraps `values`, which must hold `cells * nodes` entries.
    ///
    /// # Panics
    /// Panics when the length does not match.
    pub fn from_values(cells: usize, nodes: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), cells * nodes, "state length mismatch");
        Self { cells, nodes, values }
    }

    pub fn zeros(cells: usize, nodes: usize) -> Self {
        Self::from_values(cells, nodes, vec![0.0; cells * nodes])
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Velocity block of cell `c`.
    pub fn cell(&self, c: usize) -> &[f64] {
        &self.values[c * self.nodes..(c + 1) * self.nodes]
    }

    /// Density `ρ = ⟨f⟩` in every cell.
    pub fn density(&self, grid: &VelocityGrid) -> Vec<f64> {
        density(&self.values, grid.weights())
    }
}

/// Density `⟨f⟩` of every cell of a space-major state.
pub fn density(values: &[f64], weights: &[f64]) -> Vec<f64> {
    values
        .chunks(weights.len())
        .map(|b| b.iter().zip(weights).map(|(f, w)| f * w).sum())
        .collect()
}

/// Piecewise-constant collision frequency `ω(x)` over the first coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseProfile {
    /// Interior breakpoints, strictly increasing inside (0, 1).
    pub breakpoints: Vec<f64>,
    /// One level per interval; `levels.len() == breakpoints.len() + 1`.
    pub levels: Vec<f64>,
}

impl PiecewiseProfile {
    /// Profile with equal-width intervals, one per level in the given order.
    pub fn uniform(levels: Vec<f64>) -> Self {
        let n = levels.len();
        let breakpoints = (1..n).map(|k| k as f64 / n as f64).collect();
        Self { breakpoints, levels }
    }

    /// Level active at coordinate `x ∈ [0, 1)`.
    pub fn value(&self, x: f64) -> f64 {
        let k = self.breakpoints.iter().take_while(|&&b| x >= b).count();
        self.levels[k]
    }

    fn validate(&self) -> Result<(), SystemError> {
        if self.levels.is_empty() || self.breakpoints.len() + 1 != self.levels.len() {
            return Err(SystemError::Breakpoints {
                levels: self.levels.len(),
                expected: self.levels.len().saturating_sub(1),
                got: self.breakpoints.len(),
            });
        }
        for &l in &self.levels {
            if !(l > 0.0 && l.is_finite()) {
                return Err(SystemError::Level(l));
            }
        }
        let mut prev = 0.0;
        for &b in &self.breakpoints {
            if !(b > prev && b < 1.0) {
                return Err(SystemError::BreakpointOrder);
            }
            prev = b;
        }
        Ok(())
    }
}

/// How the collision frequency `ν` is determined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CollisionKind {
    /// `ν = ν̄` everywhere.
    Constant(f64),
    /// `ν = ω(x)`, piecewise constant in space.
    Profile(PiecewiseProfile),
    /// `ν = ρ(x, t)`, the instantaneous density.
    Density,
}

/// Collision frequency model together with the scale parameter `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionModel {
    pub kind: CollisionKind,
    pub epsilon: f64,
}

impl CollisionModel {
    pub fn new(kind: CollisionKind, epsilon: f64) -> Result<Self, SystemError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(SystemError::Epsilon(epsilon));
        }
        match &kind {
            CollisionKind::Constant(v) if !(*v > 0.0 && v.is_finite()) => return Err(SystemError::Level(*v)),
            CollisionKind::Profile(p) => p.validate()?,
            _ => {}
        }
        Ok(Self { kind, epsilon })
    }

    /// Distinct levels of a constant or profile model, largest first.
    /// Empty for the density model.
    pub fn levels(&self) -> Vec<f64> {
        let mut out = match &self.kind {
            CollisionKind::Constant(v) => vec![*v],
            CollisionKind::Profile(p) => p.levels.clone(),
            CollisionKind::Density => Vec::new(),
        };
        out.sort_by(|a, b| b.total_cmp(a));
        out.dedup();
        out
    }
}

/// A semi-discrete ODE system `dy/dt = F(y)` that the integrators can advance.
pub trait SemiDiscrete: Sync {
    /// Length of the state vector.
    fn len(&self) -> usize;

    /// True when the state is empty.
    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Evaluates `F(y)` into `out`.
    fn rhs(&self, t: f64, y: &[f64], out: &mut [f64]) -> Result<(), SystemError>;

    /// Mass, density bounds and sup norm of a state.
    fn observe(&self, y: &[f64]) -> Observables {
        let (lo, hi) = y
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        Observables {
            mass: y.iter().sum(),
            min_density: lo,
            max_density: hi,
            sup_norm: y.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }
}

/// Summary quantities recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observables {
    pub mass: f64,
    pub min_density: f64,
    pub max_density: f64,
    pub sup_norm: f64,
}

/// The discretized kinetic equation on a periodic grid.
#[derive(Debug, Clone)]
pub struct KineticSystem {
    space: SpaceGrid,
    velocity: VelocityGrid,
    model: CollisionModel,
    scheme: SchemeId,
    shape: Vec<f64>,
    nu: Vec<f64>,
    stencils: Vec<[[usize; 2 * HALO + 1]; 2]>,
}

impl KineticSystem {
    pub fn new(
        space: SpaceGrid,
        velocity: VelocityGrid,
        model: CollisionModel,
        scheme: SchemeId,
    ) -> Result<Self, SystemError> {
        if space.dim() != velocity.dim() {
            return Err(SystemError::Dimension {
                space: space.dim(),
                velocity: velocity.dim(),
            });
        }
        let cells = space.num_cells();
        let nu = match &model.kind {
            CollisionKind::Constant(v) => vec![*v; cells],
            CollisionKind::Profile(p) => (0..cells).map(|c| p.value(space.center(c)[0])).collect(),
            CollisionKind::Density => Vec::new(),
        };
        let stencils = (0..cells)
            .map(|c| {
                let x = space.stencil(c, 0).map(|k| k * velocity.len());
                let y = if space.dim() == 2 {
                    space.stencil(c, 1).map(|k| k * velocity.len())
                } else {
                    x
                };
                [x, y]
            })
            .collect();
        Ok(Self {
            shape: equilibrium_shape(&velocity),
            space,
            velocity,
            model,
            scheme,
            nu,
            stencils,
        })
    }

    pub fn space(&self) -> &SpaceGrid {
        &self.space
    }

    pub fn velocity(&self) -> &VelocityGrid {
        &self.velocity
    }

    pub fn model(&self) -> &CollisionModel {
        &self.model
    }

    pub fn scheme(&self) -> SchemeId {
        self.scheme
    }

    /// Density in every cell of a state vector.
    pub fn density(&self, y: &[f64]) -> Vec<f64> {
        density(y, self.velocity.weights())
    }

    /// Collision frequency in every cell for the given densities.
    pub fn collision_frequency(&self, rho: &[f64]) -> Vec<f64> {
        match self.model.kind {
            CollisionKind::Density => rho.to_vec(),
            _ => self.nu.clone(),
        }
    }

    fn check(&self, y: &[f64]) -> Result<(), SystemError> {
        let expected = self.space.num_cells() * self.velocity.len();
        if y.len() != expected {
            return Err(SystemError::StateLength { expected, got: y.len() });
        }
        if let Some(k) = y.iter().position(|v| !v.is_finite()) {
            return Err(SystemError::Nonfinite {
                cell: k / self.velocity.len(),
            });
        }
        Ok(())
    }

    /// Transport part `D_{x,v} f` only.
    pub fn transport(&self, y: &[f64], out: &mut [f64]) -> Result<(), SystemError> {
        self.check(y)?;
        let nj = self.velocity.len();
        out.par_chunks_mut(nj).enumerate().for_each(|(c, block)| {
            block.fill(0.0);
            self.transport_cell(y, c, block);
        });
        Ok(())
    }

    /// Adds `D_{x,v} f` of cell `c` to `out`.
    fn transport_cell(&self, y: &[f64], c: usize, out: &mut [f64]) {
        match self.scheme {
            SchemeId::Upwind1 => self.transport_cell_with(y, c, out, |s| reconstruct(SchemeId::Upwind1, s)),
            SchemeId::Upwind2 => self.transport_cell_with(y, c, out, |s| reconstruct(SchemeId::Upwind2, s)),
            SchemeId::Upwind3 => self.transport_cell_with(y, c, out, |s| reconstruct(SchemeId::Upwind3, s)),
            SchemeId::Weno2 => self.transport_cell_with(y, c, out, |s| reconstruct(SchemeId::Weno2, s)),
            SchemeId::Weno3 => self.transport_cell_with(y, c, out, |s| reconstruct(SchemeId::Weno3, s)),
        }
    }

    #[inline(always)]
    fn transport_cell_with(&self, y: &[f64], c: usize, out: &mut [f64], rec: impl Fn(&[f64; 5]) -> f64) {
        let nj = self.velocity.len();
        let dx = self.space.dx();
        for axis in 0..self.space.dim() {
            let rows: [&[f64]; 2 * HALO + 1] = self.stencils[c][axis].map(|o| &y[o..o + nj]);
            let vel = if axis == 0 {
                self.velocity.vx()
            } else {
                self.velocity.vy()
            };
            for (j, (o, &v)) in out.iter_mut().zip(vel).enumerate() {
                if v > 0.0 {
                    let s = [
                        rows[0][j], rows[1][j], rows[2][j], rows[3][j], rows[4][j], rows[5][j], rows[6][j],
                    ];
                    let fd = rec(&[s[1], s[2], s[3], s[4], s[5]]) - rec(&[s[0], s[1], s[2], s[3], s[4]]);
                    *o += v * fd / dx;
                } else if v < 0.0 {
                    let s = [
                        rows[6][j], rows[5][j], rows[4][j], rows[3][j], rows[2][j], rows[1][j], rows[0][j],
                    ];
                    let fd = rec(&[s[1], s[2], s[3], s[4], s[5]]) - rec(&[s[0], s[1], s[2], s[3], s[4]]);
                    *o += -v * fd / dx;
                }
            }
        }
    }
}

impl SemiDiscrete for KineticSystem {
    fn len(&self) -> usize {
        self.space.num_cells() * self.velocity.len()
    }

    fn rhs(&self, _t: f64, y: &[f64], out: &mut [f64]) -> Result<(), SystemError> {
        self.check(y)?;
        let nj = self.velocity.len();
        let w = self.velocity.weights();
        let inv_eps = 1.0 / self.model.epsilon;
        let density_model = matches!(self.model.kind, CollisionKind::Density);
        out.par_chunks_mut(nj).enumerate().for_each(|(c, block)| {
            let f = &y[c * nj..(c + 1) * nj];
            let rho: f64 = f.iter().zip(w).map(|(f, w)| f * w).sum();
            let nu = if density_model { rho } else { self.nu[c] };
            let rate = nu * inv_eps;
            block.fill(0.0);
            self.transport_cell(y, c, block);
            for ((o, &fj), &shape) in block.iter_mut().zip(f).zip(&self.shape) {
                *o = rate * (rho * shape - fj) - *o;
            }
        });
        Ok(())
    }

    fn observe(&self, y: &[f64]) -> Observables {
        let rho = self.density(y);
        let (lo, hi) = rho
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        Observables {
            mass: rho.iter().sum::<f64>() * self.space.cell_volume(),
            min_density: lo,
            max_density: hi,
            sup_norm: y.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }
}
