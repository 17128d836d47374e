//! Equilibrium distributions and velocity moments.
//!
//! Distribution values are stored as densities against the Gaussian
//! quadrature measure, so the linearized Maxwellian at node `v_j` is simply
//! `ρ(1 + v_j)` in 1D and `ρ(1 + v^x_j)(1 + v^y_j)` in 2D.

use crate::quadrature::VelocityGrid;
use crate::system::StateField;

/// Densities below this value are treated as vacuum when dividing by `ρ`.
pub const RHO_FLOOR: f64 = 1e-14;

/// Velocity moments of a distribution at one spatial point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    /// Density `⟨f⟩`.
    pub rho: f64,
    /// Mean velocity `⟨v f⟩ / ρ`; zero where `ρ` is below [`RHO_FLOOR`].
    pub vbar: [f64; 2],
    /// Temperature `⟨|v - vbar|² f⟩ / (D ρ)`; zero where `ρ` is below [`RHO_FLOOR`].
    pub temperature: f64,
    /// Set when `ρ` is below the floor and `vbar`, `temperature` were not computed.
    pub vacuum: bool,
}

/// Per-cell moments plus the cells whose density is negative.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub moments: Vec<MomentSet>,
    pub negative_cells: Vec<usize>,
}

/// Node-wise factor of the linearized Maxwellian: `1 + v` or `(1 + v^x)(1 + v^y)`.
pub fn equilibrium_shape(grid: &VelocityGrid) -> Vec<f64> {
    (0..grid.len())
        .map(|j| {
            let [vx, vy] = grid.node(j);
            if grid.dim() == 1 {
                1.0 + vx
            } else {
                (1.0 + vx) * (1.0 + vy)
            }
        })
        .collect()
}

/// Linearized Maxwellian field for the given cell densities.
pub fn linearized_maxwellian(rho: &[f64], grid: &VelocityGrid) -> StateField {
    let shape = equilibrium_shape(grid);
    let mut values = Vec::with_capacity(rho.len() * shape.len());
    for &r in rho {
        values.extend(shape.iter().map(|&s| r * s));
    }
    StateField::from_values(rho.len(), shape.len(), values)
}

/// Density, mean velocity and temperature in every cell of `f`.
pub fn moments(f: &StateField, grid: &VelocityGrid) -> MomentReport {
    let d = grid.dim() as f64;
    let w = grid.weights();
    let mut out = Vec::with_capacity(f.cells());
    let mut negative = Vec::new();
    for (c, block) in f.values().chunks(f.nodes()).enumerate() {
        let rho: f64 = block.iter().zip(w).map(|(f, w)| w * f).sum();
        if rho < 0.0 {
            negative.push(c);
        }
        if rho.abs() < RHO_FLOOR {
            out.push(MomentSet {
                rho,
                vbar: [0.0; 2],
                temperature: 0.0,
                vacuum: true,
            });
            continue;
        }
        let mut flux = [0.0; 2];
        for (j, fv) in block.iter().enumerate() {
            let v = grid.node(j);
            flux[0] += w[j] * v[0] * fv;
            flux[1] += w[j] * v[1] * fv;
        }
        let vbar = [flux[0] / rho, flux[1] / rho];
        let mut energy = 0.0;
        for (j, fv) in block.iter().enumerate() {
            let v = grid.node(j);
            let dv = (v[0] - vbar[0]).powi(2) + (v[1] - vbar[1]).powi(2);
            energy += w[j] * dv * fv;
        }
        out.push(MomentSet {
            rho,
            vbar,
            temperature: energy / (d * rho),
            vacuum: false,
        });
    }
    MomentReport {
        moments: out,
        negative_cells: negative,
    }
}

/// Full Maxwellian `ρ (2πT)^{-D/2} exp(-|v - vbar|² / (2T))` against Lebesgue measure.
///
/// This is an evaluation helper; the integrators relax toward the
/// linearized Maxwellian only.
pub fn maxwellian(m: &MomentSet, v: [f64; 2], dim: usize) -> f64 {
    let d2 = (0..dim).map(|k| (v[k] - m.vbar[k]).powi(2)).sum::<f64>();
    let norm = (2.0 * std::f64::consts::PI * m.temperature).powf(dim as f64 / 2.0);
    m.rho / norm * (-d2 / (2.0 * m.temperature)).exp()
}
