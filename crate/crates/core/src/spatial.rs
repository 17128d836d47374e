//! Periodic finite-difference discretizations of the transport term `v·∇ₓf`.
//!
//! Every scheme is written in conservative form: the derivative in cell `i`
//! is a difference of interface values reconstructed from the upwind side,
//! `v (F_{i+1/2} - F_{i-1/2}) / Δx`. Linear upwind schemes of order 1–3 and
//! WENO reconstructions built from 2-point (`Weno2`, third order on smooth
//! data) and 3-point (`Weno3`, fifth order) candidate stencils are provided.

use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Smoothness-indicator regularization of the WENO weights.
pub const WENO_EPSILON: f64 = 1e-6;

/// Half width of the widest stencil; stencils hold `2 * HALO + 1` values.
pub const HALO: usize = 3;

/// Errors raised by grid construction and scheme selection.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpatialError {
    #[error("spatial dimension must be 1 or 2, got {0}")]
    Dimension(usize),
    #[error("grid needs at least one cell per axis")]
    NoCells,
    #[error("spacing {dx} does not divide the unit interval (1/dx = {ratio})")]
    Spacing { dx: f64, ratio: f64 },
    #[error("unknown spatial scheme '{0}' (expected upwind1, upwind2, upwind3, weno2 or weno3)")]
    UnknownScheme(String),
    #[error("scheme {0} is nonlinear and has no Fourier symbol")]
    Nonlinear(SchemeId),
}

/// Uniform periodic grid on the unit interval or unit square.
///
/// Cells are indexed with `x` fastest: `c = iy * I + ix`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceGrid {
    dim: usize,
    cells: usize,
    dx: f64,
}

impl SpaceGrid {
    /// Grid with `cells` cells per axis, so `Δx = 1 / cells`.
    pub fn new(dim: usize, cells: usize) -> Result<Self, SpatialError> {
        if dim != 1 && dim != 2 {
            return Err(SpatialError::Dimension(dim));
        }
        if cells == 0 {
            return Err(SpatialError::NoCells);
        }
        Ok(Self {
            dim,
            cells,
            dx: 1.0 / cells as f64,
        })
    }

    /// Grid with spacing `dx`, which must satisfy `I·Δx = 1` for an integer `I`.
    pub fn from_spacing(dim: usize, dx: f64) -> Result<Self, SpatialError> {
        let ratio = 1.0 / dx;
        if !ratio.is_finite() || ratio < 0.5 || (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(SpatialError::Spacing { dx, ratio });
        }
        Self::new(dim, ratio.round() as usize)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of cells along each axis.
    pub fn cells_per_axis(&self) -> usize {
        self.cells
    }

    /// Total number of cells.
    pub fn num_cells(&self) -> usize {
        self.cells.pow(self.dim as u32)
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Volume of one cell, `Δx^D`.
    pub fn cell_volume(&self) -> f64 {
        self.dx.powi(self.dim as i32)
    }

    /// Cell center `((ix + 1/2)Δx, (iy + 1/2)Δx)`; the second entry is zero in 1D.
    pub fn center(&self, c: usize) -> [f64; 2] {
        let ix = c % self.cells;
        let x = (ix as f64 + 0.5) * self.dx;
        if self.dim == 1 {
            [x, 0.0]
        } else {
            let iy = c / self.cells;
            [x, (iy as f64 + 0.5) * self.dx]
        }
    }

    /// Cell indices `c - 3 .. c + 3` along `axis` with periodic wrap.
    pub fn stencil(&self, c: usize, axis: usize) -> [usize; 2 * HALO + 1] {
        let n = self.cells as isize;
        let (ix, iy) = ((c % self.cells) as isize, (c / self.cells) as isize);
        let mut out = [0; 2 * HALO + 1];
        for (k, slot) in out.iter_mut().enumerate() {
            let off = k as isize - HALO as isize;
            let (x, y) = if axis == 0 {
                ((ix + off).rem_euclid(n), iy)
            } else {
                (ix, (iy + off).rem_euclid(n))
            };
            *slot = (y * n + x) as usize;
        }
        out
    }

    /// Fourier angle `ζ_i = 2π i Δx` of mode `i`.
    pub fn zeta(&self, i: usize) -> f64 {
        2.0 * std::f64::consts::PI * i as f64 * self.dx
    }
}

/// Spatial discretization of the transport term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SchemeId {
    Upwind1,
    Upwind2,
    Upwind3,
    Weno2,
    Weno3,
}

/// Scheme family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeFamily {
    Upwind,
    Weno,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [
        SchemeId::Upwind1,
        SchemeId::Upwind2,
        SchemeId::Upwind3,
        SchemeId::Weno2,
        SchemeId::Weno3,
    ];

    pub fn family(self) -> SchemeFamily {
        match self {
            SchemeId::Upwind1 | SchemeId::Upwind2 | SchemeId::Upwind3 => SchemeFamily::Upwind,
            SchemeId::Weno2 | SchemeId::Weno3 => SchemeFamily::Weno,
        }
    }

    /// Order index in the scheme name (`upwind2` → 2, `weno3` → 3).
    pub fn order(self) -> usize {
        match self {
            SchemeId::Upwind1 => 1,
            SchemeId::Upwind2 | SchemeId::Weno2 => 2,
            SchemeId::Upwind3 | SchemeId::Weno3 => 3,
        }
    }

    pub fn is_linear(self) -> bool {
        self.family() == SchemeFamily::Upwind
    }

    /// Linear scheme used for Fourier analysis: the scheme itself, or the
    /// upwind scheme of equal order index for WENO.
    pub fn spectral_proxy(self) -> SchemeId {
        match self {
            SchemeId::Weno2 => SchemeId::Upwind2,
            SchemeId::Weno3 => SchemeId::Upwind3,
            s => s,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SchemeId::Upwind1 => "upwind1",
            SchemeId::Upwind2 => "upwind2",
            SchemeId::Upwind3 => "upwind3",
            SchemeId::Weno2 => "weno2",
            SchemeId::Weno3 => "weno3",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = SpatialError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name() == key)
            .ok_or_else(|| SpatialError::UnknownScheme(s.to_string()))
    }
}

impl TryFrom<String> for SchemeId {
    type Error = SpatialError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<SchemeId> for String {
    fn from(s: SchemeId) -> String {
        s.to_string()
    }
}

/// Interface value `F_{i+1/2}` reconstructed from the left, given `[f_{i-2}, …, f_{i+2}]`.
#[inline(always)]
pub fn reconstruct(scheme: SchemeId, s: &[f64; 5]) -> f64 {
    let [a, b, c, d, e] = *s;
    match scheme {
        SchemeId::Upwind1 => c,
        SchemeId::Upwind2 => 0.5 * (3.0 * c - b),
        SchemeId::Upwind3 => (-b + 5.0 * c + 2.0 * d) / 6.0,
        SchemeId::Weno2 => {
            let w = weno2_weights(b, c, d);
            w[0] * 0.5 * (3.0 * c - b) + w[1] * 0.5 * (c + d)
        }
        SchemeId::Weno3 => {
            let w = weno3_weights(a, b, c, d, e);
            w[0] * (2.0 * a - 7.0 * b + 11.0 * c) / 6.0
                + w[1] * (-b + 5.0 * c + 2.0 * d) / 6.0
                + w[2] * (2.0 * c + 5.0 * d - e) / 6.0
        }
    }
}

/// Nonlinear weights of the 2-point candidate stencils `{f_{i-1}, f_i}` and `{f_i, f_{i+1}}`.
#[inline(always)]
pub fn weno2_weights(b: f64, c: f64, d: f64) -> [f64; 2] {
    let beta0 = (c - b) * (c - b);
    let beta1 = (d - c) * (d - c);
    let a0 = (1.0 / 3.0) / ((WENO_EPSILON + beta0) * (WENO_EPSILON + beta0));
    let a1 = (2.0 / 3.0) / ((WENO_EPSILON + beta1) * (WENO_EPSILON + beta1));
    let s = a0 + a1;
    [a0 / s, a1 / s]
}

/// Nonlinear weights of the three 3-point candidate stencils of the 5-point reconstruction.
#[inline(always)]
pub fn weno3_weights(a: f64, b: f64, c: f64, d: f64, e: f64) -> [f64; 3] {
    const K: f64 = 13.0 / 12.0;
    let beta0 = K * (a - 2.0 * b + c).powi(2) + 0.25 * (a - 4.0 * b + 3.0 * c).powi(2);
    let beta1 = K * (b - 2.0 * c + d).powi(2) + 0.25 * (b - d).powi(2);
    let beta2 = K * (c - 2.0 * d + e).powi(2) + 0.25 * (3.0 * c - 4.0 * d + e).powi(2);
    let a0 = 0.1 / (WENO_EPSILON + beta0).powi(2);
    let a1 = 0.6 / (WENO_EPSILON + beta1).powi(2);
    let a2 = 0.3 / (WENO_EPSILON + beta2).powi(2);
    let s = a0 + a1 + a2;
    [a0 / s, a1 / s, a2 / s]
}

/// `F_{i+1/2} - F_{i-1/2}` for a stencil `[f_{i-3}, …, f_{i+3}]` ordered along the wind.
#[inline(always)]
pub fn face_difference(scheme: SchemeId, s: &[f64; 2 * HALO + 1]) -> f64 {
    let right = [s[1], s[2], s[3], s[4], s[5]];
    let left = [s[0], s[1], s[2], s[3], s[4]];
    reconstruct(scheme, &right) - reconstruct(scheme, &left)
}

/// Discrete `v ∂f/∂x` along one axis at the center of the stencil `[f_{i-3}, …, f_{i+3}]`.
#[inline(always)]
pub fn axis_derivative(scheme: SchemeId, v: f64, s: &[f64; 2 * HALO + 1], dx: f64) -> f64 {
    if v > 0.0 {
        v * face_difference(scheme, s) / dx
    } else if v < 0.0 {
        let mut r = *s;
        r.reverse();
        -v * face_difference(scheme, &r) / dx
    } else {
        0.0
    }
}

/// Discrete `v·∇ₓf` of a scalar cell field for one velocity node.
pub fn convective_derivative(field: &[f64], v: [f64; 2], scheme: SchemeId, grid: &SpaceGrid) -> Vec<f64> {
    (0..grid.num_cells())
        .map(|c| {
            let mut out = 0.0;
            for (axis, &va) in v.iter().enumerate().take(grid.dim()) {
                let s = grid.stencil(c, axis).map(|k| field[k]);
                out += axis_derivative(scheme, va, &s, grid.dx());
            }
            out
        })
        .collect()
}

/// Coefficients of `F_{i+1/2} - F_{i-1/2}` over the 7-point stencil for a linear scheme.
fn face_difference_coefficients(scheme: SchemeId) -> Result<[f64; 2 * HALO + 1], SpatialError> {
    if !scheme.is_linear() {
        return Err(SpatialError::Nonlinear(scheme));
    }
    let mut coeff = [0.0; 2 * HALO + 1];
    for (k, slot) in coeff.iter_mut().enumerate() {
        let mut e = [0.0; 2 * HALO + 1];
        e[k] = 1.0;
        *slot = face_difference(scheme, &e);
    }
    Ok(coeff)
}

/// Fourier symbol `α + iβ` of the discretized `-v ∂ₓ` along one axis at angle `ζ`.
pub fn axis_symbol(scheme: SchemeId, v: f64, zeta: f64, dx: f64) -> Result<Complex64, SpatialError> {
    let coeff = face_difference_coefficients(scheme)?;
    if v == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let dir = v.signum();
    let sum: Complex64 = coeff
        .iter()
        .enumerate()
        .map(|(k, &a)| a * Complex64::from_polar(1.0, dir * zeta * (k as f64 - HALO as f64)))
        .sum();
    Ok(-v.abs() / dx * sum)
}

/// Fourier symbol `D_j` of `-v·∇ₓ` for velocity `v` and mode angles `zeta = (ζ_x, ζ_y)`.
///
/// In 2D the per-axis symbols are summed.
pub fn fourier_symbol(
    scheme: SchemeId,
    v: [f64; 2],
    zeta: [f64; 2],
    grid: &SpaceGrid,
) -> Result<Complex64, SpatialError> {
    let mut d = axis_symbol(scheme, v[0], zeta[0], grid.dx())?;
    if grid.dim() == 2 {
        d += axis_symbol(scheme, v[1], zeta[1], grid.dx())?;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn grid_construction() {
        let g = SpaceGrid::from_spacing(1, 0.01).unwrap();
        assert_eq!(g.cells_per_axis(), 100);
        assert_eq!(g.num_cells(), 100);
        let g2 = SpaceGrid::from_spacing(2, 0.02).unwrap();
        assert_eq!(g2.num_cells(), 2500);
        assert!(SpaceGrid::from_spacing(1, 0.03).is_err());
        assert!(SpaceGrid::new(3, 4).is_err());
        assert!(SpaceGrid::new(1, 0).is_err());
        assert_eq!(g2.center(51), [0.03, 0.03]);
    }

    #[test]
    fn stencil_wraps() {
        let g = SpaceGrid::new(2, 4).unwrap();
        assert_eq!(g.stencil(0, 0), [1, 2, 3, 0, 1, 2, 3]);
        assert_eq!(g.stencil(0, 1), [4, 8, 12, 0, 4, 8, 12]);
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in SchemeId::ALL {
            assert_eq!(s.to_string().parse::<SchemeId>().unwrap(), s);
        }
        assert_eq!("WENO-3".parse::<SchemeId>().unwrap(), SchemeId::Weno3);
        assert!("central".parse::<SchemeId>().is_err());
    }

    #[test]
    fn constants_and_zero_velocity_give_zero() {
        let g = SpaceGrid::new(1, 20).unwrap();
        let field: Vec<f64> = (0..20).map(|i| (i as f64 * 0.7).sin()).collect();
        for s in SchemeId::ALL {
            let d = convective_derivative(&[2.5; 20], [1.3, 0.0], s, &g);
            assert!(d.iter().all(|x| x.abs() < 1e-12));
            let d = convective_derivative(&field, [0.0, 0.0], s, &g);
            assert!(d.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn upwind1_symbol_at_pi() {
        let d = axis_symbol(SchemeId::Upwind1, 1.0, PI, 0.01).unwrap();
        assert_abs_diff_eq!(d.re, -200.0, epsilon = 1e-10);
        assert_abs_diff_eq!(d.im, 0.0, epsilon = 1e-10);
        let z = axis_symbol(SchemeId::Upwind1, 0.7, 0.0, 0.01).unwrap();
        assert_eq!(z.norm(), 0.0);
    }

    #[test]
    fn symbol_is_multiplier_of_plane_wave() {
        let g = SpaceGrid::new(1, 32).unwrap();
        for s in [SchemeId::Upwind1, SchemeId::Upwind2, SchemeId::Upwind3] {
            for &v in &[1.7, -0.4] {
                for i in [1, 5, 16, 31] {
                    let zeta = g.zeta(i);
                    let re: Vec<f64> = (0..32).map(|m| (zeta * m as f64).cos()).collect();
                    let im: Vec<f64> = (0..32).map(|m| (zeta * m as f64).sin()).collect();
                    let dre = convective_derivative(&re, [v, 0.0], s, &g);
                    let dim = convective_derivative(&im, [v, 0.0], s, &g);
                    let sym = axis_symbol(s, v, zeta, g.dx()).unwrap();
                    for m in 0..32 {
                        let wave = Complex64::from_polar(1.0, zeta * m as f64);
                        let expect = -sym * wave;
                        assert_abs_diff_eq!(dre[m], expect.re, epsilon = 1e-10);
                        assert_abs_diff_eq!(dim[m], expect.im, epsilon = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn symbol_conjugate_pairing_and_nonlinear_rejection() {
        for s in [SchemeId::Upwind1, SchemeId::Upwind2, SchemeId::Upwind3] {
            for k in 0..20 {
                let zeta = 0.3 * k as f64;
                let a = axis_symbol(s, 1.3, zeta, 0.05).unwrap();
                let b = axis_symbol(s, -1.3, zeta, 0.05).unwrap();
                assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-10);
                assert_abs_diff_eq!(a.im, -b.im, epsilon = 1e-10);
            }
        }
        assert!(axis_symbol(SchemeId::Weno2, 1.0, 0.1, 0.1).is_err());
    }

    fn linf_error(cells: usize, s: SchemeId) -> f64 {
        let g = SpaceGrid::new(1, cells).unwrap();
        let f: Vec<f64> = (0..cells).map(|c| (2.0 * PI * g.center(c)[0]).sin()).collect();
        let d = convective_derivative(&f, [1.0, 0.0], s, &g);
        (0..cells)
            .map(|c| (d[c] - 2.0 * PI * (2.0 * PI * g.center(c)[0]).cos()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn upwind_orders_on_smooth_data() {
        for (s, order) in [
            (SchemeId::Upwind1, 1.0),
            (SchemeId::Upwind2, 2.0),
            (SchemeId::Upwind3, 3.0),
        ] {
            let e: Vec<f64> = [50, 100, 200].iter().map(|&n| linf_error(n, s)).collect();
            for w in e.windows(2) {
                let rate = (w[0] / w[1]).log2();
                assert!(rate > order - 0.1, "{s}: rate {rate}");
            }
        }
    }

    #[test]
    fn weno_weights_are_convex() {
        let samples = [
            [0.0, 1.0, 0.0, 1.0, 0.0],
            [1.0, 1.0, 1.0, 0.1, 0.1],
            [0.3, -2.0, 5.0, 1e-9, 7.0],
        ];
        for s in samples {
            let w = weno3_weights(s[0], s[1], s[2], s[3], s[4]);
            assert!(w.iter().all(|&x| x >= 0.0));
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            let w = weno2_weights(s[1], s[2], s[3]);
            assert!(w.iter().all(|&x| x >= 0.0));
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_dimensional_sums_axes() {
        let g = SpaceGrid::new(2, 16).unwrap();
        let f: Vec<f64> = (0..256)
            .map(|c| {
                let [x, y] = g.center(c);
                (2.0 * PI * x).sin() + (2.0 * PI * y).cos()
            })
            .collect();
        let both = convective_derivative(&f, [0.5, -1.5], SchemeId::Upwind2, &g);
        let x = convective_derivative(&f, [0.5, 0.0], SchemeId::Upwind2, &g);
        let y = convective_derivative(&f, [0.0, -1.5], SchemeId::Upwind2, &g);
        for c in 0..256 {
            assert_abs_diff_eq!(both[c], x[c] + y[c], epsilon = 1e-12);
        }
    }
}
