//! Fourier analysis of the semi-discrete system.
//!
//! For a single collision level `ω̄` and Fourier mode `ζ` the system reduces
//! to the `J×J` matrix `B = (ω̄/ε)(MP - I) + D`, where `M = diag(1 + v)`
//! (the linearized Maxwellian factor), `P` has every row equal to the weight
//! vector and `D` holds the transport symbols. Spatially varying collision
//! frequencies are handled level by level; each level contributes its own
//! block spectrum.

use crate::maxwellian::equilibrium_shape;
use crate::quadrature::VelocityGrid;
use crate::spatial::{fourier_symbol, SchemeId, SpaceGrid, SpatialError};
use crate::system::{CollisionKind, CollisionModel, KineticSystem, SemiDiscrete, SystemError};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Errors raised by spectrum computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("matrix must be square: {len} entries do not form an n×n matrix")]
    NotSquare { len: usize },
    #[error("matrix contains nonfinite entries")]
    Nonfinite,
    #[error("QR iteration did not converge within {cap} iterations ({found} of {n} eigenvalues found)")]
    NoConvergence { cap: usize, found: usize, n: usize },
    #[error(transparent)]
    Spatial(#[from] SpatialError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("density model needs an initial density field with one value per cell")]
    MissingDensity,
    #[error("operator of size {0} is too large for the dense cross-check (limit 4000)")]
    TooLarge(usize),
    #[error("{count} eigenvalues lie in the right half-plane (largest real part {max_re:e})")]
    RightHalfPlane { count: usize, max_re: f64 },
}

/// Eigenvalues of a dense complex matrix stored row-major.
///
/// Uses Householder reduction to upper Hessenberg form followed by
/// single-shift QR iteration with Wilkinson shifts and deflation.
/// The iteration budget is `100·n` QR sweeps in total.
pub fn eig_dense(a: &[Complex64]) -> Result<Vec<Complex64>, SpectrumError> {
    let n = (a.len() as f64).sqrt().round() as usize;
    if n * n != a.len() {
        return Err(SpectrumError::NotSquare { len: a.len() });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SpectrumError::Nonfinite);
    }
    let mut h = a.to_vec();
    hessenberg(&mut h, n);
    hessenberg_qr(&mut h, n)
}

fn hessenberg(h: &mut [Complex64], n: usize) {
    let at = |r: usize, c: usize| r * n + c;
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let norm = (0..len).map(|i| h[at(k + 1 + i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[at(k + 1, k)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        for i in 0..len {
            v[i] = h[at(k + 1 + i, k)];
        }
        v[0] -= alpha;
        let vnorm2: f64 = (0..len).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let scale = 2.0 / vnorm2;
        for c in k..n {
            let s: Complex64 = (0..len).map(|i| v[i].conj() * h[at(k + 1 + i, c)]).sum();
            let s = s * scale;
            for i in 0..len {
                h[at(k + 1 + i, c)] -= v[i] * s;
            }
        }
        for r in 0..n {
            let s: Complex64 = (0..len).map(|i| h[at(r, k + 1 + i)] * v[i]).sum();
            let s = s * scale;
            for i in 0..len {
                h[at(r, k + 1 + i)] -= s * v[i].conj();
            }
        }
        for i in 1..len {
            h[at(k + 1 + i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

fn hessenberg_qr(h: &mut [Complex64], n: usize) -> Result<Vec<Complex64>, SpectrumError> {
    let at = |r: usize, c: usize| r * n + c;
    let zero = Complex64::new(0.0, 0.0);
    let mut eig = vec![zero; n];
    if n == 0 {
        return Ok(eig);
    }
    let norm = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tiny = f64::MIN_POSITIVE / f64::EPSILON;
    let cap = 100 * n;
    let mut total = 0;
    let mut since_deflation = 0;
    let mut hi = n - 1;
    let mut rot = vec![(zero, zero); n];
    let mut found = 0;
    loop {
        if hi == 0 {
            eig[0] = h[at(0, 0)];
            return Ok(eig);
        }
        let mut l = hi;
        while l > 0 {
            let sub = h[at(l, l - 1)].norm();
            let diag = h[at(l - 1, l - 1)].norm() + h[at(l, l)].norm();
            let reference = if diag > 0.0 { diag } else { norm };
            if sub <= f64::EPSILON * reference || sub <= tiny {
                h[at(l, l - 1)] = zero;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[at(hi, hi)];
            found += 1;
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > cap {
            return Err(SpectrumError::NoConvergence { cap, found, n });
        }

        let a = h[at(hi - 1, hi - 1)];
        let b = h[at(hi - 1, hi)];
        let c = h[at(hi, hi - 1)];
        let d = h[at(hi, hi)];
        let mu = if since_deflation % 11 == 10 {
            d + Complex64::new(0.75 * c.norm(), 0.5 * c.norm())
        } else {
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let m1 = (a + d) * 0.5 + disc;
            let m2 = (a + d) * 0.5 - disc;
            if (m1 - d).norm() < (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };

        for k in l..=hi {
            h[at(k, k)] -= mu;
        }
        for k in l..hi {
            let x = h[at(k, k)];
            let y = h[at(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 {
                (Complex64::new(1.0, 0.0), zero)
            } else {
                (x / r, y / r)
            };
            rot[k] = (cs, sn);
            for j in k..=hi {
                let t1 = h[at(k, j)];
                let t2 = h[at(k + 1, j)];
                h[at(k, j)] = cs.conj() * t1 + sn.conj() * t2;
                h[at(k + 1, j)] = -sn * t1 + cs * t2;
            }
        }
        for k in l..hi {
            let (cs, sn) = rot[k];
            for i in l..=(k + 1).min(hi) {
                let t1 = h[at(i, k)];
                let t2 = h[at(i, k + 1)];
                h[at(i, k)] = t1 * cs + t2 * sn;
                h[at(i, k + 1)] = -t1 * sn.conj() + t2 * cs.conj();
            }
        }
        for k in l..=hi {
            h[at(k, k)] += mu;
        }
    }
}

/// The Fourier matrix `B` of one mode and collision level.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolMatrix {
    /// Matrix size `J`.
    pub n: usize,
    /// Row-major entries of `B`.
    pub b: Vec<Complex64>,
    /// Transport symbols `D_j = α_j + iβ_j`.
    pub d: Vec<Complex64>,
    pub omega: f64,
    pub epsilon: f64,
}

/// Transport symbols of every velocity node for mode angles `zeta`.
pub fn node_symbols(
    scheme: SchemeId,
    zeta: [f64; 2],
    sgrid: &SpaceGrid,
    vgrid: &VelocityGrid,
) -> Result<Vec<Complex64>, SpatialError> {
    (0..vgrid.len())
        .map(|j| fourier_symbol(scheme, vgrid.node(j), zeta, sgrid))
        .collect()
}

/// Assembles `B = (ω̄/ε)(MP - I) + D` for one mode. Rejects nonlinear schemes.
pub fn build_symbol(
    omega: f64,
    epsilon: f64,
    zeta: [f64; 2],
    scheme: SchemeId,
    sgrid: &SpaceGrid,
    vgrid: &VelocityGrid,
) -> Result<SymbolMatrix, SpectrumError> {
    let d = node_symbols(scheme, zeta, sgrid, vgrid)?;
    Ok(assemble(omega, epsilon, d, &equilibrium_shape(vgrid), vgrid.weights()))
}

fn assemble(omega: f64, epsilon: f64, d: Vec<Complex64>, shape: &[f64], w: &[f64]) -> SymbolMatrix {
    let n = d.len();
    let rate = omega / epsilon;
    let mut b = vec![Complex64::new(0.0, 0.0); n * n];
    for r in 0..n {
        for c in 0..n {
            let delta = if r == c { 1.0 } else { 0.0 };
            b[r * n + c] = Complex64::new(rate * (shape[r] * w[c] - delta), 0.0);
        }
        b[r * n + r] += d[r];
    }
    SymbolMatrix {
        n,
        b,
        d,
        omega,
        epsilon,
    }
}

/// Second-order expansion of the dominant eigenvalue of `B` in `ε/ω̄`:
/// `λ₀ + (⟨s D²⟩ - λ₀²) ε/ω̄` with `λ₀ = ⟨s D⟩` and `s` the equilibrium shape.
///
/// In 1D this is `⟨α⟩ + (⟨α²⟩ - ⟨α⟩² - ⟨β²⟩ + ⟨βv⟩²) ε/ω̄` for the real part and
/// `⟨βv⟩ + 2(⟨αβv⟩ - ⟨α⟩⟨βv⟩) ε/ω̄` for the imaginary part.
pub fn dominant_expansion(
    omega: f64,
    epsilon: f64,
    zeta: [f64; 2],
    scheme: SchemeId,
    sgrid: &SpaceGrid,
    vgrid: &VelocityGrid,
) -> Result<Complex64, SpectrumError> {
    let d = node_symbols(scheme, zeta, sgrid, vgrid)?;
    let shape = equilibrium_shape(vgrid);
    let w = vgrid.weights();
    let lambda0 = dominant_limit(&d, &shape, w);
    let second: Complex64 = d.iter().zip(&shape).zip(w).map(|((d, s), w)| d * d * (s * w)).sum();
    Ok(lambda0 + (second - lambda0 * lambda0) * (epsilon / omega))
}

/// Limit `ε/ω̄ → 0` of the dominant eigenvalue: `⟨(1+v) D⟩`, which equals `⟨α⟩ + i⟨βv⟩` in 1D.
pub fn dominant_limit(d: &[Complex64], shape: &[f64], w: &[f64]) -> Complex64 {
    d.iter().zip(shape).zip(w).map(|((d, s), w)| d * (s * w)).sum()
}

/// Collision level of a spectrum sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelInfo {
    /// Collision frequency `ω̄` of the level.
    pub omega: f64,
    /// Disk center `-ω̄/ε`.
    pub center: f64,
    /// Largest distance of the level's non-dominant eigenvalues from the center.
    pub radius: f64,
}

/// One eigenvalue with its provenance in the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEigenvalue {
    /// Linear mode index (`0`-based; in 2D `iy_mode * I + ix_mode`).
    pub mode: usize,
    pub level: usize,
    pub value: Complex64,
    /// Rightmost eigenvalue of its (mode, level) block.
    pub dominant: bool,
    /// Index into [`SpectrumReport::clusters`].
    pub cluster: usize,
}

/// Fast (collisional) or slow (hydrodynamic) eigenvalue group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterKind {
    Fast,
    Slow,
}

/// Group of eigenvalues separated from its neighbours by a spectral gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    /// Real center: `-ω̄_max/ε` of the member levels for fast clusters, 0 for the slow cluster.
    pub center: f64,
    /// Largest distance of a member eigenvalue from the center.
    pub radius: f64,
    pub count: usize,
    /// Indices into [`SpectrumReport::levels`] whose fast eigenvalues belong here.
    pub levels: Vec<usize>,
    pub kind: ClusterKind,
}

/// Eigenvalues, clusters and disk bounds of a full mode sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub epsilon: f64,
    pub dx: f64,
    /// Linear scheme whose symbols were used.
    pub scheme: SchemeId,
    /// True when levels come from a density field and form a near-continuum.
    pub continuous: bool,
    /// Levels sorted by decreasing `ω̄`.
    pub levels: Vec<LevelInfo>,
    pub eigenvalues: Vec<ModeEigenvalue>,
    /// `R_f = max |D_j|` over all modes and nodes.
    pub fast_radius: f64,
    /// Dominant eigenvalue per mode for the fastest level.
    pub dominant: Vec<Complex64>,
    /// `ε → 0` limit of the dominant eigenvalue per mode.
    pub dominant_limit: Vec<Complex64>,
    /// Clusters sorted by center, most negative first; the slow cluster is last.
    pub clusters: Vec<Cluster>,
    /// `center_k / center_{k+1}` for consecutive clusters; the slow cluster uses its largest |Re λ|.
    pub gap_ratios: Vec<f64>,
}

impl SpectrumReport {
    /// Fast clusters, most negative first.
    pub fn fast_clusters(&self) -> impl Iterator<Item = &Cluster> {
        self.clusters.iter().filter(|c| c.kind == ClusterKind::Fast)
    }

    /// The slow cluster.
    pub fn slow_cluster(&self) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.kind == ClusterKind::Slow)
    }

    /// Non-dominant eigenvalues outside every disk `D(-ω̄_l/ε, R_f(1 + rel_tol))`.
    pub fn containment_violations(&self, rel_tol: f64) -> Vec<ModeEigenvalue> {
        let r = self.fast_radius * (1.0 + rel_tol);
        self.eigenvalues
            .iter()
            .filter(|e| !e.dominant)
            .filter(|e| {
                !self
                    .levels
                    .iter()
                    .any(|l| (e.value - Complex64::new(l.center, 0.0)).norm() <= r + rel_tol * l.center.abs())
            })
            .copied()
            .collect()
    }

    /// Eigenvalues whose real part exceeds `rel_tol` times the spectral scale.
    pub fn right_half_plane(&self, rel_tol: f64) -> Vec<ModeEigenvalue> {
        let scale = self.eigenvalues.iter().map(|e| e.value.norm()).fold(0.0, f64::max);
        self.eigenvalues
            .iter()
            .filter(|e| e.value.re > rel_tol * scale)
            .copied()
            .collect()
    }

    /// Merges adjacent fast clusters whose inter-cluster extrapolation factor
    /// `center_anchor / center_next - 1` is below `m_min`.
    ///
    /// Fails when eigenvalues lie in the right half-plane beyond a relative
    /// tolerance of 1e-8.
    pub fn merged_clusters(&self, m_min: f64) -> Result<Vec<Cluster>, SpectrumError> {
        let rhp = self.right_half_plane(1e-8);
        if !rhp.is_empty() {
            let max_re = rhp.iter().map(|e| e.value.re).fold(f64::NEG_INFINITY, f64::max);
            return Err(SpectrumError::RightHalfPlane {
                count: rhp.len(),
                max_re,
            });
        }
        let mut out: Vec<Cluster> = Vec::new();
        for c in &self.clusters {
            if c.kind == ClusterKind::Fast {
                if let Some(prev) = out.last_mut() {
                    if prev.kind == ClusterKind::Fast && prev.center / c.center - 1.0 < m_min {
                        let far = (c.center - prev.center).abs() + c.radius;
                        prev.radius = prev.radius.max(far);
                        prev.count += c.count;
                        prev.levels.extend(&c.levels);
                        continue;
                    }
                }
            }
            out.push(c.clone());
        }
        Ok(out)
    }
}

/// Linear mode indices and angles swept by [`full_spectrum`].
pub fn modes(sgrid: &SpaceGrid) -> Vec<(usize, [f64; 2])> {
    let n = sgrid.cells_per_axis();
    if sgrid.dim() == 1 {
        (1..=n).map(|i| (i - 1, [sgrid.zeta(i), 0.0])).collect()
    } else {
        let mut out = Vec::with_capacity(n * n);
        for iy in 1..=n {
            for ix in 1..=n {
                out.push(((iy - 1) * n + ix - 1, [sgrid.zeta(ix), sgrid.zeta(iy)]));
            }
        }
        out
    }
}

/// Sweeps all Fourier modes and collision levels and groups the eigenvalues.
///
/// For the density model every distinct cell value of `rho0` acts as a level.
/// Nonlinear schemes are analysed through their linear upwind proxy.
pub fn full_spectrum(
    model: &CollisionModel,
    scheme: SchemeId,
    sgrid: &SpaceGrid,
    vgrid: &VelocityGrid,
    rho0: Option<&[f64]>,
) -> Result<SpectrumReport, SpectrumError> {
    let scheme = scheme.spectral_proxy();
    let eps = model.epsilon;
    let omegas = match model.kind {
        CollisionKind::Density => {
            let rho = rho0.ok_or(SpectrumError::MissingDensity)?;
            if rho.len() != sgrid.num_cells() {
                return Err(SpectrumError::MissingDensity);
            }
            let mut v: Vec<f64> = rho.to_vec();
            v.sort_by(|a, b| b.total_cmp(a));
            v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(f64::MIN_POSITIVE));
            v
        }
        _ => model.levels(),
    };
    let shape = equilibrium_shape(vgrid);
    let w = vgrid.weights();
    let mode_list = modes(sgrid);

    let per_mode: Vec<(Vec<Complex64>, Vec<Vec<Complex64>>)> = mode_list
        .par_iter()
        .map(|&(_, zeta)| {
            let d = node_symbols(scheme, zeta, sgrid, vgrid)?;
            let eigs = omegas
                .iter()
                .map(|&om| eig_dense(&assemble(om, eps, d.clone(), &shape, w).b))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((d, eigs))
        })
        .collect::<Result<_, SpectrumError>>()?;

    let fast_radius = per_mode
        .iter()
        .flat_map(|(d, _)| d.iter().map(|z| z.norm()))
        .fold(0.0, f64::max);

    let mut eigenvalues = Vec::new();
    let mut dominant = Vec::with_capacity(mode_list.len());
    let mut limit = Vec::with_capacity(mode_list.len());
    for (&(mode, _), (d, eigs)) in mode_list.iter().zip(&per_mode) {
        limit.push(dominant_limit(d, &shape, w));
        for (level, ev) in eigs.iter().enumerate() {
            let k = argmax_re(ev);
            if level == 0 {
                dominant.push(ev[k]);
            }
            for (m, &value) in ev.iter().enumerate() {
                eigenvalues.push(ModeEigenvalue {
                    mode,
                    level,
                    value,
                    dominant: m == k,
                    cluster: 0,
                });
            }
        }
    }

    let mut levels: Vec<LevelInfo> = omegas
        .iter()
        .map(|&omega| LevelInfo {
            omega,
            center: -omega / eps,
            radius: 0.0,
        })
        .collect();
    for e in eigenvalues.iter().filter(|e| !e.dominant) {
        let l = &mut levels[e.level];
        l.radius = l.radius.max((e.value - Complex64::new(l.center, 0.0)).norm());
    }

    let (clusters, gap_ratios) = group_by_gaps(&mut eigenvalues, &levels, fast_radius);

    Ok(SpectrumReport {
        epsilon: eps,
        dx: sgrid.dx(),
        scheme,
        continuous: matches!(model.kind, CollisionKind::Density),
        levels,
        eigenvalues,
        fast_radius,
        dominant,
        dominant_limit: limit,
        clusters,
        gap_ratios,
    })
}

fn argmax_re(ev: &[Complex64]) -> usize {
    let mut k = 0;
    for (m, z) in ev.iter().enumerate() {
        if z.re > ev[k].re {
            k = m;
        }
    }
    k
}

/// Splits eigenvalues at real-part gaps wider than `R_f` and labels the groups.
fn group_by_gaps(eigs: &mut [ModeEigenvalue], levels: &[LevelInfo], fast_radius: f64) -> (Vec<Cluster>, Vec<f64>) {
    if eigs.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let scale = eigs.iter().map(|e| e.value.norm()).fold(0.0, f64::max);
    let threshold = fast_radius.max(1e-8 * scale);
    let mut order: Vec<usize> = (0..eigs.len()).collect();
    order.sort_by(|&a, &b| eigs[a].value.re.total_cmp(&eigs[b].value.re));
    let mut group = vec![0usize; eigs.len()];
    let mut g = 0;
    for w in order.windows(2) {
        if eigs[w[1]].value.re - eigs[w[0]].value.re > threshold {
            g += 1;
        }
        group[w[1]] = g;
    }
    let ngroups = g + 1;

    let mut slow = vec![false; ngroups];
    for (k, e) in eigs.iter().enumerate() {
        if e.dominant {
            slow[group[k]] = true;
        }
    }
    // A level belongs to the group holding most of its fast eigenvalues.
    let mut votes = vec![vec![0usize; ngroups]; levels.len()];
    for (k, e) in eigs.iter().enumerate() {
        if !e.dominant {
            votes[e.level][group[k]] += 1;
        }
    }
    let mut members = vec![Vec::new(); ngroups];
    for (l, v) in votes.iter().enumerate() {
        if let Some((gbest, _)) = v.iter().enumerate().filter(|(_, &n)| n > 0).max_by_key(|(_, &n)| n) {
            members[gbest].push(l);
        }
    }

    // Merge every slow-marked group into the rightmost one so that a single slow cluster remains.
    let last_slow = (0..ngroups).rev().find(|&k| slow[k]);
    let mut remap: Vec<usize> = (0..ngroups).collect();
    if let Some(ls) = last_slow {
        for (k, r) in remap.iter_mut().enumerate() {
            if slow[k] || k > ls {
                *r = ls;
            }
        }
    }
    let mut kept: Vec<usize> = remap.clone();
    kept.sort_unstable();
    kept.dedup();

    let mut clusters = Vec::with_capacity(kept.len());
    for &k in &kept {
        let lv: Vec<usize> = (0..ngroups)
            .filter(|&q| remap[q] == k)
            .flat_map(|q| members[q].clone())
            .collect();
        let is_slow = Some(k) == last_slow;
        let center = if is_slow {
            0.0
        } else {
            lv.iter().map(|&l| levels[l].center).fold(f64::INFINITY, f64::min)
        };
        let center = if center.is_finite() { center } else { 0.0 };
        clusters.push(Cluster {
            center,
            radius: 0.0,
            count: 0,
            levels: lv,
            kind: if is_slow { ClusterKind::Slow } else { ClusterKind::Fast },
        });
    }
    for (k, e) in eigs.iter_mut().enumerate() {
        let id = kept.binary_search(&remap[group[k]]).expect("kept group");
        e.cluster = id;
        let c = &mut clusters[id];
        c.count += 1;
        c.radius = c.radius.max((e.value - Complex64::new(c.center, 0.0)).norm());
    }

    let mut ratios = Vec::new();
    for w in clusters.windows(2) {
        let next = if w[1].kind == ClusterKind::Slow {
            eigs.iter()
                .filter(|e| clusters[e.cluster].kind == ClusterKind::Slow)
                .map(|e| e.value.re.abs())
                .fold(0.0, f64::max)
        } else {
            w[1].center.abs()
        };
        ratios.push(w[0].center.abs() / next);
    }
    (clusters, ratios)
}

/// Eigenvalues of the full physical-space operator of a linear system.
///
/// Builds the dense Jacobian column by column from right-hand-side
/// evaluations. Intended as a slow cross-check for small grids.
pub fn physical_operator_spectrum(system: &KineticSystem) -> Result<Vec<Complex64>, SpectrumError> {
    let n = system.len();
    if n > 4000 {
        return Err(SpectrumError::TooLarge(n));
    }
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for c in 0..n {
        e[c] = 1.0;
        system.rhs(0.0, &e, &mut col)?;
        for r in 0..n {
            a[r * n + c] = Complex64::new(col[r], 0.0);
        }
        e[c] = 0.0;
    }
    eig_dense(&a)
}
