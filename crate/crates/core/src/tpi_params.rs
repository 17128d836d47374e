//! Selection of telescopic projective integration parameters.
//!
//! A schedule with `L` levels holds the innermost step `h0` and, per level,
//! the number of damping steps `K_ℓ` and the extrapolation factor `M_ℓ`.
//! Level `ℓ + 1` advances by `h_{ℓ+1} = (M_ℓ + K_ℓ + 1) h_ℓ`.
//!
//! Two procedures are provided. [`select_clustered`] places one projective
//! level per separated cluster of fast eigenvalues and tracks the clusters
//! exactly through the amplification maps of each level.
//! [`select_zero_one_stable`] builds schedules whose stability region
//! contains the whole real interval `[0, 1]` of forward Euler factors, which
//! suits spectra that fill the negative real axis.

use crate::integrators::ButcherTableau;
use crate::spectrum::{ClusterKind, ModeEigenvalue, SpectrumReport};
use crate::system::{CollisionKind, CollisionModel};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Default minimal extrapolation factor for a level to count as separated.
pub const DEFAULT_M_MIN: f64 = 3.0;

/// Upper bound on damping steps tried per level.
pub const MAX_DAMPING_STEPS: usize = 64;

/// Rounded maximal `[0,1]`-stable extrapolation factors for `K = 1..=10`.
pub const TABLE_MAX_M: [f64; 10] = [2.0, 3.0, 6.66, 8.32, 12.21, 14.24, 18.21, 20.48, 24.48, 26.91];

/// Errors raised by parameter selection.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("schedule needs at least one level")]
    NoLevels,
    #[error("innermost step must be positive and finite, got {0}")]
    Step(f64),
    #[error("K and M lists differ in length ({k} vs {m})")]
    Lengths { k: usize, m: usize },
    #[error("extrapolation factor M_{level} = {value} is invalid (must be finite and at least {min})")]
    Extrapolation { level: usize, value: f64, min: f64 },
    #[error("K = {0} is outside the supported range 1..=10")]
    KOutOfRange(usize),
    #[error("spectrum report holds no eigenvalues")]
    EmptySpectrum,
    #[error("dominant eigenvalues cannot be enclosed by a stable outer step (M = {m})")]
    Infeasible { m: f64 },
    #[error("damped cluster reaches modulus {modulus} and cannot be damped further")]
    Undampable { modulus: f64 },
    #[error("more than {MAX_DAMPING_STEPS} damping steps needed on level {level}")]
    TooManyDampingSteps { level: usize },
    #[error("outer step {outer} is smaller than (K+2)·h0 = {min}")]
    OuterStepTooSmall { outer: f64, min: f64 },
    #[error("could not reach M_(L-1) >= 1 by lowering inner extrapolation factors (got {0})")]
    Cascade(f64),
    #[error("unknown outer method '{0}' (expected pfe, prk2 or prk4)")]
    UnknownOuter(String),
    #[error("collision model has no positive collision frequency")]
    NoFrequency,
}

/// Outermost integrator of the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum OuterMethod {
    /// Projective forward Euler.
    Pfe,
    /// Projective Runge–Kutta with the two-stage midpoint tableau.
    Prk2,
    /// Projective Runge–Kutta with the classical four-stage tableau.
    Prk4,
}

impl OuterMethod {
    /// Butcher tableau of the outer method (forward Euler for PFE).
    pub fn tableau(self) -> ButcherTableau {
        match self {
            OuterMethod::Pfe => ButcherTableau::forward_euler(),
            OuterMethod::Prk2 => ButcherTableau::rk2(),
            OuterMethod::Prk4 => ButcherTableau::rk4(),
        }
    }
}

impl fmt::Display for OuterMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OuterMethod::Pfe => "pfe",
            OuterMethod::Prk2 => "prk2",
            OuterMethod::Prk4 => "prk4",
        })
    }
}

impl FromStr for OuterMethod {
    type Err = ScheduleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pfe" => Ok(OuterMethod::Pfe),
            "prk2" => Ok(OuterMethod::Prk2),
            "prk4" => Ok(OuterMethod::Prk4),
            _ => Err(ScheduleError::UnknownOuter(s.to_string())),
        }
    }
}

impl TryFrom<String> for OuterMethod {
    type Error = ScheduleError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<OuterMethod> for String {
    fn from(m: OuterMethod) -> String {
        m.to_string()
    }
}

/// Complete parameter set of a telescopic projective integrator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TpiSchedule {
    h0: f64,
    k: Vec<usize>,
    m: Vec<f64>,
    outer: OuterMethod,
    h: Vec<f64>,
    dx: Option<f64>,
}

impl TpiSchedule {
    /// Schedule with `L = k.len()` levels; every `M_ℓ` must be at least 1.
    pub fn new(h0: f64, k: Vec<usize>, m: Vec<f64>, outer: OuterMethod) -> Result<Self, ScheduleError> {
        Self::build(h0, k, m, outer, 1.0)
    }

    /// Like [`TpiSchedule::new`] but accepts any `M_ℓ ≥ 0`, for analysis and tests.
    pub fn unchecked(h0: f64, k: Vec<usize>, m: Vec<f64>, outer: OuterMethod) -> Result<Self, ScheduleError> {
        Self::build(h0, k, m, outer, 0.0)
    }

    fn build(h0: f64, k: Vec<usize>, m: Vec<f64>, outer: OuterMethod, m_floor: f64) -> Result<Self, ScheduleError> {
        if k.is_empty() {
            return Err(ScheduleError::NoLevels);
        }
        if k.len() != m.len() {
            return Err(ScheduleError::Lengths { k: k.len(), m: m.len() });
        }
        if !(h0 > 0.0 && h0.is_finite()) {
            return Err(ScheduleError::Step(h0));
        }
        for (level, &value) in m.iter().enumerate() {
            if !(value.is_finite() && value >= m_floor) {
                return Err(ScheduleError::Extrapolation {
                    level,
                    value,
                    min: m_floor,
                });
            }
        }
        let mut h = Vec::with_capacity(k.len() + 1);
        h.push(h0);
        for l in 0..k.len() {
            h.push(h[l] * (m[l] + k[l] as f64 + 1.0));
        }
        Ok(Self {
            h0,
            k,
            m,
            outer,
            h,
            dx: None,
        })
    }

    /// Attaches the grid spacing used to report the CFL number.
    pub fn with_dx(mut self, dx: f64) -> Self {
        self.dx = Some(dx);
        self
    }

    /// Number of projective levels `L`.
    pub fn levels(&self) -> usize {
        self.k.len()
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn k(&self) -> &[usize] {
        &self.k
    }

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    pub fn outer(&self) -> OuterMethod {
        self.outer
    }

    /// Steps `h_0, …, h_L`.
    pub fn steps(&self) -> &[f64] {
        &self.h
    }

    /// Outermost step `h_L`.
    pub fn outer_step(&self) -> f64 {
        self.h[self.levels()]
    }

    pub fn dx(&self) -> Option<f64> {
        self.dx
    }

    /// `h_L / Δx` when the spacing is known.
    pub fn cfl(&self) -> Option<f64> {
        self.dx.map(|dx| self.outer_step() / dx)
    }

    /// Same schedule with a different outer method.
    pub fn with_outer(mut self, outer: OuterMethod) -> Self {
        self.outer = outer;
        self
    }

    /// Rescales `M_{L-1}` so that the outermost step equals `h_outer`.
    pub fn with_outer_step(&self, h_outer: f64) -> Result<Self, ScheduleError> {
        let last = self.levels() - 1;
        let mut m = self.m.clone();
        m[last] = h_outer / self.h[last] - self.k[last] as f64 - 1.0;
        let s = Self::build(self.h0, self.k.clone(), m, self.outer, 0.0)?;
        Ok(Self { dx: self.dx, ..s })
    }

    /// Serializable summary `(L, h0, K, M, h, CFL)`.
    pub fn dump(&self) -> ScheduleDump {
        ScheduleDump {
            levels: self.levels(),
            h0: self.h0,
            k: self.k.clone(),
            m: self.m.clone(),
            h: self.h.clone(),
            outer: self.outer,
            cfl: self.cfl(),
        }
    }

    /// Stability regions of the projective levels.
    pub fn stability_regions(&self) -> Vec<StabilityRegionSpec> {
        self.k
            .iter()
            .zip(&self.m)
            .map(|(&k, &m)| StabilityRegionSpec {
                inner_radius: if k == 0 { 0.0 } else { (1.0 / m).powf(1.0 / k as f64) },
                dominant_center: 1.0 - 1.0 / m,
                dominant_radius: 1.0 / m,
            })
            .collect()
    }
}

/// Flat, serializable view of a schedule for logs and golden files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleDump {
    #[serde(rename = "L")]
    pub levels: usize,
    pub h0: f64,
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    #[serde(rename = "M")]
    pub m: Vec<f64>,
    pub h: Vec<f64>,
    pub outer: OuterMethod,
    pub cfl: Option<f64>,
}

impl fmt::Display for TpiSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "L = {}", self.levels())?;
        writeln!(f, "outer = {}", self.outer)?;
        writeln!(f, "h0 = {:.16e}", self.h0)?;
        for l in 0..self.levels() {
            writeln!(
                f,
                "level {}: K = {}, M = {:.16e}, h = {:.16e}",
                l + 1,
                self.k[l],
                self.m[l],
                self.h[l + 1]
            )?;
        }
        if let Some(c) = self.cfl() {
            writeln!(f, "cfl = {c:.16e}")?;
        }
        Ok(())
    }
}

/// Approximate stability region of one projective level in its σ-plane:
/// the damping disk `D(0, (1/M)^{1/K})` and the dominant disk `D(1 - 1/M, 1/M)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityRegionSpec {
    pub inner_radius: f64,
    pub dominant_center: f64,
    pub dominant_radius: f64,
}

/// Amplification of one projective forward Euler level: `((M+1)σ - M) σ^K`.
pub fn level_map(sigma: Complex64, m: f64, k: usize) -> Complex64 {
    (sigma * (m + 1.0) - m) * sigma.powu(k as u32)
}

/// Amplification of the outer step for inner factor `tau`, extrapolation `m`,
/// damping steps `k` and outer tableau `tab`.
///
/// This is the scalar form of the projective Runge–Kutta step: stage
/// derivatives are `τ^K(τ - 1)/h` times the stage seed, seeds are
/// extrapolated with coefficient `c_s(M+K+1) - (K+1)`, and the update is
/// `τ^{K+1} + M τ^K(τ - 1) Σ b_s y_s`.
pub fn outer_map(tau: Complex64, m: f64, k: usize, tab: &ButcherTableau) -> Complex64 {
    let base = tau.powu(k as u32 + 1);
    let q = tau.powu(k as u32) * (tau - 1.0);
    let s = tab.stages();
    let mut seeds: Vec<Complex64> = Vec::with_capacity(s);
    seeds.push(Complex64::new(1.0, 0.0));
    for st in 1..s {
        let c = tab.c()[st];
        let coef = (c * (m + k as f64 + 1.0) - (k as f64 + 1.0)) / c;
        let acc: Complex64 = (0..st).map(|j| seeds[j] * tab.a()[st][j]).sum();
        seeds.push(base + q * acc * coef);
    }
    let sum: Complex64 = (0..s).map(|j| seeds[j] * tab.b()[j]).sum();
    base + q * sum * m
}

/// Amplification factor `σ_L` of the whole schedule for innermost factor `σ₀`.
pub fn amplification(schedule: &TpiSchedule, sigma0: Complex64) -> Complex64 {
    let last = schedule.levels() - 1;
    let mut s = sigma0;
    for l in 0..last {
        s = level_map(s, schedule.m[l], schedule.k[l]);
    }
    outer_map(s, schedule.m[last], schedule.k[last], &schedule.outer.tableau())
}

/// Outcome of [`verify_stability`].
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCheck {
    pub stable: bool,
    /// Offending eigenvalues with their amplification factors.
    pub violations: Vec<(ModeEigenvalue, Complex64)>,
    /// Largest `|σ_L|` over all eigenvalues (0 for an empty spectrum).
    pub max_amplification: f64,
}

/// Checks `|σ_L(1 + h0 λ)| ≤ 1 + 1e-9` for every eigenvalue of the report.
pub fn verify_stability(schedule: &TpiSchedule, report: &SpectrumReport) -> StabilityCheck {
    let mut violations = Vec::new();
    let mut max_amp: f64 = 0.0;
    for e in &report.eigenvalues {
        let s = amplification(schedule, Complex64::new(1.0, 0.0) + e.value * schedule.h0);
        max_amp = max_amp.max(s.norm());
        if s.norm() > 1.0 + 1e-9 {
            violations.push((*e, s));
        }
    }
    StabilityCheck {
        stable: violations.is_empty(),
        violations,
        max_amplification: max_amp,
    }
}

/// Schedule from the clustered procedure with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredSelection {
    pub schedule: TpiSchedule,
    /// `|Im| / |Re|` of `σ/(1 - σ)` at each inner level's target cluster.
    pub imag_ratios: Vec<f64>,
    pub warnings: Vec<String>,
}

fn initial_damping(m: f64, sigma_hat: f64) -> Result<usize, ScheduleError> {
    if sigma_hat <= 0.0 {
        return Ok(1);
    }
    if sigma_hat >= 1.0 {
        return Err(ScheduleError::Undampable { modulus: sigma_hat });
    }
    let k = ((1.0 / m).ln() / sigma_hat.ln()).ceil();
    Ok(if k.is_finite() && k > 1.0 { k as usize } else { 1 })
}

fn max_modulus(points: &[[Complex64; 3]], which: &[usize]) -> f64 {
    which
        .iter()
        .flat_map(|&c| points[c].iter().map(|z| z.norm()))
        .fold(0.0, f64::max)
}

/// Clustered-spectrum parameter selection.
///
/// `h0 = ε/ω̄_max` moves the fastest cluster to the origin of the forward
/// Euler σ-plane. Each later fast cluster, represented by its center and the
/// two real boundary points `center ± radius`, becomes the target of a new
/// level when `M = Re(σ_c/(1 - σ_c)) ≥ m_min`; otherwise it is treated as
/// already damped. `K` starts from `⌈ln(1/M)/ln σ̂⌉`, where `σ̂` is the
/// largest modulus among damped clusters, and is increased until the damped
/// clusters map no farther from the origin than the target group (the target
/// and the following clusters that are too close to it to earn their own
/// level). All points are propagated exactly through each level map.
///
/// The outermost `M` is the largest value whose dominant disk
/// `D(1 - 1/M, 1/M)` contains every eigenvalue of the slow cluster after
/// propagation, i.e. `min -2 Re(σ - 1)/|σ - 1|²`.
pub fn select_clustered(
    report: &SpectrumReport,
    m_min: f64,
    outer: OuterMethod,
) -> Result<ClusteredSelection, ScheduleError> {
    let eps = report.epsilon;
    let omega_max = report.levels.first().ok_or(ScheduleError::EmptySpectrum)?.omega;
    if !(omega_max > 0.0) {
        return Err(ScheduleError::NoFrequency);
    }
    let h0 = eps / omega_max;
    let one = Complex64::new(1.0, 0.0);
    let mut warnings = Vec::new();

    let mut pts: Vec<[Complex64; 3]> = report
        .fast_clusters()
        .map(|c| {
            let s = one + h0 * c.center;
            let r = h0 * c.radius;
            [s, s - r, s + r]
        })
        .collect();
    let mut slow: Vec<Complex64> = report
        .eigenvalues
        .iter()
        .filter(|e| report.clusters[e.cluster].kind == ClusterKind::Slow)
        .map(|e| one + e.value * h0)
        .collect();
    if pts.is_empty() {
        warnings.push("no fast eigenvalue cluster separated from the slow cluster; using a single level".to_string());
    }

    let mut ms = Vec::new();
    let mut ks = Vec::new();
    let mut imag = Vec::new();
    let mut damped: Vec<usize> = if pts.is_empty() { Vec::new() } else { vec![0] };
    let mut queue: VecDeque<usize> = (1..pts.len()).collect();
    let extrapolation = |s: Complex64| s / (one - s);

    loop {
        let mut target = None;
        while let Some(c) = queue.pop_front() {
            let q = extrapolation(pts[c][0]);
            if q.re >= m_min {
                target = Some((c, q));
                break;
            }
            warnings.push(format!(
                "fast cluster {c} is too close to its predecessor (M = {:.4}); merged",
                q.re
            ));
            damped.push(c);
        }
        let Some((t, q)) = target else { break };
        let m = q.re;
        let ratio = q.im.abs() / q.re.abs();
        if ratio > 0.1 {
            warnings.push(format!(
                "level {}: discarded imaginary part is {:.1}% of M",
                ms.len() + 1,
                100.0 * ratio
            ));
        }
        let mut k = initial_damping(m, max_modulus(&pts, &damped))?;
        let mapped = loop {
            let mapped: Vec<[Complex64; 3]> = pts.iter().map(|p| p.map(|z| level_map(z, m, k))).collect();
            let mut group = vec![t];
            for &c in &queue {
                if extrapolation(mapped[c][0]).re < m_min {
                    group.push(c);
                } else {
                    break;
                }
            }
            let dm = max_modulus(&mapped, &damped);
            let tg = max_modulus(&mapped, &group);
            if dm <= tg * (1.0 + 1e-9) {
                break mapped;
            }
            k += 1;
            if k > MAX_DAMPING_STEPS {
                return Err(ScheduleError::TooManyDampingSteps { level: ms.len() + 1 });
            }
        };
        ms.push(m);
        ks.push(k);
        imag.push(ratio);
        pts = mapped;
        for s in &mut slow {
            *s = level_map(*s, m, k);
        }
        damped.push(t);
    }
    damped.extend(queue);

    let mut m_outer = f64::INFINITY;
    for s in &slow {
        let d = s - one;
        if d.norm() <= 1e-12 {
            continue;
        }
        if d.re >= 0.0 {
            return Err(ScheduleError::Infeasible { m: f64::NAN });
        }
        m_outer = m_outer.min(-2.0 * d.re / d.norm_sqr());
    }
    if !m_outer.is_finite() || m_outer < 1.0 {
        return Err(ScheduleError::Infeasible { m: m_outer });
    }
    let k_outer = initial_damping(m_outer, max_modulus(&pts, &damped))?;
    ms.push(m_outer);
    ks.push(k_outer);

    let schedule = TpiSchedule::new(h0, ks, ms, outer)?.with_dx(report.dx);
    Ok(ClusteredSelection {
        schedule,
        imag_ratios: imag,
        warnings,
    })
}

/// Rounded maximal `[0,1]`-stable `M` for `K` damping steps, as tabulated.
pub fn table_max_m(k: usize) -> Result<f64, ScheduleError> {
    if (1..=10).contains(&k) {
        Ok(TABLE_MAX_M[k - 1])
    } else {
        Err(ScheduleError::KOutOfRange(k))
    }
}

/// True when one level `σ ↦ ((M+1)σ - M)σ^K` keeps `[0,1]` inside an interval
/// `[-a, 1]` that it maps into itself, so that repeated levels stay bounded.
pub fn is_zero_one_stable_level(m: f64, k: usize) -> bool {
    let kf = k as f64;
    let g = |s: f64| ((m + 1.0) * s - m) * s.powi(k as i32);
    let s_min = kf * m / ((kf + 1.0) * (m + 1.0));
    let a = -g(s_min);
    if a > 1.0 {
        return false;
    }
    let end = g(-a);
    if k % 2 == 1 {
        end <= 1.0
    } else {
        end >= -a
    }
}

/// Largest `M` for which [`is_zero_one_stable_level`] holds, by bisection.
pub fn zero_one_stable_max_m(k: usize) -> Result<f64, ScheduleError> {
    if !(1..=10).contains(&k) {
        return Err(ScheduleError::KOutOfRange(k));
    }
    let (mut lo, mut hi) = (1.0_f64, 64.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if is_zero_one_stable_level(mid, k) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `[0,1]`-stable schedule for a given innermost step, damping count and outer step.
///
/// Every level gets `K` and the maximal stable `M`; the outermost factor is
/// then set so that the outer step equals `h_outer`. When that leaves
/// `M_{L-1} < 1`, inner factors are lowered in steps of 0.1 (not below 2),
/// outermost first, until `M_{L-1} ≥ 2`.
pub fn zero_one_stable_schedule(
    h0: f64,
    k: usize,
    h_outer: f64,
    outer: OuterMethod,
) -> Result<TpiSchedule, ScheduleError> {
    let m_max = zero_one_stable_max_m(k)?;
    if !(h0 > 0.0 && h0.is_finite()) {
        return Err(ScheduleError::Step(h0));
    }
    let kf = k as f64;
    let min = (kf + 2.0) * h0;
    if !(h_outer >= min) {
        return Err(ScheduleError::OuterStepTooSmall { outer: h_outer, min });
    }
    let levels = (((h_outer.ln() - h0.ln()) / (m_max + kf + 1.0).ln()).ceil() as usize).max(1);
    let mut ms = vec![m_max; levels];
    let last_factor = |ms: &[f64]| {
        let inner: f64 = ms[..ms.len() - 1].iter().map(|m| m + kf + 1.0).product();
        h_outer / (h0 * inner) - kf - 1.0
    };
    ms[levels - 1] = last_factor(&ms);
    if ms[levels - 1] < 1.0 {
        'outer: for lv in (0..levels - 1).rev() {
            while ms[lv] - 0.1 >= 2.0 - 1e-12 {
                ms[lv] -= 0.1;
                ms[levels - 1] = last_factor(&ms);
                if ms[levels - 1] >= 2.0 {
                    break 'outer;
                }
            }
        }
    }
    if ms[levels - 1] < 1.0 {
        return Err(ScheduleError::Cascade(ms[levels - 1]));
    }
    TpiSchedule::new(h0, vec![k; levels], ms, outer)
}

/// `[0,1]`-stable selection from a collision model.
///
/// `h0 = ε / max ν`, where `max ν` is the largest initial density for the
/// density model and the largest level otherwise. The outer step is `C·Δx`.
pub fn select_zero_one_stable(
    model: &CollisionModel,
    rho0: &[f64],
    k: usize,
    cfl: f64,
    dx: f64,
    outer: OuterMethod,
) -> Result<TpiSchedule, ScheduleError> {
    let nu_max = match model.kind {
        CollisionKind::Density => rho0.iter().copied().fold(0.0, f64::max),
        _ => model.levels().first().copied().unwrap_or(0.0),
    };
    if !(nu_max > 0.0) {
        return Err(ScheduleError::NoFrequency);
    }
    Ok(zero_one_stable_schedule(model.epsilon / nu_max, k, cfl * dx, outer)?.with_dx(dx))
}
