//! Benchmark advection problems, exact references and error metrics.
//!
//! In the small-`ε` limit the density of the kinetic model is transported
//! with unit speed along every axis, so the reference solution is the
//! initial density shifted periodically by `t`. The O(ε) diffusion of the
//! limit equation is ignored by the reference.

use crate::integrators::{integrate, IntegrateOptions, IntegrationError, Trajectory};
use crate::maxwellian::linearized_maxwellian;
use crate::quadrature::{gauss_hermite_1d, gauss_hermite_2d, QuadratureError, VelocityGrid};
use crate::spatial::{SchemeId, SpaceGrid, SpatialError};
use crate::spectrum::{full_spectrum, SpectrumError};
use crate::system::{density, CollisionKind, CollisionModel, KineticSystem, PiecewiseProfile, SystemError};
use crate::tpi_params::{
    select_clustered, zero_one_stable_schedule, OuterMethod, ScheduleError, TpiSchedule, DEFAULT_M_MIN,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Errors raised while reading a configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(String),
    #[error("{}invalid value for '{key}': {reason}", line_prefix(*line))]
    Invalid {
        key: String,
        line: Option<usize>,
        reason: String,
    },
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

/// Errors raised while running an experiment.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown initial density '{0}' (expected step_profile_1d, gaussian_1d, gaussian_2d or custom)")]
    UnknownDensity(String),
    #[error("velocity grid: {0}")]
    Quadrature(#[from] QuadratureError),
    #[error("spatial grid: {0}")]
    Spatial(#[from] SpatialError),
    #[error("system: {0}")]
    System(#[from] SystemError),
    #[error("spectrum: {0}")]
    Spectrum(#[from] SpectrumError),
    #[error("schedule: {0}")]
    Schedule(#[from] ScheduleError),
    #[error("integration: {0}")]
    Integration(#[from] IntegrationError),
}

/// Initial density of a benchmark.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialDensity {
    /// 1 on `[0.2, 0.4)`, 0.5 on `[0.6, 0.8)`, 0.1 elsewhere.
    StepProfile1d,
    /// `exp(-100 (x - 0.5)²)`.
    Gaussian1d,
    /// `exp(-100 |x - 0.5|²)` on the unit square.
    Gaussian2d,
    /// One value per cell, piecewise constant.
    Custom(Vec<f64>),
}

impl InitialDensity {
    /// Identifier used in configuration files.
    pub fn id(&self) -> &'static str {
        match self {
            InitialDensity::StepProfile1d => "step_profile_1d",
            InitialDensity::Gaussian1d => "gaussian_1d",
            InitialDensity::Gaussian2d => "gaussian_2d",
            InitialDensity::Custom(_) => "custom",
        }
    }

    /// Density at a point of the periodic unit domain, for a grid of spacing `dx`.
    pub fn sample(&self, x: [f64; 2], dim: usize, dx: f64) -> f64 {
        match self {
            InitialDensity::StepProfile1d => {
                let x = x[0];
                if (0.2..0.4).contains(&x) {
                    1.0
                } else if (0.6..0.8).contains(&x) {
                    0.5
                } else {
                    0.1
                }
            }
            InitialDensity::Gaussian1d => (-100.0 * (x[0] - 0.5).powi(2)).exp(),
            InitialDensity::Gaussian2d => (-100.0 * ((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2))).exp(),
            InitialDensity::Custom(table) => {
                let per_axis = (1.0 / dx).round() as usize;
                let idx = |v: f64| ((v / dx).floor() as usize).min(per_axis - 1);
                let c = if dim == 1 {
                    idx(x[0])
                } else {
                    idx(x[1]) * per_axis + idx(x[0])
                };
                table[c]
            }
        }
    }

    /// Checks that the density fits a grid of the given dimension and size.
    pub fn check(&self, grid: &SpaceGrid) -> Result<(), ConfigError> {
        let want = match self {
            InitialDensity::StepProfile1d | InitialDensity::Gaussian1d => Some(1),
            InitialDensity::Gaussian2d => Some(2),
            InitialDensity::Custom(t) => {
                if t.len() != grid.num_cells() {
                    return Err(invalid(
                        "problem.table",
                        format!("has {} values for {} cells", t.len(), grid.num_cells()),
                    ));
                }
                if t.iter().any(|v| !v.is_finite()) {
                    return Err(invalid("problem.table", "values must be finite".into()));
                }
                None
            }
        };
        match want {
            Some(d) if d != grid.dim() => Err(invalid(
                "problem.initial",
                format!("'{}' needs dimension {d}, got {}", self.id(), grid.dim()),
            )),
            _ => Ok(()),
        }
    }
}

impl FromStr for InitialDensity {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "step_profile_1d" => Ok(InitialDensity::StepProfile1d),
            "gaussian_1d" => Ok(InitialDensity::Gaussian1d),
            "gaussian_2d" => Ok(InitialDensity::Gaussian2d),
            "custom" => Ok(InitialDensity::Custom(Vec::new())),
            _ => Err(ExperimentError::UnknownDensity(s.to_string())),
        }
    }
}

/// Samples `rho0` at the cell centers of `grid`.
pub fn initial_density(rho0: &InitialDensity, grid: &SpaceGrid) -> Vec<f64> {
    (0..grid.num_cells())
        .map(|c| rho0.sample(grid.center(c), grid.dim(), grid.dx()))
        .collect()
}

/// Limit solution `ρ₀((x - t) mod 1)` (per axis) at the cell centers.
pub fn exact_advection(rho0: &InitialDensity, t: f64, grid: &SpaceGrid) -> Vec<f64> {
    let shift = |v: f64| (v - t).rem_euclid(1.0);
    (0..grid.num_cells())
        .map(|c| {
            let x = grid.center(c);
            let y = if grid.dim() == 2 { shift(x[1]) } else { x[1] };
            rho0.sample([shift(x[0]), y], grid.dim(), grid.dx())
        })
        .collect()
}

/// Error of a computed density against a reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// `(mass(t_end) - mass(0)) / mass(0)`.
    pub mass_drift: f64,
    pub min_density: f64,
    pub max_density: f64,
}

/// Cell-volume weighted error norms of `numeric - reference`.
pub fn error_norms(numeric: &[f64], reference: &[f64], cell_volume: f64) -> (f64, f64, f64) {
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let mut linf: f64 = 0.0;
    for (a, b) in numeric.iter().zip(reference) {
        let e = (a - b).abs();
        l1 += e;
        l2 += e * e;
        linf = linf.max(e);
    }
    (l1 * cell_volume, (l2 * cell_volume).sqrt(), linf)
}

/// How the projective schedule is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMethod {
    /// One level per separated eigenvalue cluster.
    Clustered,
    /// `[0,1]`-stable levels with a fixed outer step.
    ZeroOneStable,
    /// `h0`, `K` and `M` given explicitly.
    Explicit,
}

impl fmt::Display for ScheduleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleMethod::Clustered => "clustered",
            ScheduleMethod::ZeroOneStable => "zero_one_stable",
            ScheduleMethod::Explicit => "explicit",
        })
    }
}

/// `[problem]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub dimension: usize,
    pub epsilon: f64,
    pub dx: f64,
    /// Gauss–Hermite nodes per velocity axis.
    #[serde(default = "default_velocities")]
    pub velocities: usize,
    pub initial: String,
    #[serde(default)]
    pub t_end: f64,
    /// Cell values for `initial = "custom"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<f64>>,
}

fn default_velocities() -> usize {
    10
}

/// `[collision]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionSection {
    /// `constant`, `profile` or `density`.
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<f64>>,
}

/// `[scheme]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub spatial: SchemeId,
}

/// `[schedule]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub method: ScheduleMethod,
    #[serde(default = "default_outer")]
    pub outer: OuterMethod,
    /// Damping steps per level for `zero_one_stable`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Outer step in units of `dx` for `zero_one_stable`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    /// Separation threshold for `clustered`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_min: Option<f64>,
    /// Innermost step; defaults to `ε / max ν`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<f64>,
    /// Per-level damping steps for `explicit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_levels: Option<Vec<usize>>,
    /// Per-level extrapolation factors for `explicit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_levels: Option<Vec<f64>>,
}

fn default_outer() -> OuterMethod {
    OuterMethod::Pfe
}

/// `[output]` section.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Store a snapshot every this many outer steps (0 keeps only both ends).
    #[serde(default)]
    pub snapshot_every: usize,
}

/// Complete description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSection,
    pub collision: CollisionSection,
    pub scheme: SchemeSection,
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn invalid(key: &str, reason: String) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        line: None,
        reason,
    }
}

/// 1-based line of `key` inside `[section]` of a TOML text.
fn find_line(text: &str, dotted: &str) -> Option<usize> {
    let (section, key) = dotted.split_once('.')?;
    let mut current = "";
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.trim_end_matches(']').trim();
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

impl ExperimentConfig {
    /// Parses and validates a TOML configuration. Errors carry line numbers.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start.min(text.len())].lines().count().max(1));
            let msg = e.message().trim().to_string();
            ConfigError::Parse(match line {
                Some(l) => format!("line {l}: {msg}"),
                None => msg,
            })
        })?;
        cfg.validate().map_err(|e| match e {
            ConfigError::Invalid {
                key,
                line: None,
                reason,
            } => ConfigError::Invalid {
                line: find_line(text, &key),
                key,
                reason,
            },
            other => other,
        })?;
        Ok(cfg)
    }

    /// Serializes the configuration back to TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    /// Checks ranges and cross-field consistency.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = &self.problem;
        if !(p.dimension == 1 || p.dimension == 2) {
            return Err(invalid(
                "problem.dimension",
                format!("must be 1 or 2, got {}", p.dimension),
            ));
        }
        positive("problem.epsilon", p.epsilon)?;
        positive("problem.dx", p.dx)?;
        if p.velocities == 0 {
            return Err(invalid("problem.velocities", "must be at least 1".into()));
        }
        if !(p.t_end >= 0.0 && p.t_end.is_finite()) {
            return Err(invalid(
                "problem.t_end",
                format!("must be non-negative, got {}", p.t_end),
            ));
        }
        let grid = SpaceGrid::from_spacing(p.dimension, p.dx).map_err(|e| invalid("problem.dx", e.to_string()))?;
        self.initial()
            .map_err(|e| invalid("problem.initial", e.to_string()))?
            .check(&grid)?;
        self.collision_model()?;
        let s = &self.schedule;
        if let Some(h0) = s.h0 {
            positive("schedule.h0", h0)?;
        }
        match s.method {
            ScheduleMethod::Clustered => {
                if let Some(m) = s.m_min {
                    positive("schedule.m_min", m)?;
                }
            }
            ScheduleMethod::ZeroOneStable => {
                let k =
                    s.k.ok_or_else(|| invalid("schedule.k", "required for zero_one_stable".into()))?;
                if !(1..=10).contains(&k) {
                    return Err(invalid("schedule.k", format!("must be in 1..=10, got {k}")));
                }
                positive(
                    "schedule.cfl",
                    s.cfl
                        .ok_or_else(|| invalid("schedule.cfl", "required for zero_one_stable".into()))?,
                )?;
            }
            ScheduleMethod::Explicit => {
                let k = s
                    .k_levels
                    .as_ref()
                    .ok_or_else(|| invalid("schedule.k_levels", "required for explicit".into()))?;
                let m = s
                    .m_levels
                    .as_ref()
                    .ok_or_else(|| invalid("schedule.m_levels", "required for explicit".into()))?;
                if k.is_empty() || k.len() != m.len() {
                    return Err(invalid(
                        "schedule.m_levels",
                        format!("needs one value per level ({} given, {} expected)", m.len(), k.len()),
                    ));
                }
                s.h0.ok_or_else(|| invalid("schedule.h0", "required for explicit".into()))?;
            }
        }
        Ok(())
    }

    /// Initial density described by the `[problem]` section.
    pub fn initial(&self) -> Result<InitialDensity, ExperimentError> {
        let id: InitialDensity = self.problem.initial.parse()?;
        Ok(match id {
            InitialDensity::Custom(_) => InitialDensity::Custom(self.problem.table.clone().unwrap_or_default()),
            other => other,
        })
    }

    /// Collision model described by the `[collision]` section.
    pub fn collision_model(&self) -> Result<CollisionModel, ConfigError> {
        let c = &self.collision;
        let kind = match c.model.trim().to_ascii_lowercase().as_str() {
            "constant" => CollisionKind::Constant(
                c.value
                    .ok_or_else(|| invalid("collision.value", "required for the constant model".into()))?,
            ),
            "profile" => {
                let levels = c
                    .levels
                    .clone()
                    .ok_or_else(|| invalid("collision.levels", "required for the profile model".into()))?;
                let profile = match &c.breakpoints {
                    Some(b) => PiecewiseProfile {
                        breakpoints: b.clone(),
                        levels,
                    },
                    None => PiecewiseProfile::uniform(levels),
                };
                CollisionKind::Profile(profile)
            }
            "density" => CollisionKind::Density,
            other => {
                return Err(invalid(
                    "collision.model",
                    format!("unknown model '{other}' (expected constant, profile or density)"),
                ));
            }
        };
        CollisionModel::new(kind, self.problem.epsilon).map_err(|e| {
            let key = match e {
                SystemError::Epsilon(_) => "problem.epsilon",
                SystemError::Level(_) if c.value.is_some() => "collision.value",
                SystemError::Level(_) => "collision.levels",
                _ => "collision.breakpoints",
            };
            invalid(key, e.to_string())
        })
    }

    pub fn space_grid(&self) -> Result<SpaceGrid, ExperimentError> {
        Ok(SpaceGrid::from_spacing(self.problem.dimension, self.problem.dx)?)
    }

    pub fn velocity_grid(&self) -> Result<VelocityGrid, ExperimentError> {
        Ok(match self.problem.dimension {
            1 => gauss_hermite_1d(self.problem.velocities)?,
            _ => gauss_hermite_2d(self.problem.velocities)?,
        })
    }

    /// One-dimensional step-profile benchmark with `ν = ρ`, `ε = 1e-5`,
    /// `Δx = 5e-3`, ten velocities, `h0 = ε`, `K = 5`, `h_L = 0.5Δx` and PRK4.
    pub fn step_profile_benchmark(scheme: SchemeId) -> Self {
        Self::benchmark(1, 5e-3, "step_profile_1d", 5, scheme)
    }

    /// Two-dimensional Gaussian benchmark with `ν = ρ`, `ε = 1e-5`,
    /// `Δx = Δy = 0.02`, 10×10 velocities, `h0 = ε`, `K = 3`, `h_L = 0.5Δx` and PRK4.
    pub fn gaussian_2d_benchmark(scheme: SchemeId) -> Self {
        Self::benchmark(2, 0.02, "gaussian_2d", 3, scheme)
    }

    fn benchmark(dimension: usize, dx: f64, initial: &str, k: usize, scheme: SchemeId) -> Self {
        Self {
            problem: ProblemSection {
                dimension,
                epsilon: 1e-5,
                dx,
                velocities: 10,
                initial: initial.to_string(),
                t_end: 1.0,
                table: None,
            },
            collision: CollisionSection {
                model: "density".into(),
                value: None,
                levels: None,
                breakpoints: None,
            },
            scheme: SchemeSection { spatial: scheme },
            schedule: ScheduleSection {
                method: ScheduleMethod::ZeroOneStable,
                outer: OuterMethod::Prk4,
                k: Some(k),
                cfl: Some(0.5),
                m_min: None,
                h0: Some(1e-5),
                k_levels: None,
                m_levels: None,
            },
            output: OutputSection::default(),
        }
    }
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("must be positive and finite, got {v}")))
    }
}

/// Schedule together with notes from its construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannedSchedule {
    pub schedule: TpiSchedule,
    pub warnings: Vec<String>,
}

/// Builds the schedule requested by `cfg` for initial density `rho0`.
pub fn plan_schedule(cfg: &ExperimentConfig, rho0: &[f64]) -> Result<PlannedSchedule, ExperimentError> {
    let model = cfg.collision_model()?;
    let s = &cfg.schedule;
    let dx = cfg.problem.dx;
    let nu_max = match model.kind {
        CollisionKind::Density => rho0.iter().copied().fold(0.0, f64::max),
        _ => model.levels().first().copied().unwrap_or(0.0),
    };
    let default_h0 = || {
        if nu_max > 0.0 {
            Ok(model.epsilon / nu_max)
        } else {
            Err(ScheduleError::NoFrequency)
        }
    };
    match s.method {
        ScheduleMethod::ZeroOneStable => {
            let h0 = match s.h0 {
                Some(h) => h,
                None => default_h0()?,
            };
            let sched = zero_one_stable_schedule(h0, s.k.unwrap_or(1), s.cfl.unwrap_or(0.5) * dx, s.outer)?;
            Ok(PlannedSchedule {
                schedule: sched.with_dx(dx),
                warnings: Vec::new(),
            })
        }
        ScheduleMethod::Clustered => {
            let sgrid = cfg.space_grid()?;
            let vgrid = cfg.velocity_grid()?;
            let report = full_spectrum(&model, cfg.scheme.spatial, &sgrid, &vgrid, Some(rho0))?;
            let sel = select_clustered(&report, s.m_min.unwrap_or(DEFAULT_M_MIN), s.outer)?;
            let schedule = match s.h0 {
                Some(h0) if h0 != sel.schedule.h0() => {
                    TpiSchedule::new(h0, sel.schedule.k().to_vec(), sel.schedule.m().to_vec(), s.outer)?.with_dx(dx)
                }
                _ => sel.schedule,
            };
            Ok(PlannedSchedule {
                schedule,
                warnings: sel.warnings,
            })
        }
        ScheduleMethod::Explicit => {
            let h0 = match s.h0 {
                Some(h) => h,
                None => default_h0()?,
            };
            let k = s.k_levels.clone().unwrap_or_default();
            let m = s.m_levels.clone().unwrap_or_default();
            Ok(PlannedSchedule {
                schedule: TpiSchedule::new(h0, k, m, s.outer)?.with_dx(dx),
                warnings: Vec::new(),
            })
        }
    }
}

/// Everything produced by [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub trajectory: Trajectory,
    pub errors: ErrorReport,
    pub initial_density: Vec<f64>,
    pub final_density: Vec<f64>,
    pub reference: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Builds the grids, schedule and initial state of `cfg`, integrates to
/// `t_end` and compares the density with the shifted initial profile.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    cfg.validate()?;
    let sgrid = cfg.space_grid()?;
    let rho0 = initial_density(&cfg.initial()?, &sgrid);
    let planned = plan_schedule(cfg, &rho0)?;
    run_planned(cfg, &planned)
}

/// Like [`run_experiment`] with a schedule that was already planned.
pub fn run_planned(cfg: &ExperimentConfig, planned: &PlannedSchedule) -> Result<ExperimentOutcome, ExperimentError> {
    cfg.validate()?;
    let sgrid = cfg.space_grid()?;
    let vgrid = cfg.velocity_grid()?;
    let init = cfg.initial()?;
    let rho0 = initial_density(&init, &sgrid);
    let model = cfg.collision_model()?;
    let system = KineticSystem::new(sgrid, vgrid.clone(), model, cfg.scheme.spatial)?;
    let f0 = linearized_maxwellian(&rho0, &vgrid);
    let options = IntegrateOptions {
        snapshot_every: cfg.output.snapshot_every,
        detect_blow_up: true,
    };
    let trajectory = integrate(&system, f0.values(), &planned.schedule, cfg.problem.t_end, &options)?;
    let final_density = density(&trajectory.final_state, vgrid.weights());
    let reference = exact_advection(&init, trajectory.final_time, &sgrid);
    let (l1, l2, linf) = error_norms(&final_density, &reference, sgrid.cell_volume());
    let mass0 = trajectory.observables[0].1.mass;
    let mass1 = trajectory.observables.last().map(|o| o.1.mass).unwrap_or(mass0);
    let (min_density, max_density) = trajectory
        .observables
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, o)| {
            (lo.min(o.min_density), hi.max(o.max_density))
        });
    Ok(ExperimentOutcome {
        errors: ErrorReport {
            l1,
            l2,
            linf,
            mass_drift: if mass0 != 0.0 {
                (mass1 - mass0) / mass0
            } else {
                mass1 - mass0
            },
            min_density,
            max_density,
        },
        trajectory,
        initial_density: rho0,
        final_density,
        reference,
        warnings: planned.warnings.clone(),
    })
}
