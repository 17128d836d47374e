//! Time integrators: forward Euler, explicit Runge–Kutta and the
//! telescopic projective hierarchy.
//!
//! Level 0 of the hierarchy is forward Euler with step `h0`. A step of
//! level `ℓ ≥ 1` performs `K_{ℓ-1} + 1` steps of level `ℓ - 1` and then
//! extrapolates over the remaining `M_{ℓ-1} h_{ℓ-1}` using the last two
//! states. The outermost level uses the Runge–Kutta tableau of the
//! schedule: every stage runs `K + 1` inner steps from an extrapolated seed
//! and takes the time derivative from the last two inner states.

use crate::system::{Observables, SemiDiscrete, SystemError};
use crate::tpi_params::{ScheduleError, TpiSchedule};
use serde::Serialize;
use thiserror::Error;

/// Sup-norm growth over the initial state that counts as a blow-up.
pub const BLOW_UP_FACTOR: f64 = 1e3;

/// Largest relative change of the outer step accepted to land on `t_end`.
pub const MAX_STEP_ADJUSTMENT: f64 = 1e-3;

/// Errors raised while integrating.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error("right-hand side failed during outer step {step}: {source}")]
    System { step: usize, source: SystemError },
    #[error("solution blew up at t = {time} (step {step}): sup norm grew by a factor {ratio:.3e}")]
    BlowUp { step: usize, time: f64, ratio: f64 },
    #[error("end time {t_end} is not within 0.1% of a multiple of the outer step {step}")]
    StepMismatch { t_end: f64, step: f64 },
    #[error("end time must be finite and non-negative, got {0}")]
    EndTime(f64),
    #[error("initial state has length {got}, system expects {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("invalid butcher tableau: {0}")]
    Tableau(String),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Explicit Runge–Kutta tableau `(A, b, c)` with strictly lower triangular `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl ButcherTableau {
    /// Validated tableau: square strictly lower triangular `A`, `Σ b = 1`,
    /// `c_s = Σ_m a_sm`, and positive `c_s` for every stage after the first.
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Result<Self, IntegrationError> {
        let s = b.len();
        if s == 0 || a.len() != s || c.len() != s {
            return Err(IntegrationError::Tableau("stage counts differ".into()));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != s {
                return Err(IntegrationError::Tableau(format!("row {i} has length {}", row.len())));
            }
            if row[i..].iter().any(|&x| x != 0.0) {
                return Err(IntegrationError::Tableau(format!(
                    "row {i} is not strictly lower triangular"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - c[i]).abs() > 1e-14 {
                return Err(IntegrationError::Tableau(format!(
                    "c_{i} = {} differs from the row sum {sum}",
                    c[i]
                )));
            }
            if i > 0 && !(c[i] > 0.0) {
                return Err(IntegrationError::Tableau(format!("c_{i} must be positive")));
            }
        }
        if (b.iter().sum::<f64>() - 1.0).abs() > 1e-14 {
            return Err(IntegrationError::Tableau("weights do not sum to one".into()));
        }
        Ok(Self { a, b, c })
    }

    /// Forward Euler.
    pub fn forward_euler() -> Self {
        Self {
            a: vec![vec![0.0]],
            b: vec![1.0],
            c: vec![0.0],
        }
    }

    /// Explicit midpoint rule.
    pub fn rk2() -> Self {
        Self {
            a: vec![vec![0.0, 0.0], vec![0.5, 0.0]],
            b: vec![0.0, 1.0],
            c: vec![0.0, 0.5],
        }
    }

    /// Classical fourth-order Runge–Kutta.
    pub fn rk4() -> Self {
        Self {
            a: vec![
                vec![0.0, 0.0, 0.0, 0.0],
                vec![0.5, 0.0, 0.0, 0.0],
                vec![0.0, 0.5, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            b: vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            c: vec![0.0, 0.5, 0.5, 1.0],
        }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }
}

/// One completed step of a projective level, reported to the trace callback.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEvent {
    /// Level index (1 for the first projective level, `L` for outer steps).
    pub level: usize,
    /// Time at the end of the step.
    pub time: f64,
}

/// Stateful telescopic projective integrator for one system and schedule.
pub struct TpiIntegrator<'a, S: SemiDiscrete> {
    system: &'a S,
    schedule: TpiSchedule,
    tableau: ButcherTableau,
    rhs: Vec<f64>,
    prev: Vec<Vec<f64>>,
    counts: Vec<usize>,
    starts: Vec<f64>,
    work: Vec<f64>,
    before_last: Vec<f64>,
    base: Vec<f64>,
    stage_diff: Vec<Vec<f64>>,
    rhs_calls: u64,
    trace: Option<Box<dyn FnMut(TraceEvent) + 'a>>,
}

impl<'a, S: SemiDiscrete> TpiIntegrator<'a, S> {
    pub fn new(system: &'a S, schedule: TpiSchedule) -> Self {
        let n = system.len();
        let levels = schedule.levels();
        let tableau = schedule.outer().tableau();
        let stages = tableau.stages();
        Self {
            system,
            tableau,
            rhs: vec![0.0; n],
            prev: vec![vec![0.0; n]; levels],
            counts: vec![0; levels],
            starts: vec![0.0; levels],
            work: vec![0.0; n],
            before_last: vec![0.0; n],
            base: vec![0.0; n],
            stage_diff: vec![vec![0.0; n]; stages],
            rhs_calls: 0,
            trace: None,
            schedule,
        }
    }

    /// Installs a callback invoked after every projective step of every level.
    pub fn with_trace(mut self, f: impl FnMut(TraceEvent) + 'a) -> Self {
        self.trace = Some(Box::new(f));
        self
    }

    pub fn schedule(&self) -> &TpiSchedule {
        &self.schedule
    }

    /// Number of right-hand side evaluations so far.
    pub fn rhs_calls(&self) -> u64 {
        self.rhs_calls
    }

    /// One forward Euler step of size `h0` at time `t`.
    pub fn inner_fe_step(&mut self, f: &mut [f64], t: f64) -> Result<(), SystemError> {
        self.system.rhs(t, f, &mut self.rhs)?;
        self.rhs_calls += 1;
        let h = self.schedule.h0();
        for (x, d) in f.iter_mut().zip(&self.rhs) {
            *x += h * d;
        }
        Ok(())
    }

    /// Advances `f` by one step of level `level` (`0 ≤ level < L`) from time `t0`.
    pub fn level_step(&mut self, level: usize, f: &mut [f64], t0: f64) -> Result<(), SystemError> {
        if level == 0 {
            return self.inner_fe_step(f, t0);
        }
        let h0 = self.schedule.h0();
        self.counts[level] = 0;
        self.starts[level] = t0;
        let mut lvl = level;
        let mut t = t0;
        loop {
            if lvl == 0 {
                self.inner_fe_step(f, t)?;
                t += h0;
                lvl = 1;
                continue;
            }
            let k = self.schedule.k()[lvl - 1];
            if self.counts[lvl] <= k {
                if self.counts[lvl] == k {
                    self.prev[lvl].copy_from_slice(f);
                }
                self.counts[lvl] += 1;
                lvl -= 1;
                if lvl >= 1 {
                    self.counts[lvl] = 0;
                    self.starts[lvl] = t;
                }
            } else {
                let m = self.schedule.m()[lvl - 1];
                for (x, p) in f.iter_mut().zip(&self.prev[lvl]) {
                    *x += m * (*x - p);
                }
                t = self.starts[lvl] + self.schedule.steps()[lvl];
                if let Some(tr) = self.trace.as_mut() {
                    tr(TraceEvent { level: lvl, time: t });
                }
                if lvl == level {
                    return Ok(());
                }
                lvl += 1;
            }
        }
    }

    /// Runs `K + 1` steps of level `L - 1` on `work` from time `t0`, leaving
    /// the last two states in `before_last` and `work`.
    fn inner_burst(&mut self, t0: f64) -> Result<(), SystemError> {
        let inner = self.schedule.levels() - 1;
        let k = self.schedule.k()[inner];
        let h = self.schedule.steps()[inner];
        let mut work = std::mem::take(&mut self.work);
        let result = (|| {
            for i in 0..=k {
                if i == k {
                    self.before_last.copy_from_slice(&work);
                }
                self.level_step(inner, &mut work, t0 + i as f64 * h)?;
            }
            Ok(())
        })();
        self.work = work;
        result
    }

    /// One outer step of size `h_L` starting at time `t0`.
    pub fn outer_step(&mut self, f: &mut [f64], t0: f64) -> Result<(), SystemError> {
        let inner = self.schedule.levels() - 1;
        let k = self.schedule.k()[inner] as f64;
        let m = self.schedule.m()[inner];
        let h_outer = self.schedule.outer_step();
        let stages = self.tableau.stages();
        for s in 0..stages {
            let c = self.tableau.c()[s];
            if s == 0 {
                self.work.copy_from_slice(f);
            } else {
                let coef = (c * (m + k + 1.0) - (k + 1.0)) / c;
                let weights: Vec<f64> = (0..s).map(|j| coef * self.tableau.a()[s][j]).collect();
                for i in 0..self.work.len() {
                    let mut acc = 0.0;
                    for (j, w) in weights.iter().enumerate() {
                        if *w != 0.0 {
                            acc += w * self.stage_diff[j][i];
                        }
                    }
                    self.work[i] = self.base[i] + acc;
                }
            }
            self.inner_burst(t0 + c * h_outer)?;
            if s == 0 {
                self.base.copy_from_slice(&self.work);
            }
            for ((d, w), b) in self.stage_diff[s].iter_mut().zip(&self.work).zip(&self.before_last) {
                *d = w - b;
            }
        }
        for (i, (x, base)) in f.iter_mut().zip(&self.base).enumerate() {
            let mut acc = 0.0;
            for (j, b) in self.tableau.b().iter().enumerate() {
                if *b != 0.0 {
                    acc += b * self.stage_diff[j][i];
                }
            }
            *x = base + m * acc;
        }
        if let Some(tr) = self.trace.as_mut() {
            tr(TraceEvent {
                level: inner + 1,
                time: t0 + h_outer,
            });
        }
        Ok(())
    }
}

/// Settings for [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateOptions {
    /// Store a snapshot every this many outer steps (0 stores only the ends).
    pub snapshot_every: usize,
    /// Stop with [`IntegrationError::BlowUp`] when the sup norm exceeds
    /// [`BLOW_UP_FACTOR`] times its initial value.
    pub detect_blow_up: bool,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            snapshot_every: 0,
            detect_blow_up: true,
        }
    }
}

/// Stored state at one outer time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub state: Vec<f64>,
}

/// Result of an integration run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Schedule actually used, after any end-time adjustment.
    pub schedule: TpiSchedule,
    pub steps: usize,
    /// Observables after every outer step, starting with the initial state.
    pub observables: Vec<(f64, Observables)>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: Vec<f64>,
    pub final_time: f64,
    pub rhs_calls: u64,
}

/// Number of outer steps and adjusted step for reaching `t_end`.
fn step_count(t_end: f64, h: f64) -> Result<(usize, f64), IntegrationError> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(IntegrationError::EndTime(t_end));
    }
    if t_end == 0.0 {
        return Ok((0, h));
    }
    let n = (t_end / h).round().max(1.0);
    let adjusted = t_end / n;
    if (adjusted - h).abs() > MAX_STEP_ADJUSTMENT * h {
        return Err(IntegrationError::StepMismatch { t_end, step: h });
    }
    Ok((n as usize, adjusted))
}

fn sup_norm(y: &[f64]) -> f64 {
    y.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Integrates `f0` to `t_end` with the projective hierarchy of `schedule`.
///
/// When `t_end` is not a multiple of the outer step, `M_{L-1}` is adjusted
/// so that it is, provided the step changes by at most 0.1%.
pub fn integrate<S: SemiDiscrete>(
    system: &S,
    f0: &[f64],
    schedule: &TpiSchedule,
    t_end: f64,
    options: &IntegrateOptions,
) -> Result<Trajectory, IntegrationError> {
    if f0.len() != system.len() {
        return Err(IntegrationError::StateLength {
            expected: system.len(),
            got: f0.len(),
        });
    }
    let (n, h) = step_count(t_end, schedule.outer_step())?;
    let schedule = if h == schedule.outer_step() {
        schedule.clone()
    } else {
        schedule.with_outer_step(h)?
    };
    let mut integrator = TpiIntegrator::new(system, schedule.clone());
    let h_outer = schedule.outer_step();
    run(system, f0, n, h_outer, options, |f, t| integrator.outer_step(f, t)).map(
        |(observables, snapshots, state, time)| Trajectory {
            rhs_calls: integrator.rhs_calls(),
            schedule,
            steps: n,
            observables,
            snapshots,
            final_state: state,
            final_time: time,
        },
    )
}

/// Observables at every outer time, paired with the time.
pub type ObservableSeries = Vec<(f64, Observables)>;

type RunOutput = (ObservableSeries, Vec<Snapshot>, Vec<f64>, f64);

fn run<S: SemiDiscrete>(
    system: &S,
    f0: &[f64],
    n: usize,
    h: f64,
    options: &IntegrateOptions,
    mut step: impl FnMut(&mut [f64], f64) -> Result<(), SystemError>,
) -> Result<RunOutput, IntegrationError> {
    let mut f = f0.to_vec();
    let initial_sup = sup_norm(f0);
    let mut observables = vec![(0.0, system.observe(&f))];
    let mut snapshots = vec![Snapshot {
        step: 0,
        time: 0.0,
        state: f.clone(),
    }];
    let mut time = 0.0;
    for i in 0..n {
        let t0 = i as f64 * h;
        step(&mut f, t0).map_err(|source| IntegrationError::System { step: i + 1, source })?;
        time = (i + 1) as f64 * h;
        let obs = system.observe(&f);
        if options.detect_blow_up && initial_sup > 0.0 && !(obs.sup_norm <= BLOW_UP_FACTOR * initial_sup) {
            return Err(IntegrationError::BlowUp {
                step: i + 1,
                time,
                ratio: obs.sup_norm / initial_sup,
            });
        }
        observables.push((time, obs));
        let last = i + 1 == n;
        if last || (options.snapshot_every > 0 && (i + 1) % options.snapshot_every == 0) {
            snapshots.push(Snapshot {
                step: i + 1,
                time,
                state: f.clone(),
            });
        }
    }
    Ok((observables, snapshots, f, time))
}

/// One explicit Runge–Kutta step of size `h`.
pub fn rk_step<S: SemiDiscrete>(
    system: &S,
    tableau: &ButcherTableau,
    f: &mut [f64],
    t: f64,
    h: f64,
    scratch: &mut [Vec<f64>],
) -> Result<(), SystemError> {
    let n = f.len();
    let s = tableau.stages();
    let (stages, rest) = scratch.split_at_mut(s);
    let tmp = &mut rest[0];
    for st in 0..s {
        tmp.copy_from_slice(f);
        for (j, a) in tableau.a()[st].iter().enumerate().take(st) {
            if *a != 0.0 {
                for i in 0..n {
                    tmp[i] += h * a * stages[j][i];
                }
            }
        }
        system.rhs(t + tableau.c()[st] * h, tmp, &mut stages[st])?;
    }
    for (j, b) in tableau.b().iter().enumerate() {
        if *b != 0.0 {
            for i in 0..n {
                f[i] += h * b * stages[j][i];
            }
        }
    }
    Ok(())
}

/// Integrates with a plain explicit Runge–Kutta method and fixed step `h`
/// (adjusted by at most 0.1% to land on `t_end`).
pub fn integrate_explicit<S: SemiDiscrete>(
    system: &S,
    f0: &[f64],
    tableau: &ButcherTableau,
    h: f64,
    t_end: f64,
    options: &IntegrateOptions,
) -> Result<(Vec<f64>, ObservableSeries), IntegrationError> {
    if f0.len() != system.len() {
        return Err(IntegrationError::StateLength {
            expected: system.len(),
            got: f0.len(),
        });
    }
    let (n, h) = step_count(t_end, h)?;
    let mut scratch = vec![vec![0.0; f0.len()]; tableau.stages() + 1];
    let (observables, _, state, _) = run(system, f0, n, h, options, |f, t| {
        rk_step(system, tableau, f, t, h, &mut scratch)
    })?;
    Ok((state, observables))
}
