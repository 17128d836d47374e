//! Implementations of the subcommands.

use crate::output::{num, write_csv, write_json, ObservableSummary, RunManifest};
use crate::SweepParam;
use rayon::prelude::*;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;
use tpi_core::experiments::{
    initial_density, plan_schedule, run_planned, ExperimentConfig, ExperimentError, ExperimentOutcome, PlannedSchedule,
};
use tpi_core::integrators::IntegrationError;
use tpi_core::spatial::SpaceGrid;
use tpi_core::spectrum::{full_spectrum, ClusterKind, SpectrumReport};
use tpi_core::tpi_params::verify_stability;

/// Settings shared by all commands.
pub struct Context {
    pub verbose: bool,
}

impl Context {
    fn note(&self, msg: impl fmt::Display) {
        if self.verbose {
            eprintln!("{msg}");
        }
    }
}

/// Command failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// I/O or any other failure (exit code 1).
    Other(anyhow::Error),
    /// Invalid configuration (exit code 3).
    Config(String),
    /// No feasible schedule (exit code 4).
    Schedule(String),
    /// The integration blew up or produced nonfinite values (exit code 5).
    BlowUp(String),
    /// Stability verification found violations (exit code 6).
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Other(_) => 1,
            CliError::Config(_) => 3,
            CliError::Schedule(_) => 4,
            CliError::BlowUp(_) => 5,
            CliError::Verify(_) => 6,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Other(e) => write!(f, "{e:#}"),
            CliError::Config(m) => write!(f, "config: {m}"),
            CliError::Schedule(m) | CliError::BlowUp(m) | CliError::Verify(m) => f.write_str(m),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Other(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Other(e.into())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        let msg = e.to_string();
        match e {
            ExperimentError::Config(_)
            | ExperimentError::UnknownDensity(_)
            | ExperimentError::Quadrature(_)
            | ExperimentError::Spatial(_)
            | ExperimentError::System(_) => CliError::Config(msg),
            ExperimentError::Schedule(_) => CliError::Schedule(msg),
            ExperimentError::Spectrum(_) => CliError::Other(anyhow::anyhow!(msg)),
            ExperimentError::Integration(i) => match i {
                IntegrationError::BlowUp { .. } | IntegrationError::System { .. } => CliError::BlowUp(msg),
                IntegrationError::Schedule(_) => CliError::Schedule(msg),
                IntegrationError::StepMismatch { .. } | IntegrationError::EndTime(_) => CliError::Config(msg),
                _ => CliError::Other(anyhow::anyhow!(msg)),
            },
        }
    }
}

type CmdResult = Result<(), CliError>;

type SweepResult = Result<(PlannedSchedule, ExperimentOutcome), CliError>;

fn load(path: &Path) -> Result<(String, ExperimentConfig), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Other(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
    let cfg = ExperimentConfig::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok((text, cfg))
}

fn prepare(out: &Path) -> CmdResult {
    fs::create_dir_all(out).map_err(|e| CliError::Other(anyhow::anyhow!("cannot create {}: {e}", out.display())))
}

/// Runs `body` and writes `manifest.json` afterwards, whatever the outcome.
fn with_manifest(
    ctx: &Context,
    command: &str,
    config: &Path,
    out: PathBuf,
    body: impl FnOnce(&ExperimentConfig, &Path, &mut RunManifest) -> CmdResult,
) -> CmdResult {
    let start = Instant::now();
    let text = fs::read_to_string(config).unwrap_or_default();
    let mut manifest = RunManifest::new(command, config, &text);
    let result = load(config).and_then(|(_, cfg)| {
        prepare(&out)?;
        body(&cfg, &out, &mut manifest)
    });
    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    match &result {
        Ok(()) => manifest.status = "ok".into(),
        Err(e) => {
            manifest.status = "failed".into();
            manifest.error = Some(e.to_string());
        }
    }
    if out.is_dir() {
        let path = out.join("manifest.json");
        if let Err(e) = write_json(&path, &manifest) {
            eprintln!("warning: could not write the manifest: {e:#}");
        } else {
            ctx.note(format!("manifest written to {}", path.display()));
        }
    }
    result
}

fn initial(cfg: &ExperimentConfig) -> Result<(SpaceGrid, Vec<f64>), CliError> {
    let grid = cfg.space_grid()?;
    let rho0 = initial_density(&cfg.initial()?, &grid);
    Ok((grid, rho0))
}

fn compute_spectrum(cfg: &ExperimentConfig) -> Result<SpectrumReport, CliError> {
    let (grid, rho0) = initial(cfg)?;
    let vgrid = cfg.velocity_grid()?;
    let model = cfg.collision_model().map_err(ExperimentError::from)?;
    full_spectrum(&model, cfg.scheme.spatial, &grid, &vgrid, Some(&rho0)).map_err(|e| ExperimentError::from(e).into())
}

fn plan_for(ctx: &Context, cfg: &ExperimentConfig) -> Result<PlannedSchedule, CliError> {
    let (_, rho0) = initial(cfg)?;
    let planned = plan_schedule(cfg, &rho0)?;
    for w in &planned.warnings {
        eprintln!("warning: {w}");
    }
    ctx.note(format!("schedule ({}):\n{}", cfg.schedule.method, planned.schedule));
    Ok(planned)
}

fn schedule_json(planned: &PlannedSchedule) -> Option<serde_json::Value> {
    serde_json::to_value(planned.schedule.dump()).ok()
}

/// `tpi spectrum`: eigenvalue and cluster tables.
pub fn spectrum(ctx: &Context, config: &Path, out: PathBuf) -> CmdResult {
    with_manifest(ctx, "spectrum", config, out, |cfg, out, manifest| {
        let report = compute_spectrum(cfg)?;
        let rows = report.eigenvalues.iter().map(|e| {
            vec![
                e.mode.to_string(),
                e.level.to_string(),
                num(report.levels[e.level].omega),
                num(e.value.re),
                num(e.value.im),
                e.dominant.to_string(),
                e.cluster.to_string(),
            ]
        });
        let p = write_csv(
            &out.join("eigenvalues.csv"),
            &["mode", "level", "omega", "re", "im", "dominant", "cluster"],
            rows,
        )?;
        manifest.add_output(&p);
        let rows = report.clusters.iter().enumerate().map(|(i, c)| {
            vec![
                i.to_string(),
                kind_name(c.kind).to_string(),
                num(c.center),
                num(c.radius),
                c.count.to_string(),
                c.levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(";"),
            ]
        });
        let p = write_csv(
            &out.join("clusters.csv"),
            &["cluster", "kind", "center", "radius", "count", "levels"],
            rows,
        )?;
        manifest.add_output(&p);
        let fast = report.fast_clusters().count();
        let slow = report.clusters.len() - fast;
        let absorbed = report.slow_cluster().map(|c| c.levels.len()).unwrap_or(0);
        let containment = report.containment_violations(1e-6).len();
        let summary = serde_json::json!({
            "epsilon": report.epsilon,
            "dx": report.dx,
            "scheme": report.scheme.to_string(),
            "continuous": report.continuous,
            "levels": report.levels.len(),
            "fast_radius": report.fast_radius,
            "fast_clusters": fast,
            "slow_clusters": slow,
            "levels_in_slow_cluster": absorbed,
            "gap_ratios": report.gap_ratios,
            "containment_violations": containment,
            "right_half_plane": report.right_half_plane(1e-8).len(),
        });
        let p = write_json(&out.join("summary.json"), &summary)?;
        manifest.add_output(&p);
        println!("levels: {}", report.levels.len());
        println!("fast clusters: {fast}");
        println!("slow clusters: {slow}");
        if absorbed > 0 {
            println!("levels absorbed into the slow cluster: {absorbed}");
        }
        println!("fast radius R_f: {}", num(report.fast_radius));
        println!(
            "classification: {}",
            if report.continuous { "continuous" } else { "clustered" }
        );
        println!("containment violations: {containment}");
        Ok(())
    })
}

fn kind_name(k: ClusterKind) -> &'static str {
    match k {
        ClusterKind::Fast => "fast",
        ClusterKind::Slow => "slow",
    }
}

/// `tpi plan`: schedule dump.
pub fn plan(ctx: &Context, config: &Path, out: PathBuf) -> CmdResult {
    with_manifest(ctx, "plan", config, out, |cfg, out, manifest| {
        let planned = plan_for(ctx, cfg)?;
        manifest.schedule = schedule_json(&planned);
        let p = write_json(&out.join("schedule.json"), &planned.schedule.dump())?;
        manifest.add_output(&p);
        print!("{}", planned.schedule);
        Ok(())
    })
}

/// `tpi run`: integrate and write snapshots, observables and errors.
pub fn run(ctx: &Context, config: &Path, out: PathBuf) -> CmdResult {
    with_manifest(ctx, "run", config, out, |cfg, out, manifest| {
        let planned = plan_for(ctx, cfg)?;
        manifest.schedule = schedule_json(&planned);
        let p = write_json(&out.join("schedule.json"), &planned.schedule.dump())?;
        manifest.add_output(&p);
        let outcome = run_planned(cfg, &planned)?;
        for p in write_run_outputs(cfg, out, &outcome)? {
            manifest.add_output(&p);
        }
        let obs = &outcome.trajectory.observables;
        manifest.observables = Some(ObservableSummary {
            steps: outcome.trajectory.steps,
            initial_mass: obs[0].1.mass,
            final_mass: obs[obs.len() - 1].1.mass,
            min_density: outcome.errors.min_density,
            max_density: outcome.errors.max_density,
            max_sup_norm: obs.iter().map(|o| o.1.sup_norm).fold(0.0, f64::max),
        });
        ctx.note(format!(
            "{} outer steps, {} right-hand side evaluations",
            outcome.trajectory.steps, outcome.trajectory.rhs_calls
        ));
        println!("t_end: {}", num(outcome.trajectory.final_time));
        println!("L1 error: {}", num(outcome.errors.l1));
        println!("L2 error: {}", num(outcome.errors.l2));
        println!("Linf error: {}", num(outcome.errors.linf));
        println!("mass drift: {}", num(outcome.errors.mass_drift));
        println!(
            "density range: [{}, {}]",
            num(outcome.errors.min_density),
            num(outcome.errors.max_density)
        );
        Ok(())
    })
}

fn write_run_outputs(
    cfg: &ExperimentConfig,
    out: &Path,
    outcome: &ExperimentOutcome,
) -> Result<Vec<PathBuf>, CliError> {
    let grid = cfg.space_grid()?;
    let vgrid = cfg.velocity_grid()?;
    let mut paths = Vec::new();
    let mut rows = Vec::new();
    for s in &outcome.trajectory.snapshots {
        let rho = tpi_core::system::density(&s.state, vgrid.weights());
        for (c, r) in rho.iter().enumerate() {
            let x = grid.center(c);
            rows.push(vec![
                s.step.to_string(),
                num(s.time),
                c.to_string(),
                num(x[0]),
                num(x[1]),
                num(*r),
            ]);
        }
    }
    paths.push(write_csv(
        &out.join("snapshots.csv"),
        &["step", "time", "cell", "x", "y", "density"],
        rows,
    )?);
    let rows = outcome.trajectory.observables.iter().enumerate().map(|(i, (t, o))| {
        vec![
            i.to_string(),
            num(*t),
            num(o.mass),
            num(o.min_density),
            num(o.max_density),
            num(o.sup_norm),
        ]
    });
    paths.push(write_csv(
        &out.join("observables.csv"),
        &["step", "time", "mass", "min_density", "max_density", "sup_norm"],
        rows,
    )?);
    let rows = (0..grid.num_cells()).map(|c| {
        let x = grid.center(c);
        vec![
            c.to_string(),
            num(x[0]),
            num(x[1]),
            num(outcome.initial_density[c]),
            num(outcome.final_density[c]),
            num(outcome.reference[c]),
        ]
    });
    paths.push(write_csv(
        &out.join("final.csv"),
        &["cell", "x", "y", "initial", "density", "reference"],
        rows,
    )?);
    paths.push(write_json(&out.join("errors.json"), &outcome.errors)?);
    Ok(paths)
}

/// `tpi verify`: amplification of every eigenvalue under the configured schedule.
pub fn verify(ctx: &Context, config: &Path, out: PathBuf) -> CmdResult {
    with_manifest(ctx, "verify", config, out, |cfg, out, manifest| {
        let planned = plan_for(ctx, cfg)?;
        manifest.schedule = schedule_json(&planned);
        let report = compute_spectrum(cfg)?;
        let check = verify_stability(&planned.schedule, &report);
        let rows = check.violations.iter().map(|(e, s)| {
            vec![
                e.mode.to_string(),
                e.level.to_string(),
                num(e.value.re),
                num(e.value.im),
                num(s.re),
                num(s.im),
                num(s.norm()),
            ]
        });
        let p = write_csv(
            &out.join("violations.csv"),
            &[
                "mode",
                "level",
                "re",
                "im",
                "amplification_re",
                "amplification_im",
                "amplification_abs",
            ],
            rows,
        )?;
        manifest.add_output(&p);
        println!("eigenvalues checked: {}", report.eigenvalues.len());
        println!("max |amplification|: {}", num(check.max_amplification));
        if check.stable {
            println!("stable");
            Ok(())
        } else {
            Err(CliError::Verify(format!(
                "{} eigenvalues are amplified (max |amplification| = {})",
                check.violations.len(),
                check.max_amplification
            )))
        }
    })
}

/// `tpi sweep`: independent runs over a list of parameter values.
pub fn sweep(ctx: &Context, config: &Path, out: PathBuf, param: SweepParam, values: &[f64]) -> CmdResult {
    with_manifest(ctx, "sweep", config, out, |cfg, out, manifest| {
        let results: Vec<(f64, SweepResult)> = values
            .par_iter()
            .map(|&v| {
                let mut c = cfg.clone();
                match param {
                    SweepParam::Epsilon => c.problem.epsilon = v,
                    SweepParam::Dx => c.problem.dx = v,
                }
                let r = c.validate().map_err(|e| CliError::Config(e.to_string())).and_then(|_| {
                    let (_, rho0) = initial(&c)?;
                    let planned = plan_schedule(&c, &rho0)?;
                    let outcome = run_planned(&c, &planned)?;
                    Ok((planned, outcome))
                });
                (v, r)
            })
            .collect();
        let name = match param {
            SweepParam::Epsilon => "epsilon",
            SweepParam::Dx => "dx",
        };
        let rows = results.iter().map(|(v, r)| match r {
            Ok((p, o)) => {
                let s = &p.schedule;
                vec![
                    num(*v),
                    "ok".into(),
                    s.levels().to_string(),
                    s.k().iter().map(|k| k.to_string()).collect::<Vec<_>>().join(";"),
                    s.m().iter().map(|m| num(*m)).collect::<Vec<_>>().join(";"),
                    s.cfl().map(num).unwrap_or_default(),
                    num(o.errors.l1),
                    num(o.errors.l2),
                    num(o.errors.linf),
                    num(o.errors.mass_drift),
                    num(o.errors.min_density),
                    num(o.errors.max_density),
                    o.trajectory.rhs_calls.to_string(),
                    String::new(),
                ]
            }
            Err(e) => {
                let mut row = vec![num(*v), "failed".into()];
                row.extend(std::iter::repeat_n(String::new(), 11));
                row.push(e.to_string());
                row
            }
        });
        let p = write_csv(
            &out.join("sweep.csv"),
            &[
                name,
                "status",
                "levels",
                "k",
                "m",
                "cfl",
                "l1",
                "l2",
                "linf",
                "mass_drift",
                "min_density",
                "max_density",
                "rhs_calls",
                "error",
            ],
            rows,
        )?;
        manifest.add_output(&p);
        for (v, r) in &results {
            match r {
                Ok((_, o)) => println!("{name} = {}: L1 error {}", num(*v), num(o.errors.l1)),
                Err(e) => println!("{name} = {}: failed ({e})", num(*v)),
            }
        }
        ctx.note(format!("{} runs finished", results.len()));
        match results.into_iter().find_map(|(_, r)| r.err()) {
            Some(e) => Err(e),
            None => Ok(()),
        }
    })
}
