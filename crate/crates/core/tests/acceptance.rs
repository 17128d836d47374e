//! Acceptance suite: runs every criterion, prints one PASS/FAIL line per
//! criterion and fails if any criterion fails.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use tpi_core::experiments::{initial_density, run_experiment, ExperimentConfig, InitialDensity};
use tpi_core::integrators::TpiIntegrator;
use tpi_core::quadrature::gauss_hermite_1d;
use tpi_core::spatial::{SchemeId, SpaceGrid};
use tpi_core::spectrum::{dominant_expansion, full_spectrum, SpectrumReport};
use tpi_core::system::{CollisionKind, CollisionModel, PiecewiseProfile, SemiDiscrete, SystemError};
use tpi_core::tpi_params::{
    amplification, select_clustered, select_zero_one_stable, table_max_m, zero_one_stable_schedule, OuterMethod,
    TpiSchedule, DEFAULT_M_MIN,
};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: String, failures: &mut Vec<String>) {
    if !cond {
        failures.push(msg);
    }
}

fn finish(summary: String, failures: Vec<String>) -> Outcome {
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", failures.join("; ")))
    }
}

fn profile_report(levels: &[f64], eps: f64) -> SpectrumReport {
    let model = CollisionModel::new(CollisionKind::Profile(PiecewiseProfile::uniform(levels.to_vec())), eps).unwrap();
    let sgrid = SpaceGrid::from_spacing(1, 0.01).unwrap();
    let vgrid = gauss_hermite_1d(10).unwrap();
    full_spectrum(&model, SchemeId::Upwind1, &sgrid, &vgrid, None).unwrap()
}

type Criterion = (usize, &'static str, fn() -> Outcome);

fn close_all(got: &[f64], want: &[f64], tol: f64) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(g, w)| (g - w).abs() <= tol)
}

#[allow(clippy::too_many_arguments)]
fn golden(
    levels: &[f64],
    eps: f64,
    outer: OuterMethod,
    k: &[usize],
    m: &[f64],
    m_tol: f64,
    cfl: f64,
    cfl_tol: f64,
) -> Outcome {
    let start = Instant::now();
    let report = profile_report(levels, eps);
    let sel = select_clustered(&report, DEFAULT_M_MIN, outer).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let s = &sel.schedule;
    let got_cfl = s.cfl().unwrap_or(f64::NAN);
    let summary = format!(
        "L={} K={:?} M={:?} CFL={got_cfl:.4} ({elapsed:.2}s)",
        s.levels(),
        s.k(),
        round(s.m())
    );
    let mut failures = Vec::new();
    check(s.k() == k, format!("K expected {k:?}"), &mut failures);
    check(
        close_all(s.m(), m, m_tol),
        format!("M expected {m:?} ± {m_tol}"),
        &mut failures,
    );
    check(
        (got_cfl - cfl).abs() <= cfl_tol,
        format!("CFL expected {cfl} ± {cfl_tol}"),
        &mut failures,
    );
    check(elapsed < 60.0, "runtime above one minute".into(), &mut failures);
    finish(summary, failures)
}

fn round(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e4).round() / 1e4).collect()
}

fn criterion_1() -> Outcome {
    golden(
        &[1.0, 0.1],
        1e-5,
        OuterMethod::Pfe,
        &[1, 2],
        &[9.0, 75.82],
        0.05,
        0.87,
        0.01,
    )
}

fn criterion_2() -> Outcome {
    golden(
        &[1.0, 0.9, 0.15, 0.1, 0.01, 0.001],
        1e-5,
        OuterMethod::Pfe,
        &[2, 3],
        &[5.67, 12.09],
        0.05,
        0.14,
        0.01,
    )
}

fn criterion_3() -> Outcome {
    golden(
        &[1.0, 0.2, 0.01, 0.002],
        1e-6,
        OuterMethod::Prk4,
        &[1, 1, 1, 4],
        &[4.00, 15.81, 3.74, 13.88],
        0.05,
        1.16,
        0.02,
    )
}

fn zero_one_case(eps: f64, k: usize, levels: usize, m: &[f64], failures: &mut Vec<String>) -> String {
    let grid = SpaceGrid::from_spacing(1, 0.01).unwrap();
    let rho0 = initial_density(&InitialDensity::Gaussian1d, &grid);
    let model = CollisionModel::new(CollisionKind::Density, eps).unwrap();
    match select_zero_one_stable(&model, &rho0, k, 0.4, 0.01, OuterMethod::Prk4) {
        Ok(s) => {
            check(
                s.levels() == levels,
                format!("eps={eps}: L expected {levels}"),
                failures,
            );
            check(
                close_all(s.m(), m, 0.01),
                format!("eps={eps}: M expected {m:?} ± 0.01"),
                failures,
            );
            format!("eps={eps}: L={} M={:?}", s.levels(), round(s.m()))
        }
        Err(e) => {
            failures.push(format!("eps={eps}: {e}"));
            String::new()
        }
    }
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let a = zero_one_case(1e-5, 6, 2, &[14.24, 11.79], &mut failures);
    let b = zero_one_case(1e-6, 3, 4, &[6.66, 6.26, 2.06, 2.03], &mut failures);
    let table = [2.0, 3.0, 6.66, 8.32, 12.21, 14.24, 18.21, 20.48, 24.48, 26.91];
    for (i, want) in table.iter().enumerate() {
        let got = table_max_m(i + 1).map_err(|e| e.to_string())?;
        check(
            got == *want,
            format!("table K={} gives {got}, expected {want}", i + 1),
            &mut failures,
        );
    }
    finish(format!("{a}; {b}; table K=1..10 checked"), failures)
}

fn criterion_5() -> Outcome {
    let report = profile_report(&[1.0, 0.2, 0.01, 0.002], 1e-6);
    let outside = report.containment_violations(1e-6);
    let mut failures = Vec::new();
    check(
        (report.fast_radius - 971.89).abs() <= 0.5,
        "R_f outside 971.89 ± 0.5".into(),
        &mut failures,
    );
    check(
        outside.is_empty(),
        format!("{} eigenvalues outside the disk union", outside.len()),
        &mut failures,
    );
    finish(
        format!(
            "R_f={:.4}, {} eigenvalues, {} outside disks",
            report.fast_radius,
            report.eigenvalues.len(),
            outside.len()
        ),
        failures,
    )
}

fn criterion_6() -> Outcome {
    let sgrid = SpaceGrid::from_spacing(1, 0.01).unwrap();
    let vgrid = gauss_hermite_1d(10).unwrap();
    let mut failures = Vec::new();
    let mut ratios_out = Vec::new();
    for mode in [5usize, 20, 50] {
        let zeta = sgrid.zeta(mode);
        let errs: Vec<f64> = (0..4)
            .map(|h| {
                let eps = 1e-4 / 2f64.powi(h);
                let model = CollisionModel::new(CollisionKind::Constant(1.0), eps).unwrap();
                let report = full_spectrum(&model, SchemeId::Upwind1, &sgrid, &vgrid, None).unwrap();
                let qr = report.dominant[mode - 1];
                let exp = dominant_expansion(1.0, eps, [zeta, 0.0], SchemeId::Upwind1, &sgrid, &vgrid).unwrap();
                (exp - qr).norm()
            })
            .collect();
        let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
        for r in &ratios {
            check(
                (3.0..=5.0).contains(r),
                format!("mode {mode}: error ratio {r:.3} not near 4"),
                &mut failures,
            );
        }
        ratios_out.push(format!("mode {mode}: {:?}", round(&ratios)));
    }
    finish(format!("error ratios per halving: {}", ratios_out.join(", ")), failures)
}

struct Rotation {
    lambda: Complex64,
}

impl SemiDiscrete for Rotation {
    fn len(&self) -> usize {
        2
    }

    fn rhs(&self, _t: f64, y: &[f64], out: &mut [f64]) -> Result<(), SystemError> {
        out[0] = self.lambda.re * y[0] - self.lambda.im * y[1];
        out[1] = self.lambda.im * y[0] + self.lambda.re * y[1];
        Ok(())
    }
}

fn criterion_7() -> Outcome {
    let schedules = [
        TpiSchedule::new(1e-5, vec![1, 2], vec![9.0, 75.82], OuterMethod::Pfe).unwrap(),
        TpiSchedule::new(1e-5, vec![2, 3], vec![5.67, 12.09], OuterMethod::Prk2).unwrap(),
        TpiSchedule::new(1e-6, vec![1, 1, 1, 4], vec![4.0, 15.81, 3.74, 13.88], OuterMethod::Prk4).unwrap(),
        zero_one_stable_schedule(1e-5, 5, 2.5e-3, OuterMethod::Prk4).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    let mut bad_radius: f64 = 0.0;
    for i in 0..1000 {
        let sched = &schedules[i % schedules.len()];
        let r = rng.random::<f64>().sqrt();
        let th = rng.random::<f64>() * std::f64::consts::TAU;
        let sigma0 = Complex64::from_polar(r, th);
        let sys = Rotation {
            lambda: (sigma0 - 1.0) / sched.h0(),
        };
        let mut it = TpiIntegrator::new(&sys, sched.clone());
        let mut f = vec![1.0, 0.0];
        it.outer_step(&mut f, 0.0).map_err(|e| e.to_string())?;
        let got = Complex64::new(f[0], f[1]);
        let want = amplification(sched, sigma0);
        let rel = (got - want).norm() / want.norm();
        worst = worst.max(rel);
        if !(rel <= 1e-13) {
            bad += 1;
            bad_radius = bad_radius.max(r);
        }
    }
    let summary = format!("1000 samples over 4 schedules, worst relative deviation {worst:.2e}");
    if bad == 0 {
        Ok(summary)
    } else {
        Err(format!(
            "{summary}; {bad} samples above 1e-13, all with |σ₀| ≤ {bad_radius:.3}"
        ))
    }
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut results = Vec::new();
    for scheme in SchemeId::ALL {
        let cfg = ExperimentConfig::step_profile_benchmark(scheme);
        let out = run_experiment(&cfg).map_err(|e| format!("{scheme}: {e}"))?;
        results.push((scheme, out));
    }
    let sched = results[0].1.trajectory.schedule.clone();
    check(
        sched.levels() == 2 && sched.k() == [5, 5],
        format!("schedule L={} K={:?}", sched.levels(), sched.k()),
        &mut failures,
    );
    check(
        close_all(sched.m(), &[12.21, 7.73], 0.05),
        format!("M={:?} expected [12.21, 7.73]", sched.m()),
        &mut failures,
    );
    let get = |s: SchemeId| &results.iter().find(|r| r.0 == s).unwrap().1;
    for (scheme, out) in &results {
        check(
            (out.trajectory.final_time - 1.0).abs() < 1e-12,
            format!("{scheme} stopped at t={}", out.trajectory.final_time),
            &mut failures,
        );
    }
    let u1 = &get(SchemeId::Upwind1).errors;
    check(
        u1.min_density >= -1e-10 && u1.max_density <= 1.0 + 1e-10,
        format!(
            "upwind1 density range [{:.6}, {:.6}] violates the maximum principle",
            u1.min_density, u1.max_density
        ),
        &mut failures,
    );
    let w3 = &get(SchemeId::Weno3).errors;
    check(
        w3.l1 < u1.l1,
        format!("weno3 L1 {:.4e} not below upwind1 L1 {:.4e}", w3.l1, u1.l1),
        &mut failures,
    );
    for s in [SchemeId::Upwind2, SchemeId::Upwind3] {
        let m = get(s).errors.max_density;
        check(m > 1.01, format!("{s} max {m:.6} shows no overshoot"), &mut failures);
    }
    for s in [SchemeId::Weno2, SchemeId::Weno3] {
        let m = get(s).errors.max_density;
        check(m <= 1.001, format!("{s} max {m:.6} above 1.001"), &mut failures);
    }
    let maxima: Vec<String> = results
        .iter()
        .map(|(s, o)| format!("{s} {:.4}", o.errors.max_density))
        .collect();
    finish(
        format!(
            "M={:?}, L1 upwind1 {:.4e} weno3 {:.4e}, max density {} ({:.1}s)",
            round(sched.m()),
            u1.l1,
            w3.l1,
            maxima.join(", "),
            start.elapsed().as_secs_f64()
        ),
        failures,
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig::gaussian_2d_benchmark(SchemeId::Upwind1);
    let out = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let grid = cfg.space_grid().unwrap();
    let sched = &out.trajectory.schedule;
    let (peak, _) =
        out.final_density.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
    let x = grid.center(peak);
    let dx = grid.dx();
    let mut failures = Vec::new();
    check(
        sched.levels() == 3 && sched.k() == [3, 3, 3],
        format!("schedule L={} K={:?}", sched.levels(), sched.k()),
        &mut failures,
    );
    check(
        close_all(sched.m(), &[6.66, 6.66, 4.81], 0.05),
        format!("M={:?}", sched.m()),
        &mut failures,
    );
    check(
        (out.trajectory.final_time - 1.0).abs() < 1e-12,
        "did not reach t=1".into(),
        &mut failures,
    );
    check(
        (x[0] - 0.5).abs() <= dx + 1e-12 && (x[1] - 0.5).abs() <= dx + 1e-12,
        format!("peak at {x:?}"),
        &mut failures,
    );
    check(
        out.errors.mass_drift.abs() <= 1e-8,
        format!("mass drift {:.3e}", out.errors.mass_drift),
        &mut failures,
    );
    finish(
        format!(
            "M={:?}, peak at ({:.2}, {:.2}), mass drift {:.2e} ({:.1}s)",
            round(sched.m()),
            x[0],
            x[1],
            out.errors.mass_drift,
            start.elapsed().as_secs_f64()
        ),
        failures,
    )
}

fn criterion_10() -> Outcome {
    let mut failures = Vec::new();
    let a = select_clustered(&profile_report(&[1.0, 0.1], 1e-5), DEFAULT_M_MIN, OuterMethod::Pfe)
        .map_err(|e| e.to_string())?;
    let b = select_clustered(&profile_report(&[1.0, 0.1], 1e-6), DEFAULT_M_MIN, OuterMethod::Pfe)
        .map_err(|e| e.to_string())?;
    let (sa, sb) = (&a.schedule, &b.schedule);
    check(sa.levels() == sb.levels(), "level count changed".into(), &mut failures);
    let inner = sa.levels() - 1;
    for l in 0..inner {
        let shift = (sb.m()[l] - sa.m()[l]).abs() / sa.m()[l];
        check(
            shift < 0.01,
            format!("M_{l} shifts by {:.3}%", 100.0 * shift),
            &mut failures,
        );
    }
    let scale = sb.m()[inner] / sa.m()[inner] / 10.0;
    check(
        (scale - 1.0).abs() <= 0.05,
        format!("outer M scales by {scale:.4} x 1/eps"),
        &mut failures,
    );
    let grid = SpaceGrid::from_spacing(1, 0.01).unwrap();
    let rho0 = initial_density(&InitialDensity::Gaussian1d, &grid);
    let mut ls = Vec::new();
    for p in 4..=9 {
        let eps = 10f64.powi(-p);
        let model = CollisionModel::new(CollisionKind::Density, eps).unwrap();
        let s = select_zero_one_stable(&model, &rho0, 3, 0.5, 0.01, OuterMethod::Prk4).map_err(|e| e.to_string())?;
        ls.push(s.levels());
    }
    let per_decade = 10f64.ln() / (tpi_core::tpi_params::zero_one_stable_max_m(3).unwrap() + 4.0).ln();
    for (i, w) in ls.windows(2).enumerate() {
        let step = w[1] as f64 - w[0] as f64;
        check(
            (step - per_decade).abs() <= 1.0,
            format!("L jumps by {step} at decade {}", i + 5),
            &mut failures,
        );
    }
    let total = (ls[ls.len() - 1] - ls[0]) as f64;
    check(
        (total - 5.0 * per_decade).abs() <= 1.0,
        format!("L grows by {total} over 5 decades, expected {:.2}", 5.0 * per_decade),
        &mut failures,
    );
    finish(
        format!(
            "inner M {:?} -> {:?}, outer M ratio {:.4}, L over eps=1e-4..1e-9: {ls:?}",
            round(&sa.m()[..inner]),
            round(&sb.m()[..inner]),
            sb.m()[inner] / sa.m()[inner]
        ),
        failures,
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        (1, "golden parameters, two-level clustered case", criterion_1),
        (2, "golden parameters, no-gap case", criterion_2),
        (3, "golden parameters, four-level case", criterion_3),
        (4, "[0,1]-stable schedules and table", criterion_4),
        (5, "spectrum radius and disk containment", criterion_5),
        (6, "dominant eigenvalue expansion", criterion_6),
        (7, "scalar equivalence of the integrator", criterion_7),
        (8, "1D step profile benchmark", criterion_8),
        (9, "2D Gaussian benchmark", criterion_9),
        (10, "epsilon independence", criterion_10),
    ];
    let mut failed = Vec::new();
    for (n, name, f) in criteria {
        match f() {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                println!("criterion {n:>2} FAIL  {name}: {detail}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
