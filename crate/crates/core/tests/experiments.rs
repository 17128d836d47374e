//! End-to-end experiment runs: convergence under refinement, robustness in
//! `ε` and configuration handling.

use tpi_core::experiments::{
    initial_density, plan_schedule, run_experiment, ConfigError, ExperimentConfig, ExperimentError,
};
use tpi_core::spectrum::full_spectrum;
use tpi_core::tpi_params::verify_stability;

fn gaussian_config(dx: f64, scheme: &str, eps: f64, t_end: f64) -> ExperimentConfig {
    gaussian_config_with_cfl(dx, scheme, eps, t_end, 0.5)
}

fn gaussian_config_with_cfl(dx: f64, scheme: &str, eps: f64, t_end: f64, cfl: f64) -> ExperimentConfig {
    let text = format!(
        r#"
[problem]
dimension = 1
epsilon = {eps:e}
dx = {dx:e}
initial = "gaussian_1d"
t_end = {t_end:e}

[collision]
model = "constant"
value = 1.0

[scheme]
spatial = "{scheme}"

[schedule]
method = "zero_one_stable"
outer = "prk4"
k = 5
cfl = {cfl:e}
h0 = {eps:e}
"#
    );
    ExperimentConfig::from_toml(&text).unwrap()
}

/// L1 errors and observed orders over `Δx ∈ {1/100, 1/200, 1/400}` at `t = 0.05`. The
/// small outer step keeps the projective time error below the spatial error.
fn observed_orders(scheme: &str) -> (Vec<f64>, Vec<f64>) {
    let errors: Vec<f64> = [1.0 / 100.0, 1.0 / 200.0, 1.0 / 400.0]
        .iter()
        .map(|&dx| {
            run_experiment(&gaussian_config_with_cfl(dx, scheme, 1e-7, 0.05, 0.1))
                .unwrap()
                .errors
                .l1
        })
        .collect();
    let orders = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    (errors, orders)
}

#[test]
fn upwind1_converges_at_first_order() {
    let (errors, orders) = observed_orders("upwind1");
    for p in &orders {
        assert!(*p >= 0.9, "orders {orders:?} from L1 errors {errors:?}");
    }
}

#[test]
fn weno2_converges_at_second_order() {
    let (errors, orders) = observed_orders("weno2");
    for p in &orders {
        assert!(*p >= 1.8, "orders {orders:?} from L1 errors {errors:?}");
    }
}

#[test]
fn schedule_construction_is_robust_in_epsilon() {
    for eps in [1e-4, 1e-5, 1e-6] {
        let mut cfg = ExperimentConfig::step_profile_benchmark("upwind1".parse().unwrap());
        cfg.problem.epsilon = eps;
        cfg.schedule.h0 = Some(eps);
        cfg.problem.dx = 0.02;
        let grid = cfg.space_grid().unwrap();
        let rho0 = initial_density(&cfg.initial().unwrap(), &grid);
        let planned = plan_schedule(&cfg, &rho0).unwrap();
        let s = &planned.schedule;
        assert!(
            (s.outer_step() - 0.5 * cfg.problem.dx).abs() <= 1e-12,
            "ε = {eps}: outer step {}",
            s.outer_step()
        );
        let model = cfg.collision_model().unwrap();
        let report = full_spectrum(
            &model,
            cfg.scheme.spatial,
            &grid,
            &cfg.velocity_grid().unwrap(),
            Some(&rho0),
        )
        .unwrap();
        let check = verify_stability(s, &report);
        assert!(check.stable, "ε = {eps}: max amplification {}", check.max_amplification);
        cfg.problem.t_end = 20.0 * s.outer_step();
        let out = run_experiment(&cfg).unwrap();
        let drift = out.errors.mass_drift.abs();
        assert!(drift < 1e-10, "ε = {eps}: mass drift {drift}");
    }
}

#[test]
fn zero_end_time_keeps_the_initial_density() {
    let out = run_experiment(&gaussian_config(0.02, "weno3", 1e-5, 0.0)).unwrap();
    assert_eq!(out.trajectory.steps, 0);
    assert_eq!(out.trajectory.snapshots.len(), 1);
    for (a, b) in out.final_density.iter().zip(&out.initial_density) {
        assert!((a - b).abs() < 1e-14);
    }
    assert!(out.errors.l1 < 1e-14);
}

#[test]
fn configuration_round_trips_through_toml() {
    let cfg = gaussian_config(0.01, "weno2", 1e-5, 0.5);
    let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
    assert_eq!(cfg, again);
}

#[test]
fn configuration_errors_name_their_line() {
    let good = gaussian_config(0.01, "weno2", 1e-5, 0.5).to_toml();
    let typo = good.replace("t_end", "t_ned");
    match ExperimentConfig::from_toml(&typo) {
        Err(ConfigError::Parse(msg)) => assert!(msg.starts_with("line "), "{msg}"),
        other => panic!("expected a parse error, got {other:?}"),
    }
    let negative = good.replacen("epsilon = ", "epsilon = -", 1);
    match ExperimentConfig::from_toml(&negative) {
        Err(ConfigError::Invalid { key, line, .. }) => {
            assert_eq!(key, "problem.epsilon");
            let expected = negative.lines().position(|l| l.starts_with("epsilon")).unwrap() + 1;
            assert_eq!(line, Some(expected));
        }
        other => panic!("expected an invalid-value error, got {other:?}"),
    }
}

#[test]
fn infeasible_outer_step_is_a_schedule_error() {
    let mut cfg = gaussian_config(0.02, "upwind1", 1e-5, 0.5);
    cfg.schedule.cfl = Some(1e-4);
    assert!(matches!(run_experiment(&cfg), Err(ExperimentError::Schedule(_))));
}
