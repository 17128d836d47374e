//! Parameter selection on full spectra of the discrete kinetic operator.

use approx::assert_relative_eq;
use tpi_core::quadrature::gauss_hermite_1d;
use tpi_core::spatial::{SchemeId, SpaceGrid};
use tpi_core::spectrum::{full_spectrum, SpectrumReport};
use tpi_core::system::{CollisionKind, CollisionModel, PiecewiseProfile};
use tpi_core::tpi_params::{
    amplification, select_clustered, verify_stability, ClusteredSelection, OuterMethod, TpiSchedule, DEFAULT_M_MIN,
};

fn report(levels: &[f64], eps: f64) -> SpectrumReport {
    let model = CollisionModel::new(CollisionKind::Profile(PiecewiseProfile::uniform(levels.to_vec())), eps).unwrap();
    let sgrid = SpaceGrid::from_spacing(1, 0.01).unwrap();
    let vgrid = gauss_hermite_1d(10).unwrap();
    full_spectrum(&model, SchemeId::Upwind1, &sgrid, &vgrid, None).unwrap()
}

fn select(levels: &[f64], eps: f64, outer: OuterMethod) -> (SpectrumReport, ClusteredSelection) {
    let r = report(levels, eps);
    let sel = select_clustered(&r, DEFAULT_M_MIN, outer).unwrap();
    (r, sel)
}

fn assert_schedule(s: &TpiSchedule, k: &[usize], m: &[f64], cfl: f64) {
    assert_eq!(s.k(), k);
    assert_eq!(s.m().len(), m.len());
    for (got, want) in s.m().iter().zip(m) {
        assert!((got - want).abs() <= 0.01, "M {:?} expected {m:?}", s.m());
    }
    assert!(
        (s.cfl().unwrap() - cfl).abs() <= 1e-3,
        "cfl {:?} expected {cfl}",
        s.cfl()
    );
}

#[test]
fn two_level_case_matches_reference_schedule() {
    let (r, sel) = select(&[1.0, 0.1], 1e-5, OuterMethod::Pfe);
    assert_schedule(&sel.schedule, &[1, 2], &[9.0, 75.818], 0.867);
    assert!(verify_stability(&sel.schedule, &r).stable);
}

#[test]
fn no_gap_case_matches_reference_schedule() {
    let (r, sel) = select(&[1.0, 0.9, 0.15, 0.1, 0.01, 0.001], 1e-5, OuterMethod::Pfe);
    assert_schedule(&sel.schedule, &[2, 3], &[5.667, 12.094], 0.1395);
    assert!(verify_stability(&sel.schedule, &r).stable);
}

#[test]
fn four_level_case_matches_reference_schedule() {
    let (r, sel) = select(&[1.0, 0.2, 0.01, 0.002], 1e-6, OuterMethod::Prk4);
    assert_schedule(&sel.schedule, &[1, 1, 1, 4], &[4.0, 15.807, 3.741, 13.875], 1.1578);
    let check = verify_stability(&sel.schedule, &r);
    assert!(check.stable, "max amplification {}", check.max_amplification);
}

#[test]
fn outer_extrapolation_scales_inversely_with_epsilon() {
    for (levels, eps) in [(vec![1.0, 0.1], [1e-5, 1e-6, 1e-7]), (vec![1.0], [1e-4, 1e-5, 1e-6])] {
        let schedules: Vec<TpiSchedule> = eps
            .iter()
            .map(|&e| select(&levels, e, OuterMethod::Pfe).1.schedule)
            .collect();
        for pair in schedules.windows(2) {
            assert_eq!(pair[0].k(), pair[1].k());
            let outer = pair[0].levels() - 1;
            for l in 0..outer {
                assert_relative_eq!(pair[0].m()[l], pair[1].m()[l], max_relative = 1e-9);
            }
            let ratio = pair[1].m()[outer] / pair[0].m()[outer];
            assert!((ratio - 10.0).abs() < 0.2, "{levels:?}: outer M ratio {ratio}");
        }
    }
}

#[test]
fn constant_frequency_uses_one_level() {
    let (r, sel) = select(&[1.0], 1e-4, OuterMethod::Pfe);
    assert_eq!(sel.schedule.levels(), 1);
    assert!((sel.schedule.m()[0] - 83.22).abs() < 0.01);
    assert!(verify_stability(&sel.schedule, &r).stable);
}

#[test]
fn larger_extrapolation_breaks_stability() {
    let (r, sel) = select(&[1.0, 0.1], 1e-5, OuterMethod::Pfe);
    let s = &sel.schedule;
    let mut m = s.m().to_vec();
    let outer = m.len() - 1;
    m[outer] *= 1.5;
    let bigger = TpiSchedule::new(s.h0(), s.k().to_vec(), m, s.outer()).unwrap();
    assert!(!verify_stability(&bigger, &r).stable);
}

#[test]
fn selected_schedules_damp_every_eigenvalue() {
    for outer in [OuterMethod::Pfe, OuterMethod::Prk2, OuterMethod::Prk4] {
        let (r, sel) = select(&[1.0, 0.2, 0.01, 0.002], 1e-6, outer);
        for e in &r.eigenvalues {
            let s = amplification(&sel.schedule, 1.0 + e.value * sel.schedule.h0());
            assert!(
                s.norm() <= 1.0 + 1e-9,
                "{outer}: |σ_L| = {} at λ = {}",
                s.norm(),
                e.value
            );
        }
    }
}
