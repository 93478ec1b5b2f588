use std::sync::Arc;

use proptest::prelude::*;

use quasisol::evolver::{
    cn_newton_step, cn_residual, evolve_radial, evolve_radial_from, gaussian_initial, linear_cn_reference,
    prepare_ground_state, rhs_radial, write_run_radial, InitialData, RunRadialConfig,
};
use quasisol::io::read_column;
use quasisol::model::{mass_radial, RadialField};
use quasisol::spectral::ChebGrid;
use quasisol::Error;

fn sup_diff(a: &RadialField, b: &RadialField) -> f64 {
    a.distance(b)
}

#[test]
fn ground_state_rotates_under_the_flow() {
    let gs = prepare_ground_state(1, 3, 0.1, 120, 800.0).unwrap();
    let f = gs.to_field();
    let r = rhs_radial(&f, 1, 3).unwrap();
    // i ω φ at every node but the Dirichlet one.
    let err = (1..f.re.len()).fold(0.0f64, |m, j| m.max(r.re[j].abs()).max((r.im[j] - 0.1 * f.re[j]).abs()));
    assert!(err < 1e-8, "{err}");
    assert_eq!((r.re[0], r.im[0]), (0.0, 0.0));
}

#[test]
fn small_data_follow_the_linear_scheme() {
    let g = Arc::new(ChebGrid::new(60, 200.0).unwrap());
    let mut old = gaussian_initial(0.5, 5.0, &g).unwrap();
    for v in old.re.iter_mut() {
        *v *= 1e-4;
    }
    for dim in [2, 3] {
        let h = 0.05;
        let (next, stats) = cn_newton_step(&old, h, 1, dim, 1e-16, 25).unwrap();
        assert!(stats.residual < 1e-16);
        let lin = linear_cn_reference(&old, h, dim);
        assert!(sup_diff(&next, &lin) < 1e-12, "dim {dim}: {}", sup_diff(&next, &lin));
    }
}

#[test]
fn newton_step_solves_the_scheme() {
    let g = Arc::new(ChebGrid::new(80, 400.0).unwrap());
    let old = gaussian_initial(0.9, 20.0, &g).unwrap();
    let (next, stats) = cn_newton_step(&old, 0.01, 2, 3, 1e-11, 25).unwrap();
    assert!(stats.iterations >= 1 && stats.factorizations >= 1);
    let r = cn_residual(&next, &old, 0.01, 2, 3).unwrap();
    assert!(r.iter().all(|v| v.abs() < 1e-11));
    let fail = cn_newton_step(&old, 0.01, 2, 3, 1e-30, 2);
    assert!(matches!(fail, Err(Error::NoConvergence { .. })));
}

#[test]
fn gaussian_data_validation() {
    let g = Arc::new(ChebGrid::new(20, 100.0).unwrap());
    let f = gaussian_initial(0.9, 10.0, &g).unwrap();
    assert_eq!(f.re[0], 0.0);
    assert!((f.re[20] - 0.9).abs() < 1e-15);
    assert!(gaussian_initial(1.0, 10.0, &g).is_err());
    assert!(gaussian_initial(0.5, 0.0, &g).is_err());
    let mut c = RunRadialConfig::new(1, 1, 20, 100.0, 1.0, 10, InitialData::Gaussian { c: 0.9, s1: 10.0 });
    assert!(c.validate().is_err());
    c.dim = 3;
    assert!(c.validate().is_ok());
    c.initial = InitialData::Soliton { omega: 0.6, lambda: 1.0 };
    assert!(c.validate().is_err());
}

#[test]
fn initial_data_serde_is_tagged() {
    let j = serde_json::to_value(InitialData::Gaussian { c: 0.9, s1: 50.0 }).unwrap();
    assert_eq!(j["kind"], "gaussian");
    let back: InitialData = serde_json::from_value(serde_json::json!({"kind": "soliton", "omega": 0.01, "lambda": 1.01})).unwrap();
    assert_eq!(back, InitialData::Soliton { omega: 0.01, lambda: 1.01 });
}

#[test]
fn short_run_conserves_and_writes_outputs() {
    let mut c = RunRadialConfig::new(1, 3, 80, 800.0, 0.5, 50, InitialData::Gaussian { c: 0.9, s1: 50.0 });
    c.snapshot_stride = 25;
    c.diag_stride = 5;
    let out = evolve_radial(&c).unwrap();
    assert!(out.completed());
    assert_eq!(out.diagnostics.len(), 11);
    assert!(out.diagnostics.max_delta() < 1e-6);
    assert!(out.diagnostics.max_mass_drift() < 1e-6);
    let dir = tempfile::tempdir().unwrap();
    write_run_radial(dir.path(), &c, &out).unwrap();
    let d = dir.path().join("diagnostics.csv");
    assert_eq!(read_column(&d, "mass").unwrap(), out.diagnostics.mass);
    let snap = dir.path().join("snapshot_00002.csv");
    let mut rd = csv::Reader::from_path(&snap).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["s", "r", "re", "im", "abs"]);
    assert_eq!(rd.records().count(), 81);
    let abs = read_column(&snap, "abs").unwrap();
    assert!((abs.iter().fold(0.0f64, |m, v| m.max(*v)) - out.final_state.linf()).abs() < 1e-15);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["initial"]["kind"], "gaussian");
    assert_eq!(manifest["steps_taken"], 50);
}

#[test]
fn run_stops_on_accuracy_bound() {
    let mut c = RunRadialConfig::new(1, 3, 60, 400.0, 0.2, 4, InitialData::Gaussian { c: 0.9, s1: 20.0 });
    c.delta_bound = 1e-300;
    let out = evolve_radial(&c).unwrap();
    assert!(matches!(out.stopped, Some(Error::AccuracyAbort { .. })));
    assert_eq!(out.steps_taken, 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn short_runs_preserve_mass(amp in 0.2f64..0.9, s1 in 5.0f64..60.0, dim in 2u32..4) {
        let g = Arc::new(ChebGrid::new(100, 600.0).unwrap());
        let start = gaussian_initial(amp, s1, &g).unwrap();
        let c = RunRadialConfig::new(1, dim, 100, 600.0, 0.05, 5, InitialData::Gaussian { c: amp, s1 });
        let out = evolve_radial_from(&c, &start).unwrap();
        prop_assert!(out.completed());
        let m0 = mass_radial(&start, dim).unwrap();
        let m1 = mass_radial(&out.final_state, dim).unwrap();
        let drift = (m1 / m0 - 1.0).abs();
        prop_assert!(drift <= c.delta_bound);
        // Collocation conserves mass only up to the discretization error.
        if s1 >= 20.0 {
            prop_assert!(drift < 1e-8, "{drift:e}");
        }
    }
}
