mod common;

use std::sync::Arc;

use approx::assert_relative_eq;

use quasisol::groundstate::{
    continuation, default_seed, ground_state_at, jacobian_qeqs, newton_relaxed, resample, residual_qeqs,
    semilinear_groundstate, ContinuationPlan, SolverControls,
};
use quasisol::model::{stationary_residual_identity, ModelParams, RadialProfile};
use quasisol::spectral::ChebGrid;
use quasisol::Error;

fn controls() -> SolverControls {
    SolverControls {
        mu_growth: 1.2,
        max_iter: 400,
        ..Default::default()
    }
}

#[test]
fn two_dimensional_state_matches_shooting() {
    let gs = ground_state_at(1, 2, 0.2, 160, 800.0, &controls()).unwrap();
    assert!(gs.residual < 1e-10);
    let oracle = common::shooting_peak(1, 2, 0.2, 800f64.sqrt(), 1e-3, 0.3, 0.999);
    assert!((gs.profile.peak() - oracle).abs() < 1e-6, "{} vs {oracle}", gs.profile.peak());
}

#[test]
fn peak_is_grid_independent() {
    let a = ground_state_at(1, 3, 0.15, 160, 1e3, &controls()).unwrap();
    let b = ground_state_at(1, 3, 0.15, 240, 1.5e3, &controls()).unwrap();
    assert!((a.profile.peak() - b.profile.peak()).abs() < 1e-8);
    assert_relative_eq!(a.mass().unwrap(), b.mass().unwrap(), max_relative = 1e-7);
    assert!(a.trailing < 1e-8);
}

#[test]
fn residual_identity_holds_on_converged_state() {
    let gs = ground_state_at(2, 2, 0.1, 150, 800.0, &controls()).unwrap();
    // Away from the boundary rows the radial operator reproduces -ω φ.
    let r = stationary_residual_identity(&gs.profile, &gs.params).unwrap();
    assert!(r < 1e-8, "{r}");
}

#[test]
fn jacobian_matches_finite_differences() {
    let g = Arc::new(ChebGrid::new(24, 200.0).unwrap());
    let seed = default_seed(&g);
    let params = ModelParams::new(2, 3, 0.12).unwrap();
    let j = jacobian_qeqs(&seed, &params).unwrap();
    let base = residual_qeqs(&seed, &params).unwrap();
    let m = base.len();
    assert_eq!((j.nrows(), j.ncols()), (m, m));
    let h = 1e-7;
    let scale = j.norm_max();
    for col in 0..m {
        let mut shifted = seed.values.clone();
        shifted[col + 1] += h;
        let p = RadialProfile {
            values: shifted,
            ..seed.clone()
        };
        let r = residual_qeqs(&p, &params).unwrap();
        for row in 0..m {
            let fd = (r[row] - base[row]) / h;
            assert!((fd - j[(row, col)]).abs() < 1e-5 * scale, "({row}, {col}): {fd} vs {}", j[(row, col)]);
        }
    }
}

#[test]
fn continuation_backwards_reaches_same_states() {
    let up = continuation(&ContinuationPlan::new(160, 1e3, &[0.1, 0.15, 0.2]), 1, 3, &controls())
        .unwrap()
        .into_result()
        .unwrap();
    let start = up.last().unwrap().profile.clone();
    let down = continuation(
        &ContinuationPlan::new(160, 1e3, &[0.2, 0.15, 0.1]).with_seed(start),
        1,
        3,
        &controls(),
    )
    .unwrap()
    .into_result()
    .unwrap();
    for (a, b) in up.iter().zip(down.iter().rev()) {
        assert_eq!(a.params.omega, b.params.omega);
        let diff = a
            .profile
            .values
            .iter()
            .zip(&b.profile.values)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(diff < 1e-9, "omega {}: {diff}", a.params.omega);
    }
    let masses: Vec<f64> = up.iter().map(|g| g.mass().unwrap()).collect();
    assert!(masses.iter().all(|&m| m > 0.0));
}

#[test]
fn peaks_grow_toward_threshold() {
    let run = continuation(&ContinuationPlan::two_regime(160, 1e3, 1, 0.1, 0.35), 1, 3, &controls())
        .unwrap()
        .into_result()
        .unwrap();
    let peaks: Vec<f64> = run.iter().map(|g| g.profile.peak()).collect();
    assert!(peaks.windows(2).all(|w| w[1] > w[0]));
    assert!(peaks.iter().all(|&p| p < 1.0));
}

#[test]
fn resampling_keeps_profile_values() {
    let gs = ground_state_at(1, 3, 0.1, 120, 1e3, &controls()).unwrap();
    let fine = Arc::new(ChebGrid::new(200, 1e3).unwrap());
    let r = resample(&gs.profile, &fine);
    assert_eq!(r.values.len(), 201);
    assert!((r.peak() - gs.profile.peak()).abs() < 1e-12);
    let warm = SolverControls { mu: 1.0, ..controls() };
    let again = newton_relaxed(&r, &gs.params, &warm).unwrap();
    assert!(again.iterations < 6, "{} {:e}", again.iterations, again.residual);
    assert!((again.profile.peak() - gs.profile.peak()).abs() < 1e-9);
}

#[test]
fn invalid_requests_are_rejected() {
    assert!(matches!(
        ground_state_at(1, 3, 0.5, 100, 1e3, &controls()),
        Err(Error::NoSolitaryWave { .. })
    ));
    let bad = SolverControls {
        mu: 0.0,
        ..Default::default()
    };
    assert!(bad.validate().is_err());
    assert!(ContinuationPlan::new(100, 1e3, &[0.1, 0.6]).validate(1).is_err());
}

#[test]
fn semilinear_ground_state_in_two_dimensions() {
    let g = Arc::new(ChebGrid::new(100, 400.0).unwrap());
    let seed: Vec<f64> = g.s_nodes().iter().map(|s| 2.0 * (-s / 2.0).exp()).collect();
    let st = semilinear_groundstate(1, 2, &g, &seed, &controls()).unwrap();
    assert!(st.residual < 1e-10);
    // Cubic Townes profile in the plane: ψ(0) ≈ 2.20620, ∫ψ² ≈ 11.70124.
    assert!((st.values[100] - 2.206_20).abs() < 1e-4, "{}", st.values[100]);
    assert!((st.mass - 11.701_24).abs() < 1e-3, "{}", st.mass);
    assert!(semilinear_groundstate(2, 3, &g, &seed, &controls()).is_err());
}
