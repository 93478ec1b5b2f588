//! Radial evolution in `s = r²` by Crank–Nicolson with a Newton solve per
//! step on the real/imaginary split of the state.
//!
//! Unknowns are stacked as `[re_0..re_n, im_0..im_n]`; node 0 is `s = s0`,
//! where both parts are held at zero by row replacement.

use std::path::Path;
use std::sync::Arc;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{Diagnostics, RunOutcome};
use crate::error::{invalid, Error, Result};
use crate::groundstate::{ground_state_at, SolverControls};
use crate::io::{write_json, write_numeric_csv};
use crate::linalg::{sup_norm, DenseLu};
use crate::model::{
    check_below_one, energy_radial, mass_radial, point_terms, radial_operator, RadialField, RadialProfile,
};
use crate::spectral::{cheb_coeffs, mat_vec, trailing_magnitude, ChebGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialData {
    /// `λ φ_ω` for the ground state at frequency `ω`.
    Soliton { omega: f64, lambda: f64 },
    /// `c e^{-s/s1}`.
    Gaussian { c: f64, s1: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRadialConfig {
    pub alpha: u32,
    pub dim: u32,
    pub n: usize,
    pub s0: f64,
    pub h: f64,
    pub nt: usize,
    /// Sup-norm threshold for the Crank–Nicolson residual.
    pub tol: f64,
    pub max_iter: usize,
    pub diag_stride: usize,
    /// 0 disables snapshots.
    pub snapshot_stride: usize,
    pub delta_bound: f64,
    pub initial: InitialData,
}

impl RunRadialConfig {
    pub fn new(alpha: u32, dim: u32, n: usize, s0: f64, tmax: f64, nt: usize, initial: InitialData) -> Self {
        Self {
            alpha,
            dim,
            n,
            s0,
            h: tmax / nt as f64,
            nt,
            tol: 1e-10,
            max_iter: 25,
            diag_stride: 1,
            snapshot_stride: 0,
            delta_bound: 1e-3,
            initial,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha < 1 || self.dim < 2 {
            return Err(invalid("radial runs need alpha >= 1 and dim >= 2"));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(invalid(format!("time step must be positive, got {}", self.h)));
        }
        if self.nt < 1 || self.max_iter < 1 {
            return Err(invalid("nt and max_iter must be >= 1"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        if self.diag_stride < 1 || !self.nt.is_multiple_of(self.diag_stride) {
            return Err(invalid(format!(
                "diagnostic stride {} must divide nt = {}",
                self.diag_stride, self.nt
            )));
        }
        if !(self.delta_bound > 0.0) {
            return Err(invalid("delta bound must be positive"));
        }
        match self.initial {
            InitialData::Gaussian { c, s1 } => {
                if !(c > 0.0 && c < 1.0) || !(s1 > 0.0) {
                    return Err(invalid(format!("gaussian data needs 0 < c < 1 and s1 > 0, got c = {c}, s1 = {s1}")));
                }
            }
            InitialData::Soliton { omega, lambda } => {
                crate::model::check_solitary(self.alpha, omega)?;
                if !(lambda > 0.0) {
                    return Err(invalid(format!("lambda must be positive, got {lambda}")));
                }
            }
        }
        Ok(())
    }
}

/// `∂tφ = -i N(φ)` on the grid, with the value at `s0` held at zero.
pub fn rhs_radial(field: &RadialField, alpha: u32, dim: u32) -> Result<RadialField> {
    let (nr, ni) = radial_operator(field, alpha, dim)?;
    let mut re = ni;
    let mut im: Vec<f64> = nr.into_iter().map(|v| -v).collect();
    re[0] = 0.0;
    im[0] = 0.0;
    Ok(RadialField {
        grid: Arc::clone(&field.grid),
        re,
        im,
    })
}

fn stack(f: &RadialField) -> Vec<f64> {
    f.re.iter().chain(&f.im).copied().collect()
}

fn unstack(grid: &Arc<ChebGrid>, x: &[f64]) -> RadialField {
    let m = grid.len();
    RadialField {
        grid: Arc::clone(grid),
        re: x[..m].to_vec(),
        im: x[m..].to_vec(),
    }
}

fn residual_with(new: &RadialField, old: &RadialField, f_old: &RadialField, h: f64, alpha: u32, dim: u32) -> Result<Vec<f64>> {
    let f_new = rhs_radial(new, alpha, dim)?;
    let m = new.grid.len();
    let mut g = Vec::with_capacity(2 * m);
    for j in 0..m {
        g.push(new.re[j] - old.re[j] - 0.5 * h * (f_old.re[j] + f_new.re[j]));
    }
    for j in 0..m {
        g.push(new.im[j] - old.im[j] - 0.5 * h * (f_old.im[j] + f_new.im[j]));
    }
    g[0] = new.re[0];
    g[m] = new.im[0];
    Ok(g)
}

/// `φ_new - φ_old - (h/2)(F(φ_old) + F(φ_new))` stacked as `[re; im]`, with
/// the `s0` rows replaced by the Dirichlet condition.
pub fn cn_residual(new: &RadialField, old: &RadialField, h: f64, alpha: u32, dim: u32) -> Result<Vec<f64>> {
    if !Arc::ptr_eq(&new.grid, &old.grid) && new.grid.len() != old.grid.len() {
        return Err(Error::LengthMismatch {
            expected: old.grid.len(),
            got: new.grid.len(),
        });
    }
    let f_old = rhs_radial(old, alpha, dim)?;
    residual_with(new, old, &f_old, h, alpha, dim)
}

/// Jacobian of the stacked residual with respect to `[re; im]` of `new`.
fn cn_jacobian(new: &RadialField, h: f64, alpha: u32, dim: u32) -> Result<Mat<f64>> {
    check_below_one(new.linf())?;
    let grid = &new.grid;
    let m = grid.len();
    let c = grid.ds_factor();
    let (us, vs) = (grid.d_ds(&new.re), grid.d_ds(&new.im));
    let (uss, vss) = (grid.d2_ds2(&new.re), grid.d2_ds2(&new.im));
    let terms: Vec<_> = (0..m)
        .map(|j| {
            point_terms(
                new.re[j],
                new.im[j],
                us[j],
                vs[j],
                uss[j],
                vss[j],
                grid.s_nodes()[j],
                alpha,
                dim,
                true,
            )
        })
        .collect();
    let d1 = grid.diff1();
    let d2 = grid.diff2();
    let hh = 0.5 * h;
    let c2 = c * c;
    Ok(Mat::from_fn(2 * m, 2 * m, |row, col| {
        let (j, block_r) = (row % m, row / m);
        let (k, block_c) = (col % m, col / m);
        if j == 0 {
            return if row == col { 1.0 } else { 0.0 };
        }
        let t = &terms[j];
        // dN/d(unknown_k) for the real or imaginary part of N.
        let dn = |d: &[f64; 6]| {
            let o = if block_c == 0 { 0 } else { 1 };
            let mut v = d[2 + o] * c * d1[(j, k)] + d[4 + o] * c2 * d2[(j, k)];
            if j == k {
                v += d[o];
            }
            v
        };
        let eye = if row == col { 1.0 } else { 0.0 };
        if block_r == 0 {
            // F_re = N_im
            eye - hh * dn(&t.d_im)
        } else {
            // F_im = -N_re
            eye + hh * dn(&t.d_re)
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub iterations: usize,
    pub residual: f64,
    pub factorizations: usize,
}

/// One Crank–Nicolson step by Newton's method started from `old`.
///
/// The LU factorization is kept for the next iteration only if the first
/// iteration reduced the residual more than tenfold.
pub fn cn_newton_step(
    old: &RadialField,
    h: f64,
    alpha: u32,
    dim: u32,
    tol: f64,
    max_iter: usize,
) -> Result<(RadialField, StepStats)> {
    let grid = &old.grid;
    let f_old = rhs_radial(old, alpha, dim)?;
    let mut x = stack(old);
    let mut current = old.clone();
    let mut g = residual_with(&current, old, &f_old, h, alpha, dim)?;
    let mut res = sup_norm(&g);
    let mut lu: Option<DenseLu> = None;
    let mut reuse = false;
    let mut factorizations = 0;
    for iter in 0..max_iter {
        if res < tol {
            return Ok((
                current,
                StepStats {
                    iterations: iter,
                    residual: res,
                    factorizations,
                },
            ));
        }
        if !reuse || lu.is_none() {
            lu = Some(DenseLu::new(&cn_jacobian(&current, h, alpha, dim)?));
            factorizations += 1;
        }
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        let dx = lu.as_ref().expect("factorized").solve(&neg);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        current = unstack(grid, &x);
        g = residual_with(&current, old, &f_old, h, alpha, dim)?;
        let next = sup_norm(&g);
        if iter == 0 {
            reuse = next < 0.1 * res;
        }
        res = next;
    }
    if res < tol {
        return Ok((
            current,
            StepStats {
                iterations: max_iter,
                residual: res,
                factorizations,
            },
        ));
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: res,
    })
}

/// `c e^{-s/s1}` with the `s0` value set to zero.
pub fn gaussian_initial(c: f64, s1: f64, grid: &Arc<ChebGrid>) -> Result<RadialField> {
    if !(c > 0.0 && c < 1.0) {
        return Err(invalid(format!("amplitude must lie in (0, 1), got {c}")));
    }
    if !(s1 > 0.0) {
        return Err(invalid(format!("width must be positive, got {s1}")));
    }
    let mut re: Vec<f64> = grid.s_nodes().iter().map(|s| c * (-s / s1).exp()).collect();
    re[0] = 0.0;
    Ok(RadialField {
        grid: Arc::clone(grid),
        im: vec![0.0; re.len()],
        re,
    })
}

/// Ground state at `omega` on an `(n, s0)` grid, by continuation from
/// `0.2 ω*` with a cautious relaxation schedule.
pub fn prepare_ground_state(alpha: u32, dim: u32, omega: f64, n: usize, s0: f64) -> Result<RadialProfile> {
    let controls = SolverControls {
        mu: 0.1,
        mu_growth: 1.2,
        max_iter: 400,
        ..Default::default()
    };
    Ok(ground_state_at(alpha, dim, omega, n, s0, &controls)?.profile)
}

fn initial_field(config: &RunRadialConfig, grid: &Arc<ChebGrid>) -> Result<RadialField> {
    match config.initial {
        InitialData::Gaussian { c, s1 } => gaussian_initial(c, s1, grid),
        InitialData::Soliton { omega, lambda } => {
            let gs = prepare_ground_state(config.alpha, config.dim, omega, config.n, config.s0)?;
            let peak = lambda * gs.max();
            if !(peak < 1.0) {
                return Err(Error::SaturationViolation { peak });
            }
            let mut f = gs.to_field();
            f.grid = Arc::clone(grid);
            for v in &mut f.re {
                *v *= lambda;
            }
            Ok(f)
        }
    }
}

fn relative_trailing(f: &RadialField) -> f64 {
    let mut worst = 0.0f64;
    for part in [&f.re, &f.im] {
        let coeffs = cheb_coeffs(part).expect("nodal values match grid");
        let lead = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if lead > 0.0 {
            worst = worst.max(trailing_magnitude(&coeffs) / lead);
        }
    }
    worst
}

/// Runs `config.nt` Crank–Nicolson steps from the configured initial data.
pub fn evolve_radial(config: &RunRadialConfig) -> Result<RunOutcome<RadialField>> {
    config.validate()?;
    let grid = Arc::new(ChebGrid::new(config.n, config.s0)?);
    let initial = initial_field(config, &grid)?;
    evolve_radial_from(config, &initial)
}

/// As [`evolve_radial`], starting from a given field.
pub fn evolve_radial_from(config: &RunRadialConfig, initial: &RadialField) -> Result<RunOutcome<RadialField>> {
    config.validate()?;
    let (alpha, dim) = (config.alpha, config.dim);
    let mut diag = Diagnostics::default();
    let mut snapshots = Vec::new();
    let mut state = initial.clone();
    diag.push(
        0.0,
        state.linf(),
        mass_radial(&state, dim)?,
        energy_radial(&state, alpha, dim)?,
    );
    if config.snapshot_stride > 0 {
        snapshots.push((0, 0.0, state.clone()));
    }
    let mut max_tail = relative_trailing(&state);
    let mut stopped = None;
    let mut steps = 0;
    for step in 1..=config.nt {
        match cn_newton_step(&state, config.h, alpha, dim, config.tol, config.max_iter) {
            Ok((next, stats)) => {
                debug_assert!(stats.residual < config.tol);
                state = next;
            }
            Err(e) => {
                stopped = Some(e);
                break;
            }
        }
        steps = step;
        let t = step as f64 * config.h;
        if config.snapshot_stride > 0 && step % config.snapshot_stride == 0 {
            snapshots.push((step, t, state.clone()));
        }
        if step % config.diag_stride == 0 {
            let measured = mass_radial(&state, dim).and_then(|m| Ok((m, energy_radial(&state, alpha, dim)?)));
            let (mass, energy) = match measured {
                Ok(v) => v,
                Err(e) => {
                    stopped = Some(e);
                    break;
                }
            };
            max_tail = max_tail.max(relative_trailing(&state));
            let delta = diag.push(t, state.linf(), mass, energy);
            if delta > config.delta_bound {
                stopped = Some(Error::AccuracyAbort {
                    time: t,
                    delta,
                    bound: config.delta_bound,
                });
                break;
            }
        }
    }
    Ok(RunOutcome {
        diagnostics: diag,
        snapshots,
        final_state: state,
        steps_taken: steps,
        max_tail,
        stopped,
    })
}

#[derive(Serialize)]
struct SnapshotEntry {
    index: usize,
    step: usize,
    time: f64,
    file: String,
}

#[derive(Serialize)]
struct ManifestRadial<'a> {
    config: &'a RunRadialConfig,
    snapshots: Vec<SnapshotEntry>,
    steps_taken: usize,
    max_delta: f64,
    max_chebyshev_tail: f64,
    stopped: Option<String>,
}

/// Writes `diagnostics.csv`, `snapshot_NNNNN.csv` (s, r, re, im, abs) and
/// `manifest.json` into `dir`.
pub fn write_run_radial(dir: &Path, config: &RunRadialConfig, outcome: &RunOutcome<RadialField>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    outcome.diagnostics.write_csv(&dir.join("diagnostics.csv"))?;
    let mut entries = Vec::with_capacity(outcome.snapshots.len());
    for (index, (step, time, field)) in outcome.snapshots.iter().enumerate() {
        let file = format!("snapshot_{index:05}.csv");
        let rows = (0..field.grid.len()).map(|j| {
            let s = field.grid.s_nodes()[j];
            let (a, b) = (field.re[j], field.im[j]);
            vec![s, s.sqrt(), a, b, a.hypot(b)]
        });
        write_numeric_csv(&dir.join(&file), &["s", "r", "re", "im", "abs"], rows)?;
        entries.push(SnapshotEntry {
            index,
            step: *step,
            time: *time,
            file,
        });
    }
    let manifest = ManifestRadial {
        config,
        snapshots: entries,
        steps_taken: outcome.steps_taken,
        max_delta: outcome.diagnostics.max_delta(),
        max_chebyshev_tail: outcome.max_tail,
        stopped: outcome.stopped.as_ref().map(|e| e.to_string()),
    };
    write_json(&dir.join("manifest.json"), &manifest)
}

/// Pure `i∂tφ = -Δφ` Crank–Nicolson update by a dense solve; used to check
/// the nonlinear machinery on its linear part.
#[doc(hidden)]
pub fn linear_cn_reference(old: &RadialField, h: f64, dim: u32) -> RadialField {
    let grid = &old.grid;
    let m = grid.len();
    let c = grid.ds_factor();
    let lap = |j: usize, k: usize| {
        4.0 * grid.s_nodes()[j] * c * c * grid.diff2()[(j, k)] + 2.0 * dim as f64 * c * grid.diff1()[(j, k)]
    };
    // ∂t u = -Δv, ∂t v = Δu  (φ_t = iΔφ)
    let a = Mat::from_fn(2 * m, 2 * m, |row, col| {
        let (j, br) = (row % m, row / m);
        let (k, bc) = (col % m, col / m);
        if j == 0 {
            return if row == col { 1.0 } else { 0.0 };
        }
        let eye = if row == col { 1.0 } else { 0.0 };
        match (br, bc) {
            (0, 1) => 0.5 * h * lap(j, k),
            (1, 0) => -0.5 * h * lap(j, k),
            _ => eye,
        }
    });
    let lu_re = mat_vec_lap(grid, &old.im, dim);
    let lu_im = mat_vec_lap(grid, &old.re, dim);
    let mut rhs = Vec::with_capacity(2 * m);
    for j in 0..m {
        rhs.push(old.re[j] - 0.5 * h * lu_re[j]);
    }
    for j in 0..m {
        rhs.push(old.im[j] + 0.5 * h * lu_im[j]);
    }
    rhs[0] = 0.0;
    rhs[m] = 0.0;
    unstack(grid, &DenseLu::new(&a).solve(&rhs))
}

fn mat_vec_lap(grid: &ChebGrid, v: &[f64], dim: u32) -> Vec<f64> {
    let c = grid.ds_factor();
    let d1 = mat_vec(grid.diff1(), v);
    let d2 = mat_vec(grid.diff2(), v);
    (0..v.len())
        .map(|j| 4.0 * grid.s_nodes()[j] * c * c * d2[j] + 2.0 * dim as f64 * c * d1[j])
        .collect()
}
