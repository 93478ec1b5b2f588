//! Radial ground states for `d >= 2` by collocation in `s = r²`.
//!
//! The unknowns are the nodal values at every node except `s = s0`, where
//! the profile is held at zero. No condition is imposed at `s = 0`; the
//! collocation row there is the regular limit of the equation.

use std::path::Path;
use std::sync::Arc;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::io::{write_json, write_numeric_csv};
use crate::linalg::{sup_norm, DenseLu};
use crate::model::{check_solitary, energy_radial, mass_radial, omega_star, ModelParams, RadialProfile};
use crate::spectral::{cheb_coeffs, mat_vec, trailing_magnitude, ChebGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverControls {
    /// Relaxation factor applied to each Newton update.
    pub mu: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Halve the step while it would push `max φ` to 1 or beyond.
    pub clamp: bool,
    /// After an accepted step, the next factor is `min(1, mu_used * mu_growth)`.
    /// `1.0` keeps the factor fixed.
    pub mu_growth: f64,
}

impl Default for SolverControls {
    fn default() -> Self {
        Self {
            mu: 0.1,
            tol: 1e-10,
            max_iter: 500,
            clamp: true,
            mu_growth: 1.0,
        }
    }
}

impl SolverControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(invalid(format!("mu must lie in (0, 1], got {}", self.mu)));
        }
        if !(self.tol > 0.0) {
            return Err(invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter < 1 {
            return Err(invalid("max_iter must be >= 1"));
        }
        if !(self.mu_growth >= 1.0 && self.mu_growth.is_finite()) {
            return Err(invalid(format!("mu_growth must be >= 1, got {}", self.mu_growth)));
        }
        Ok(())
    }
}

/// A converged profile with its solve statistics.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub profile: RadialProfile,
    pub params: ModelParams,
    pub residual: f64,
    pub iterations: usize,
    /// Largest Chebyshev coefficient magnitude over the last 10% of indices,
    /// relative to the largest coefficient.
    pub trailing: f64,
}

#[derive(Debug, Clone, Serialize)]
struct ProfileMeta {
    alpha: u32,
    dim: u32,
    omega: f64,
    n: usize,
    s0: f64,
    residual: f64,
    iterations: usize,
    trailing: f64,
}

impl GroundState {
    pub fn mass(&self) -> Result<f64> {
        mass_radial(&self.profile.to_field(), self.params.dim)
    }

    pub fn energy(&self) -> Result<f64> {
        energy_radial(&self.profile.to_field(), self.params.alpha, self.params.dim)
    }

    /// Writes `<stem>.csv` (s, r, phi) and `<stem>.json` (solve metadata).
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        let grid = &self.profile.grid;
        let rows = grid
            .s_nodes()
            .iter()
            .zip(&self.profile.values)
            .map(|(&s, &phi)| vec![s, s.sqrt(), phi]);
        write_numeric_csv(&dir.join(format!("{stem}.csv")), &["s", "r", "phi"], rows)?;
        let meta = ProfileMeta {
            alpha: self.params.alpha,
            dim: self.params.dim,
            omega: self.params.omega,
            n: grid.n(),
            s0: grid.s0(),
            residual: self.residual,
            iterations: self.iterations,
            trailing: self.trailing,
        };
        write_json(&dir.join(format!("{stem}.json")), &meta)
    }
}

#[derive(Debug, Clone, Copy)]
enum Equation {
    QuasiLinear { alpha: u32, omega: f64 },
    Semilinear { alpha: u32 },
}

/// Nonlinear terms `h(φ) + k(φ) s (φ')²` and the derivatives `h'`, `k'`.
fn nonlinear(eq: Equation, phi: f64) -> (f64, f64, f64, f64) {
    match eq {
        Equation::QuasiLinear { alpha, omega } => {
            let a = alpha as f64;
            let ai = alpha as i32;
            let p2a = phi.powi(2 * ai);
            let q = 1.0 - p2a;
            let g = phi * p2a - omega * phi;
            let h = g * q;
            let hp = ((2.0 * a + 1.0) * p2a - omega) * q - g * 2.0 * a * phi.powi(2 * ai - 1);
            let k = 4.0 * a * phi.powi(2 * ai - 1) / q;
            let kp = 4.0 * a * ((2.0 * a - 1.0) * phi.powi(2 * ai - 2) / q + 2.0 * a * phi.powi(4 * ai - 2) / (q * q));
            (h, hp, k, kp)
        }
        Equation::Semilinear { alpha } => {
            let a = alpha as f64;
            let p2a = phi.powi(2 * alpha as i32);
            (phi * p2a - phi, (2.0 * a + 1.0) * p2a - 1.0, 0.0, 0.0)
        }
    }
}

fn check_values(eq: Equation, values: &[f64]) -> Result<()> {
    let m = sup_norm(values);
    if !m.is_finite() || (matches!(eq, Equation::QuasiLinear { .. }) && m >= 1.0) {
        return Err(Error::DenominatorBlowup { max_modulus: m });
    }
    Ok(())
}

/// Residual at nodes `1..=n` and, optionally, its Jacobian with respect to
/// the same nodal values.
fn assemble(
    grid: &ChebGrid,
    values: &[f64],
    dim: u32,
    eq: Equation,
    with_jacobian: bool,
) -> Result<(Vec<f64>, Option<Mat<f64>>)> {
    check_values(eq, values)?;
    let c = grid.ds_factor();
    let d = dim as f64;
    let dphi = grid.d_ds(values);
    let d2phi: Vec<f64> = mat_vec(grid.diff2(), values).into_iter().map(|v| c * c * v).collect();
    let s = grid.s_nodes();
    let n = grid.n();
    let mut res = Vec::with_capacity(n);
    let mut local = Vec::with_capacity(n);
    for j in 1..=n {
        let (h, hp, k, kp) = nonlinear(eq, values[j]);
        let p = dphi[j];
        res.push(4.0 * s[j] * d2phi[j] + 2.0 * d * p + h + k * s[j] * p * p);
        local.push((hp + kp * s[j] * p * p, 2.0 * k * s[j] * p));
    }
    if !with_jacobian {
        return Ok((res, None));
    }
    let d1 = grid.diff1();
    let d2 = grid.diff2();
    let jac = Mat::from_fn(n, n, |i, m| {
        let (j, col) = (i + 1, m + 1);
        let (diag, first) = local[i];
        let mut v = 4.0 * s[j] * c * c * d2[(j, col)] + (2.0 * d + first) * c * d1[(j, col)];
        if j == col {
            v += diag;
        }
        v
    });
    Ok((res, Some(jac)))
}

fn quasi(params: &ModelParams) -> Result<Equation> {
    if params.dim < 2 {
        return Err(invalid(format!("radial ground states need dim >= 2, got {}", params.dim)));
    }
    check_solitary(params.alpha, params.omega)?;
    Ok(Equation::QuasiLinear {
        alpha: params.alpha,
        omega: params.omega,
    })
}

/// Residual of the stationary equation in `s` at every node except `s = s0`
/// (index `i` corresponds to node `i + 1`, so the last entry is `s = 0`).
pub fn residual_qeqs(profile: &RadialProfile, params: &ModelParams) -> Result<Vec<f64>> {
    let eq = quasi(params)?;
    Ok(assemble(&profile.grid, &profile.values, params.dim, eq, false)?.0)
}

/// Analytic Jacobian of [`residual_qeqs`] with the `s0` row and column removed.
pub fn jacobian_qeqs(profile: &RadialProfile, params: &ModelParams) -> Result<Mat<f64>> {
    let eq = quasi(params)?;
    Ok(assemble(&profile.grid, &profile.values, params.dim, eq, true)?
        .1
        .expect("jacobian requested"))
}

fn relative_trailing(values: &[f64]) -> f64 {
    let coeffs = cheb_coeffs(values).expect("nodal values match grid");
    let lead = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if lead == 0.0 {
        0.0
    } else {
        trailing_magnitude(&coeffs) / lead
    }
}

fn newton(
    grid: &Arc<ChebGrid>,
    seed: &[f64],
    dim: u32,
    eq: Equation,
    controls: &SolverControls,
) -> Result<(Vec<f64>, f64, usize)> {
    controls.validate()?;
    if seed.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: seed.len(),
        });
    }
    let clamp = controls.clamp && matches!(eq, Equation::QuasiLinear { .. });
    let mut values = seed.to_vec();
    values[0] = 0.0;
    let mut mu = controls.mu;
    let mut residual = f64::INFINITY;
    for iter in 0..=controls.max_iter {
        let (res, jac) = assemble(grid, &values, dim, eq, true)?;
        residual = sup_norm(&res);
        if residual < controls.tol {
            return Ok((values, residual, iter));
        }
        if iter == controls.max_iter || !residual.is_finite() {
            break;
        }
        let neg: Vec<f64> = res.iter().map(|r| -r).collect();
        let delta = DenseLu::new(&jac.expect("jacobian requested")).solve(&neg);
        let mut step = mu;
        let mut candidate = values.clone();
        for halving in 0..=20 {
            for (c, (v, dv)) in candidate[1..].iter_mut().zip(values[1..].iter().zip(&delta)) {
                *c = v + step * dv;
            }
            if !clamp || sup_norm(&candidate) < 1.0 {
                break;
            }
            if halving == 20 {
                return Err(Error::DenominatorBlowup {
                    max_modulus: sup_norm(&candidate),
                });
            }
            step *= 0.5;
        }
        values = candidate;
        mu = if controls.mu_growth > 1.0 {
            (step * controls.mu_growth).min(1.0)
        } else {
            controls.mu
        };
    }
    Err(Error::NoConvergence {
        iterations: controls.max_iter,
        residual,
    })
}

/// Relaxed Newton iteration `φ ← φ + μ δ` from `seed` until the residual
/// sup-norm drops below `controls.tol`.
pub fn newton_relaxed(seed: &RadialProfile, params: &ModelParams, controls: &SolverControls) -> Result<GroundState> {
    let eq = quasi(params)?;
    let (values, residual, iterations) = newton(&seed.grid, &seed.values, params.dim, eq, controls)?;
    let trailing = relative_trailing(&values);
    Ok(GroundState {
        profile: RadialProfile::new(Arc::clone(&seed.grid), values, params.omega)?,
        params: *params,
        residual,
        iterations,
        trailing,
    })
}

/// `0.9 e^{-s/50}` on the grid.
pub fn default_seed(grid: &Arc<ChebGrid>) -> RadialProfile {
    let values = grid.s_nodes().iter().map(|s| 0.9 * (-s / 50.0).exp()).collect();
    RadialProfile {
        grid: Arc::clone(grid),
        values,
        omega: f64::NAN,
    }
}

/// Interpolates a profile onto another grid; values beyond the old `s0`
/// become zero.
pub fn resample(profile: &RadialProfile, grid: &Arc<ChebGrid>) -> RadialProfile {
    let mut values = profile.grid.interpolate(&profile.values, grid.s_nodes());
    values[0] = 0.0;
    RadialProfile {
        grid: Arc::clone(grid),
        values,
        omega: profile.omega,
    }
}

/// Switch to a finer grid when a converged profile is under-resolved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegridRule {
    /// Maximal accepted relative trailing coefficient.
    pub trailing_bound: f64,
    /// Degree multiplier applied on each refinement.
    pub growth: f64,
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationStep {
    pub omega: f64,
    /// New `(n, s0)` from this step on.
    pub grid: Option<(usize, f64)>,
    /// Controls used from this step on.
    pub controls: Option<SolverControls>,
}

impl ContinuationStep {
    pub fn at(omega: f64) -> Self {
        Self {
            omega,
            grid: None,
            controls: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContinuationPlan {
    pub n: usize,
    pub s0: f64,
    pub steps: Vec<ContinuationStep>,
    pub regrid: Option<RegridRule>,
    /// Starting iterate; [`default_seed`] when absent.
    pub seed: Option<RadialProfile>,
    /// A failed step is retried through this many successive midpoint
    /// insertions before the path is abandoned.
    pub max_subdivisions: usize,
}

impl ContinuationPlan {
    pub fn new(n: usize, s0: f64, omegas: &[f64]) -> Self {
        Self {
            n,
            s0,
            steps: omegas.iter().map(|&w| ContinuationStep::at(w)).collect(),
            regrid: None,
            seed: None,
            max_subdivisions: 3,
        }
    }

    /// `start, start + Δω, ...` up to `end`, with `Δω = 0.01` while
    /// `ω <= 0.8 ω*` and `0.005` beyond.
    pub fn two_regime(n: usize, s0: f64, alpha: u32, start: f64, end: f64) -> Self {
        let knee = 0.8 * omega_star(alpha);
        let mut omegas = vec![start];
        let mut w = start;
        loop {
            let step = if w < knee - 1e-12 { 0.01 } else { 0.005 };
            let next = w + step;
            if next > end + 1e-12 {
                break;
            }
            w = (next * 1e9).round() / 1e9;
            omegas.push(w);
        }
        if (w - end).abs() > 1e-12 && end > w {
            omegas.push(end);
        }
        Self::new(n, s0, &omegas)
    }

    /// Path from `0.2 ω*` to `omega`: upward in steps of `0.02 ω*` (`0.01 ω*`
    /// beyond `0.8 ω*`), downward geometrically by a factor `0.8`.
    pub fn toward(n: usize, s0: f64, alpha: u32, omega: f64) -> Self {
        let star = omega_star(alpha);
        let start = 0.2 * star;
        let mut omegas = vec![start];
        let mut w = start;
        if omega > start {
            loop {
                let step = if w < 0.8 * star - 1e-12 { 0.02 * star } else { 0.01 * star };
                if w + step >= omega - 1e-12 {
                    break;
                }
                w += step;
                omegas.push(w);
            }
            omegas.push(omega);
        } else if omega < start {
            while w * 0.8 > omega * (1.0 + 1e-12) {
                w *= 0.8;
                omegas.push(w);
            }
            omegas.push(omega);
        }
        Self::new(n, s0, &omegas)
    }

    pub fn with_seed(mut self, seed: RadialProfile) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_regrid(mut self, rule: RegridRule) -> Self {
        self.regrid = Some(rule);
        self
    }

    pub fn validate(&self, alpha: u32) -> Result<()> {
        if self.steps.is_empty() {
            return Err(invalid("continuation plan has no frequencies"));
        }
        for s in &self.steps {
            check_solitary(alpha, s.omega)?;
            if let Some(c) = &s.controls {
                c.validate()?;
            }
        }
        let inc = self.steps.windows(2).all(|w| w[1].omega > w[0].omega);
        let dec = self.steps.windows(2).all(|w| w[1].omega < w[0].omega);
        if !(inc || dec) {
            return Err(invalid("continuation frequencies must be strictly monotone"));
        }
        Ok(())
    }
}

/// Profiles solved so far and, if the path stopped early, where and why.
#[derive(Debug)]
pub struct ContinuationResult {
    pub solutions: Vec<GroundState>,
    pub failure: Option<(f64, Error)>,
}

impl ContinuationResult {
    pub fn into_result(self) -> Result<Vec<GroundState>> {
        match self.failure {
            None => Ok(self.solutions),
            Some((_, e)) => Err(e),
        }
    }
}

/// Newton solve at `params.omega` from `seed` (a solution at `from`). On
/// failure the interval is halved and the midpoint solved first.
fn solve_subdivided(
    seed: &RadialProfile,
    from: Option<f64>,
    params: &ModelParams,
    controls: &SolverControls,
    depth: usize,
) -> Result<GroundState> {
    match (newton_relaxed(seed, params, controls), from) {
        (Ok(gs), _) => Ok(gs),
        (Err(e), None) => Err(e),
        (Err(e), Some(_)) if depth == 0 => Err(e),
        (Err(_), Some(w0)) => {
            let mid = params.with_omega(0.5 * (w0 + params.omega));
            let half = solve_subdivided(seed, Some(w0), &mid, controls, depth - 1)?;
            solve_subdivided(&half.profile, Some(mid.omega), params, controls, depth - 1)
        }
    }
}

/// Solves along the plan, seeding each frequency with the previous solution.
pub fn continuation(plan: &ContinuationPlan, alpha: u32, dim: u32, controls: &SolverControls) -> Result<ContinuationResult> {
    plan.validate(alpha)?;
    controls.validate()?;
    let mut grid = Arc::new(ChebGrid::new(plan.n, plan.s0)?);
    let mut current = match &plan.seed {
        Some(seed) if Arc::ptr_eq(&seed.grid, &grid) => seed.clone(),
        Some(seed) => resample(seed, &grid),
        None => default_seed(&grid),
    };
    let mut ctl = *controls;
    let mut solutions = Vec::with_capacity(plan.steps.len());
    for step in &plan.steps {
        if let Some(c) = step.controls {
            ctl = c;
        }
        if let Some((n, s0)) = step.grid {
            if n != grid.n() || s0 != grid.s0() {
                grid = Arc::new(ChebGrid::new(n, s0)?);
                current = resample(&current, &grid);
            }
        }
        let params = ModelParams::new(alpha, dim, step.omega)?;
        let prev_omega = solutions.last().map(|g: &GroundState| g.params.omega);
        let mut outcome = solve_subdivided(&current, prev_omega, &params, &ctl, plan.max_subdivisions);
        if let (Ok(gs), Some(rule)) = (&outcome, plan.regrid) {
            let mut gs = gs.clone();
            while gs.trailing > rule.trailing_bound && grid.n() < rule.n_max {
                let n = ((grid.n() as f64 * rule.growth).ceil() as usize).min(rule.n_max);
                grid = Arc::new(ChebGrid::new(n, grid.s0())?);
                match newton_relaxed(&resample(&gs.profile, &grid), &params, &ctl) {
                    Ok(next) => gs = next,
                    Err(e) => {
                        outcome = Err(e);
                        break;
                    }
                }
            }
            if outcome.is_ok() {
                outcome = Ok(gs);
            }
        }
        match outcome {
            Ok(gs) => {
                current = gs.profile.clone();
                solutions.push(gs);
            }
            Err(e) => {
                return Ok(ContinuationResult {
                    solutions,
                    failure: Some((step.omega, e)),
                })
            }
        }
    }
    Ok(ContinuationResult {
        solutions,
        failure: None,
    })
}

/// Ground state at `omega` on an `(n, s0)` grid, reached along
/// [`ContinuationPlan::toward`].
pub fn ground_state_at(
    alpha: u32,
    dim: u32,
    omega: f64,
    n: usize,
    s0: f64,
    controls: &SolverControls,
) -> Result<GroundState> {
    check_solitary(alpha, omega)?;
    let plan = ContinuationPlan::toward(n, s0, alpha, omega);
    let mut run = continuation(&plan, alpha, dim, controls)?.into_result()?;
    Ok(run.pop().expect("plan is never empty"))
}

/// Positive radial solution of `-Δψ + ψ - ψ^{2α+1} = 0`.
#[derive(Debug, Clone)]
pub struct SemilinearState {
    pub grid: Arc<ChebGrid>,
    pub values: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    /// `∫_{R^d} ψ²`.
    pub mass: f64,
}

/// Ground state of the semilinear limit problem with the same Newton
/// machinery. Requires `α < 2/(d-2)` for `d >= 3`.
pub fn semilinear_groundstate(
    alpha: u32,
    dim: u32,
    grid: &Arc<ChebGrid>,
    seed: &[f64],
    controls: &SolverControls,
) -> Result<SemilinearState> {
    if alpha < 1 || dim < 2 {
        return Err(invalid("semilinear ground state needs alpha >= 1 and dim >= 2"));
    }
    if dim >= 3 && (alpha as f64) * (dim as f64 - 2.0) >= 2.0 {
        return Err(invalid(format!(
            "alpha = {alpha} is not energy-subcritical in dimension {dim}"
        )));
    }
    let (values, residual, iterations) = newton(grid, seed, dim, Equation::Semilinear { alpha }, controls)?;
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    let mass = crate::model::surface_area(dim) * 0.5 * grid.integrate_s_power(&sq, dim as f64 / 2.0 - 1.0);
    Ok(SemilinearState {
        grid: Arc::clone(grid),
        values,
        residual,
        iterations,
        mass,
    })
}
