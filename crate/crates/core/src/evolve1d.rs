//! Periodic 1D evolution: pseudospectral right-hand side and classical RK4.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{Diagnostics, RunOutcome};
use crate::error::{invalid, Error, Result};
use crate::io::{write_json, write_numeric_csv};
use crate::model::{check_solitary, energy_1d, mass_1d, soliton_1d, soliton_max, Field1D, ModelParams};
use crate::spectral::{diff_in_place, Fourier1DGrid};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Run1DConfig {
    pub alpha: u32,
    /// Frequency of the solitary wave the initial data is built from.
    pub omega: f64,
    /// Amplitude factor applied to the solitary wave.
    pub lambda: f64,
    pub lx: f64,
    pub nx: usize,
    pub tmax: f64,
    pub nt: usize,
    /// Diagnostics are recorded every `diag_stride` steps.
    pub diag_stride: usize,
    /// Snapshots are kept every `snapshot_stride` steps; 0 disables them.
    pub snapshot_stride: usize,
    /// Runs stop once `δ` exceeds this bound.
    pub delta_bound: f64,
}

impl Run1DConfig {
    pub fn new(alpha: u32, omega: f64, lambda: f64, lx: f64, nx: usize, tmax: f64, nt: usize) -> Self {
        Self {
            alpha,
            omega,
            lambda,
            lx,
            nx,
            tmax,
            nt,
            diag_stride: (nt / 1000).max(1),
            snapshot_stride: 0,
            delta_bound: 1e-3,
        }
    }

    pub fn h(&self) -> f64 {
        self.tmax / self.nt as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha < 1 {
            return Err(invalid("alpha must be >= 1"));
        }
        if self.nt < 1 {
            return Err(invalid("nt must be >= 1"));
        }
        if !(self.tmax > 0.0 && self.tmax.is_finite()) {
            return Err(invalid(format!("tmax must be positive, got {}", self.tmax)));
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
        if !(self.lambda > 0.0) {
            return Err(invalid(format!("lambda must be positive, got {}", self.lambda)));
        }
        check_solitary(self.alpha, self.omega)?;
        Ok(())
    }
}

/// `∂tφ = -i N(φ)` with
/// `N = -∂x(φx/q) + α|φ|^{2α-2}|φx|²φ/q² - |φ|^{2α}φ`, `q = 1-|φ|^{2α}`.
pub fn rhs_1d(field: &Field1D, alpha: u32) -> Result<Field1D> {
    let grid = &field.grid;
    let a = alpha as f64;
    let ai = alpha as i32;
    let mut dx = field.values.clone();
    diff_in_place(&mut dx, grid, 1)?;
    let mut flux = Vec::with_capacity(dx.len());
    let mut local = Vec::with_capacity(dx.len());
    for (phi, d) in field.values.iter().zip(&dx) {
        let rho = phi.norm_sqr();
        let r = rho.powi(ai - 1);
        let q = 1.0 - r * rho;
        if !(q > 0.0) {
            return Err(Error::DenominatorBlowup {
                max_modulus: field.linf(),
            });
        }
        flux.push(d / q);
        local.push(phi * (a * r * d.norm_sqr() / (q * q) - r * rho));
    }
    diff_in_place(&mut flux, grid, 1)?;
    let values = flux
        .iter()
        .zip(&local)
        .map(|(div, loc)| -I * (loc - div))
        .collect();
    Ok(Field1D {
        grid: Arc::clone(grid),
        values,
    })
}

fn axpy(base: &Field1D, h: f64, k: &Field1D) -> Field1D {
    Field1D {
        grid: Arc::clone(&base.grid),
        values: base.values.iter().zip(&k.values).map(|(b, v)| b + h * v).collect(),
    }
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step(field: &Field1D, h: f64, alpha: u32) -> Result<Field1D> {
    let k1 = rhs_1d(field, alpha)?;
    let k2 = rhs_1d(&axpy(field, 0.5 * h, &k1), alpha)?;
    let k3 = rhs_1d(&axpy(field, 0.5 * h, &k2), alpha)?;
    let k4 = rhs_1d(&axpy(field, h, &k3), alpha)?;
    let values = (0..field.values.len())
        .map(|i| field.values[i] + h / 6.0 * (k1.values[i] + 2.0 * k2.values[i] + 2.0 * k3.values[i] + k4.values[i]))
        .collect();
    Ok(Field1D {
        grid: Arc::clone(&field.grid),
        values,
    })
}

/// `λ φ_ω(x)` sampled on the grid.
pub fn perturbed_soliton_1d(alpha: u32, omega: f64, lambda: f64, grid: &Arc<Fourier1DGrid>) -> Result<Field1D> {
    let params = ModelParams::new(alpha, 1, omega)?;
    let peak = lambda * soliton_max(&params)?;
    if !(peak < 1.0) {
        return Err(Error::SaturationViolation { peak });
    }
    let values = grid
        .x_nodes()
        .iter()
        .map(|&x| Ok(Complex64::new(lambda * soliton_1d(&params, x)?, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    Field1D::new(Arc::clone(grid), values)
}

/// Largest Fourier coefficient magnitude among the highest 10% of
/// wavenumbers, relative to the largest coefficient.
pub fn fourier_tail(field: &Field1D) -> f64 {
    let mut buf = field.values.clone();
    field.grid.forward(&mut buf);
    let kmax = field.grid.wavenumbers().iter().fold(0.0f64, |m, k| m.max(k.abs()));
    let cut = 0.9 * kmax;
    let mut peak = 0.0f64;
    let mut tail = 0.0f64;
    for (c, k) in buf.iter().zip(field.grid.wavenumbers()) {
        let m = c.norm();
        peak = peak.max(m);
        if k.abs() >= cut {
            tail = tail.max(m);
        }
    }
    if peak == 0.0 {
        0.0
    } else {
        tail / peak
    }
}

/// Integrates from `initial` for `config.nt` steps of `config.h()`.
///
/// Stops early, keeping everything recorded so far, when a step fails or
/// `δ` exceeds `config.delta_bound`.
pub fn evolve_1d(config: &Run1DConfig, initial: &Field1D) -> Result<RunOutcome<Field1D>> {
    config.validate()?;
    if initial.values.len() != initial.grid.nx() {
        return Err(Error::LengthMismatch {
            expected: initial.grid.nx(),
            got: initial.values.len(),
        });
    }
    let h = config.h();
    let mut diag = Diagnostics::default();
    let mut snapshots = Vec::new();
    let mut state = initial.clone();
    let mut max_tail = fourier_tail(&state);
    diag.push(0.0, state.linf(), mass_1d(&state), energy_1d(&state, config.alpha)?);
    if config.snapshot_stride > 0 {
        snapshots.push((0, 0.0, state.clone()));
    }
    let mut stopped = None;
    let mut steps = 0;
    for step in 1..=config.nt {
        match rk4_step(&state, h, config.alpha) {
            Ok(next) => state = next,
            Err(e) => {
                stopped = Some(e);
                break;
            }
        }
        steps = step;
        let t = step as f64 * h;
        if config.snapshot_stride > 0 && step % config.snapshot_stride == 0 {
            snapshots.push((step, t, state.clone()));
        }
        if step % config.diag_stride == 0 {
            let energy = match energy_1d(&state, config.alpha) {
                Ok(e) => e,
                Err(e) => {
                    stopped = Some(e);
                    break;
                }
            };
            max_tail = max_tail.max(fourier_tail(&state));
            let delta = diag.push(t, state.linf(), mass_1d(&state), energy);
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
struct Manifest1D<'a> {
    config: &'a Run1DConfig,
    snapshots: Vec<SnapshotEntry>,
    steps_taken: usize,
    max_delta: f64,
    max_fourier_tail: f64,
    stopped: Option<String>,
    note: &'static str,
}

/// Writes `diagnostics.csv`, `snapshot_NNNNN.csv` (x, re, im, abs) and
/// `manifest.json` into `dir`.
pub fn write_run_1d(dir: &Path, config: &Run1DConfig, outcome: &RunOutcome<Field1D>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    outcome.diagnostics.write_csv(&dir.join("diagnostics.csv"))?;
    let mut entries = Vec::with_capacity(outcome.snapshots.len());
    for (index, (step, time, field)) in outcome.snapshots.iter().enumerate() {
        let file = format!("snapshot_{index:05}.csv");
        let rows = field
            .grid
            .x_nodes()
            .iter()
            .zip(&field.values)
            .map(|(&x, v)| vec![x, v.re, v.im, v.norm()]);
        write_numeric_csv(&dir.join(&file), &["x", "re", "im", "abs"], rows)?;
        entries.push(SnapshotEntry {
            index,
            step: *step,
            time: *time,
            file,
        });
    }
    let manifest = Manifest1D {
        config,
        snapshots: entries,
        steps_taken: outcome.steps_taken,
        max_delta: outcome.diagnostics.max_delta(),
        max_fourier_tail: outcome.max_tail,
        stopped: outcome.stopped.as_ref().map(|e| e.to_string()),
        note: "periodic domain: radiation leaving one side re-enters on the other; \
               the re-entry time is not computed",
    };
    write_json(&dir.join("manifest.json"), &manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(nx: usize, lx: f64) -> Arc<Fourier1DGrid> {
        Arc::new(Fourier1DGrid::new(nx, lx).unwrap())
    }

    #[test]
    fn zero_field_is_stationary() {
        let z = Field1D::zeros(grid(64, 5.0));
        assert!(rhs_1d(&z, 3).unwrap().values.iter().all(|v| v.norm() == 0.0));
        assert!(rk4_step(&z, 0.1, 3).unwrap().values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn saturated_data_is_rejected() {
        let g = grid(64, 5.0);
        assert!(matches!(
            perturbed_soliton_1d(3, 0.22, 1.03, &g),
            Err(Error::SaturationViolation { .. })
        ));
        let f = Field1D::from_real(g, |_| 1.0);
        assert!(matches!(rhs_1d(&f, 2), Err(Error::DenominatorBlowup { .. })));
    }

    #[test]
    fn unit_lambda_gives_the_solitary_wave() {
        let g = grid(256, 10.0);
        let f = perturbed_soliton_1d(3, 0.22, 1.0, &g).unwrap();
        let p = ModelParams::new(3, 1, 0.22).unwrap();
        for (x, v) in g.x_nodes().iter().zip(&f.values) {
            assert_eq!(v.re, soliton_1d(&p, *x).unwrap());
            assert_eq!(v.im, 0.0);
        }
        let f = perturbed_soliton_1d(3, 0.22, 1.001, &g).unwrap();
        assert!((f.linf() - 1.001 * 0.88f64.powf(1.0 / 6.0)).abs() < 1e-14);
    }

    #[test]
    fn config_checks() {
        let mut c = Run1DConfig::new(3, 0.22, 1.0, 30.0, 256, 1.0, 100);
        assert!(c.validate().is_ok());
        c.diag_stride = 7;
        assert!(c.validate().is_err());
        c.diag_stride = 10;
        c.omega = 0.3;
        assert!(c.validate().is_err());
    }
}
