use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_numeric_csv;
use crate::model::fit_omega_from_max;

/// Time series recorded during an evolution.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub times: Vec<f64>,
    pub linf: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    /// `|E(t)/E(0) - 1|`.
    pub delta: Vec<f64>,
}

impl Diagnostics {
    pub fn push(&mut self, t: f64, linf: f64, mass: f64, energy: f64) -> f64 {
        let delta = match self.energy.first() {
            None => 0.0,
            Some(&e0) if e0 != 0.0 => (energy / e0 - 1.0).abs(),
            Some(_) => energy.abs(),
        };
        self.times.push(t);
        self.linf.push(linf);
        self.mass.push(mass);
        self.energy.push(energy);
        self.delta.push(delta);
        delta
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_delta(&self) -> f64 {
        self.delta.iter().fold(0.0, |m, &d| m.max(d))
    }

    /// `max |M(t)/M(0) - 1|`.
    pub fn max_mass_drift(&self) -> f64 {
        match self.mass.first() {
            Some(&m0) if m0 != 0.0 => self.mass.iter().fold(0.0, |m, &v| m.max((v / m0 - 1.0).abs())),
            _ => 0.0,
        }
    }

    /// Writes columns `t, linf, mass, energy, delta`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = (0..self.len()).map(|i| vec![self.times[i], self.linf[i], self.mass[i], self.energy[i], self.delta[i]]);
        write_numeric_csv(path, &["t", "linf", "mass", "energy", "delta"], rows)
    }
}

/// Frequency of the solitary wave whose peak equals the mean of the trailing
/// 10% of `linf` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinalFit {
    pub omega: f64,
    pub mean_linf: f64,
    /// Times spanned by the averaged samples.
    pub window: (f64, f64),
    pub samples: usize,
}

pub fn fit_final_state(times: &[f64], linf: &[f64], alpha: u32) -> Result<FinalFit> {
    const MIN_SAMPLES: usize = 10;
    if linf.len() < MIN_SAMPLES || times.len() != linf.len() {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            have: linf.len().min(times.len()),
        });
    }
    let count = (linf.len() / 10).max(1);
    let start = linf.len() - count;
    let mean = linf[start..].iter().sum::<f64>() / count as f64;
    Ok(FinalFit {
        omega: fit_omega_from_max(mean, alpha)?,
        mean_linf: mean,
        window: (times[start], times[times.len() - 1]),
        samples: count,
    })
}

/// Result of a time integration that may have stopped early.
#[derive(Debug)]
pub struct RunOutcome<F> {
    pub diagnostics: Diagnostics,
    /// `(step index, time, state)` at every snapshot stride, including step 0.
    pub snapshots: Vec<(usize, f64, F)>,
    pub final_state: F,
    pub steps_taken: usize,
    /// Largest relative spectral tail seen at the diagnostic times.
    pub max_tail: f64,
    /// Why the run ended before `nt` steps, if it did.
    pub stopped: Option<Error>,
}

impl<F> RunOutcome<F> {
    pub fn completed(&self) -> bool {
        self.stopped.is_none()
    }

    pub fn final_fit(&self, alpha: u32) -> Result<FinalFit> {
        fit_final_state(&self.diagnostics.times, &self.diagnostics.linf, alpha)
    }
}
