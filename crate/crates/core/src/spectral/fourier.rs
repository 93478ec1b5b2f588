//! Periodic Fourier differentiation on `x ∈ lx·[-π, π)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Error, Result};

#[derive(Clone)]
pub struct Fourier1DGrid {
    nx: usize,
    lx: f64,
    x_nodes: Vec<f64>,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Fourier1DGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fourier1DGrid")
            .field("nx", &self.nx)
            .field("lx", &self.lx)
            .finish()
    }
}

impl Fourier1DGrid {
    pub fn new(nx: usize, lx: f64) -> Result<Self> {
        if nx < 4 || !nx.is_power_of_two() {
            return Err(invalid(format!("nx must be a power of two >= 4, got {nx}")));
        }
        if !(lx > 0.0 && lx.is_finite()) {
            return Err(invalid(format!("lx must be positive, got {lx}")));
        }
        let dx = 2.0 * PI * lx / nx as f64;
        let x_nodes = (0..nx).map(|j| -PI * lx + j as f64 * dx).collect();
        let half = nx / 2;
        let wavenumbers = (0..nx)
            .map(|j| {
                let freq = if j < half { j as f64 } else { j as f64 - nx as f64 };
                freq / lx
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            nx,
            lx,
            x_nodes,
            wavenumbers,
            forward: planner.plan_fft_forward(nx),
            inverse: planner.plan_fft_inverse(nx),
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn dx(&self) -> f64 {
        2.0 * PI * self.lx / self.nx as f64
    }

    pub fn x_nodes(&self) -> &[f64] {
        &self.x_nodes
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// In-place forward transform (unnormalized).
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// In-place inverse transform including the `1/nx` normalization.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let scale = 1.0 / self.nx as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
    }

    /// Uniform rectangle rule, spectrally accurate for smooth periodic data.
    pub fn integrate(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        self.dx() * values.into_iter().sum::<f64>()
    }
}

/// `order`-th derivative by multiplication with `(i k)^order` in frequency space.
///
/// The Nyquist mode is dropped for the first derivative (its derivative is not
/// representable as a real-symmetric mode).
pub fn fourier_diff(field: &[Complex64], grid: &Fourier1DGrid, order: u32) -> Result<Vec<Complex64>> {
    if field.len() != grid.nx() {
        return Err(Error::LengthMismatch {
            expected: grid.nx(),
            got: field.len(),
        });
    }
    let mut buf = field.to_vec();
    diff_in_place(&mut buf, grid, order)?;
    Ok(buf)
}

pub(crate) fn diff_in_place(buf: &mut [Complex64], grid: &Fourier1DGrid, order: u32) -> Result<()> {
    if order != 1 && order != 2 {
        return Err(invalid(format!("derivative order must be 1 or 2, got {order}")));
    }
    grid.forward(buf);
    let nyquist = grid.nx() / 2;
    for (j, (v, &k)) in buf.iter_mut().zip(grid.wavenumbers()).enumerate() {
        *v = if order == 1 {
            if j == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                *v * Complex64::new(0.0, k)
            }
        } else {
            *v * (-k * k)
        };
    }
    grid.inverse(buf);
    Ok(())
}
