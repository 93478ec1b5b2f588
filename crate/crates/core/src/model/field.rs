use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{ChebGrid, Fourier1DGrid};

/// Complex samples on a periodic grid.
#[derive(Debug, Clone)]
pub struct Field1D {
    pub grid: Arc<Fourier1DGrid>,
    pub values: Vec<Complex64>,
}

impl Field1D {
    pub fn new(grid: Arc<Fourier1DGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.nx() {
            return Err(Error::LengthMismatch {
                expected: grid.nx(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<Fourier1DGrid>) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.nx()];
        Self { grid, values }
    }

    pub fn from_real(grid: Arc<Fourier1DGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.x_nodes().iter().map(|&x| Complex64::new(f(x), 0.0)).collect();
        Self { grid, values }
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Multiplies every sample by `e^{iθ}`.
    pub fn rotated(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * phase).collect(),
        }
    }
}

/// Real profile on a Chebyshev grid together with the frequency it solves.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub grid: Arc<ChebGrid>,
    pub values: Vec<f64>,
    pub omega: f64,
}

impl RadialProfile {
    pub fn new(grid: Arc<ChebGrid>, values: Vec<f64>, omega: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values, omega })
    }

    /// Value at the origin `s = 0`, the peak of a ground state.
    pub fn peak(&self) -> f64 {
        *self.values.last().expect("grid has nodes")
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::MIN, |m, &v| m.max(v))
    }

    pub fn to_field(&self) -> RadialField {
        RadialField {
            grid: Arc::clone(&self.grid),
            re: self.values.clone(),
            im: vec![0.0; self.values.len()],
        }
    }
}

/// Complex radial state stored as real and imaginary parts.
#[derive(Debug, Clone)]
pub struct RadialField {
    pub grid: Arc<ChebGrid>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<ChebGrid>, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        for len in [re.len(), im.len()] {
            if len != grid.len() {
                return Err(Error::LengthMismatch {
                    expected: grid.len(),
                    got: len,
                });
            }
        }
        Ok(Self { grid, re, im })
    }

    pub fn zeros(grid: Arc<ChebGrid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            re: vec![0.0; n],
            im: vec![0.0; n],
        }
    }

    pub fn modulus_sq(&self) -> Vec<f64> {
        self.re.iter().zip(&self.im).map(|(a, b)| a * a + b * b).collect()
    }

    pub fn linf(&self) -> f64 {
        self.modulus_sq().into_iter().fold(0.0, f64::max).sqrt()
    }

    pub fn rotated(&self, theta: f64) -> Self {
        let (sn, cs) = theta.sin_cos();
        let re = self.re.iter().zip(&self.im).map(|(a, b)| cs * a - sn * b).collect();
        let im = self.re.iter().zip(&self.im).map(|(a, b)| sn * a + cs * b).collect();
        Self {
            grid: Arc::clone(&self.grid),
            re,
            im,
        }
    }

    /// Sup-norm distance to another field on the same grid.
    pub fn distance(&self, other: &RadialField) -> f64 {
        self.re
            .iter()
            .zip(&self.im)
            .zip(other.re.iter().zip(&other.im))
            .fold(0.0, |m, ((a, b), (c, d))| m.max(((a - c).powi(2) + (b - d).powi(2)).sqrt()))
    }
}

pub(crate) fn check_below_one(max_modulus: f64) -> Result<()> {
    if max_modulus >= 1.0 || !max_modulus.is_finite() {
        Err(Error::DenominatorBlowup { max_modulus })
    } else {
        Ok(())
    }
}
