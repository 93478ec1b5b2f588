//! Problem definition: parameters, the explicit 1D solitary wave, fields on
//! both grid types, and the conserved functionals.

mod field;
mod functionals;
mod operator;
mod soliton;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use field::{Field1D, RadialField, RadialProfile};
pub use functionals::{energy_1d, energy_radial, mass_1d, mass_radial, surface_area};
pub use operator::{radial_operator, stationary_residual_identity, PointTerms};
pub(crate) use field::check_below_one;
pub(crate) use operator::point_terms;
pub use soliton::{soliton_1d, soliton_1d_derivative, soliton_max};

/// Threshold frequency `1/(alpha + 1)`; no solitary waves exist at or above it.
pub fn omega_star(alpha: u32) -> f64 {
    1.0 / (alpha as f64 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: u32,
    pub dim: u32,
    pub omega: f64,
}

impl ModelParams {
    pub fn new(alpha: u32, dim: u32, omega: f64) -> Result<Self> {
        if alpha < 1 {
            return Err(invalid("alpha must be >= 1"));
        }
        if dim < 1 {
            return Err(invalid("dim must be >= 1"));
        }
        if !omega.is_finite() {
            return Err(invalid("omega must be finite"));
        }
        Ok(Self { alpha, dim, omega })
    }

    pub fn omega_star(&self) -> f64 {
        omega_star(self.alpha)
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Self { omega, ..self }
    }

    /// Checks `0 < omega < omega*`, the existence range for solitary waves.
    pub fn require_solitary(&self) -> Result<()> {
        check_solitary(self.alpha, self.omega)
    }
}

pub(crate) fn check_solitary(alpha: u32, omega: f64) -> Result<()> {
    let star = omega_star(alpha);
    if !(omega > 0.0) {
        return Err(invalid(format!("omega must be positive, got {omega}")));
    }
    if omega >= star {
        return Err(Error::NoSolitaryWave {
            omega,
            omega_star: star,
        });
    }
    Ok(())
}

/// Frequency of the 1D solitary wave whose peak is `peak`: `omega* peak^(2 alpha)`.
pub fn fit_omega_from_max(peak: f64, alpha: u32) -> Result<f64> {
    if !(peak > 0.0 && peak < 1.0) {
        return Err(invalid(format!("peak must lie in (0, 1), got {peak}")));
    }
    Ok(omega_star(alpha) * peak.powi(2 * alpha as i32))
}

/// Maps the `(a, b)` form `-b φ = ... - a|φ|^{2α}φ` to `(omega, scale)`:
/// if `φ` solves the former then `x -> φ(scale x)` solves the unit-coupling
/// equation at `omega = b/a`, with `scale = a^{-1/2}`.
pub fn rescale_ab(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && b > 0.0) {
        return Err(invalid(format!("a and b must be positive, got a = {a}, b = {b}")));
    }
    Ok((b / a, a.powf(-0.5)))
}
