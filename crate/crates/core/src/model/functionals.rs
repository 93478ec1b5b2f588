use std::f64::consts::PI;

use super::field::{check_below_one, Field1D, RadialField};
use crate::error::{invalid, Result};
use crate::spectral::diff_in_place;

/// `∫|φ|² dx` by the rectangle rule.
pub fn mass_1d(field: &Field1D) -> f64 {
    field.grid.integrate(field.values.iter().map(|v| v.norm_sqr()))
}

/// `½∫|φ_x|²/(1-|φ|^{2α}) dx - 1/(2(α+1)) ∫|φ|^{2α+2} dx`.
pub fn energy_1d(field: &Field1D, alpha: u32) -> Result<f64> {
    check_below_one(field.linf())?;
    let mut dx = field.values.clone();
    diff_in_place(&mut dx, &field.grid, 1)?;
    let a = alpha as i32;
    let kinetic = field.grid.integrate(
        field
            .values
            .iter()
            .zip(&dx)
            .map(|(v, d)| d.norm_sqr() / (1.0 - v.norm_sqr().powi(a))),
    );
    let potential = field
        .grid
        .integrate(field.values.iter().map(|v| v.norm_sqr().powi(a + 1)));
    Ok(0.5 * kinetic - potential / (2.0 * (alpha as f64 + 1.0)))
}

/// Area of the unit sphere in `R^d`, `2π^{d/2}/Γ(d/2)`.
pub fn surface_area(dim: u32) -> f64 {
    // Γ(d/2) for integer d
    let gamma_half = |d: u32| -> f64 {
        if d.is_multiple_of(2) {
            (1..d / 2).map(|k| k as f64).product()
        } else {
            let mut g = PI.sqrt();
            let mut x = 0.5;
            while x < d as f64 / 2.0 - 0.25 {
                g *= x;
                x += 1.0;
            }
            g
        }
    };
    2.0 * PI.powf(dim as f64 / 2.0) / gamma_half(dim)
}

fn require_radial_dim(dim: u32) -> Result<()> {
    if dim < 2 {
        return Err(invalid(format!("radial functionals need dim >= 2, got {dim}")));
    }
    Ok(())
}

/// `∫_{R^d} |φ|²` with `r^{d-1} dr = ½ s^{d/2-1} ds`.
pub fn mass_radial(field: &RadialField, dim: u32) -> Result<f64> {
    require_radial_dim(dim)?;
    check_below_one(field.linf())?;
    let m2 = field.modulus_sq();
    let p = dim as f64 / 2.0 - 1.0;
    Ok(surface_area(dim) * 0.5 * field.grid.integrate_s_power(&m2, p))
}

/// Energy functional on a radial field; `|∂_r φ|² r^{d-1} dr = 2 s^{d/2} |∂_s φ|² ds`.
pub fn energy_radial(field: &RadialField, alpha: u32, dim: u32) -> Result<f64> {
    require_radial_dim(dim)?;
    check_below_one(field.linf())?;
    let grid = &field.grid;
    let ur = grid.d_ds(&field.re);
    let ui = grid.d_ds(&field.im);
    let m2 = field.modulus_sq();
    let a = alpha as i32;
    let grad: Vec<f64> = m2
        .iter()
        .zip(ur.iter().zip(&ui))
        .map(|(m, (x, y))| (x * x + y * y) / (1.0 - m.powi(a)))
        .collect();
    let pot: Vec<f64> = m2.iter().map(|m| m.powi(a + 1)).collect();
    let half_d = dim as f64 / 2.0;
    let kinetic = 2.0 * grid.integrate_s_power(&grad, half_d);
    let potential = 0.5 * grid.integrate_s_power(&pot, half_d - 1.0);
    Ok(surface_area(dim) * (0.5 * kinetic - potential / (2.0 * (alpha as f64 + 1.0))))
}
