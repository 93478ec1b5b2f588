//! The spatial operator of the time-dependent equation for radial fields in
//! the variable `s = r²`:
//!
//! `N(φ) = -Δφ/q + 4s φ_s q_s/q² + 4sα|φ|^{2α-2}|φ_s|² φ/q² - |φ|^{2α} φ`,
//! with `q = 1 - |φ|^{2α}` and `Δ = 4s ∂_ss + 2d ∂_s`, so that
//! `i ∂_t φ = N(φ)`.

use super::field::{check_below_one, RadialField, RadialProfile};
use super::ModelParams;
use crate::error::Result;

/// Value of `N` at one node and its partial derivatives with respect to
/// `(u, v, u_s, v_s, u_ss, v_ss)`, where `φ = u + iv`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PointTerms {
    pub re: f64,
    pub im: f64,
    pub d_re: [f64; 6],
    pub d_im: [f64; 6],
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn point_terms(
    u: f64,
    v: f64,
    us: f64,
    vs: f64,
    uss: f64,
    vss: f64,
    s: f64,
    alpha: u32,
    dim: u32,
    with_partials: bool,
) -> PointTerms {
    let a = alpha as f64;
    let d = dim as f64;
    let rho = u * u + v * v;
    let r = rho.powi(alpha as i32 - 1);
    let p = r * rho;
    let q = 1.0 - p;
    let w = u * us + v * vs;
    let g = us * us + vs * vs;
    let lr = 4.0 * s * uss + 2.0 * d * us;
    let li = 4.0 * s * vss + 2.0 * d * vs;
    let k = 4.0 * s * a * r / (q * q);
    let qr = g * u - 2.0 * w * us;
    let qi = g * v - 2.0 * w * vs;

    let mut out = PointTerms {
        re: -lr / q + k * qr - p * u,
        im: -li / q + k * qi - p * v,
        ..Default::default()
    };
    if !with_partials {
        return out;
    }

    let (pu, pv) = (2.0 * a * r * u, 2.0 * a * r * v);
    let (ru, rv) = if alpha == 1 {
        (0.0, 0.0)
    } else {
        let c = (a - 1.0) * rho.powi(alpha as i32 - 2) * 2.0;
        (c * u, c * v)
    };
    let q2 = q * q;
    let q3 = q2 * q;
    let ku = 4.0 * s * a * (ru / q2 + 2.0 * r * pu / q3);
    let kv = 4.0 * s * a * (rv / q2 + 2.0 * r * pv / q3);

    out.d_re = [
        -lr * pu / q2 + ku * qr + k * (g - 2.0 * us * us) - pu * u - p,
        -lr * pv / q2 + kv * qr - 2.0 * k * us * vs - pv * u,
        -2.0 * d / q - 2.0 * k * w,
        k * (2.0 * vs * u - 2.0 * v * us),
        -4.0 * s / q,
        0.0,
    ];
    out.d_im = [
        -li * pu / q2 + ku * qi - 2.0 * k * us * vs - pu * v,
        -li * pv / q2 + kv * qi + k * (g - 2.0 * vs * vs) - pv * v - p,
        k * (2.0 * us * v - 2.0 * u * vs),
        -2.0 * d / q - 2.0 * k * w,
        0.0,
        -4.0 * s / q,
    ];
    out
}

/// `N(φ)` at every node, returned as (real, imaginary) parts.
pub fn radial_operator(field: &RadialField, alpha: u32, dim: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    check_below_one(field.linf())?;
    let grid = &field.grid;
    let (us, vs) = (grid.d_ds(&field.re), grid.d_ds(&field.im));
    let (uss, vss) = (grid.d2_ds2(&field.re), grid.d2_ds2(&field.im));
    let n = grid.len();
    let mut re = Vec::with_capacity(n);
    let mut im = Vec::with_capacity(n);
    for j in 0..n {
        let t = point_terms(
            field.re[j],
            field.im[j],
            us[j],
            vs[j],
            uss[j],
            vss[j],
            grid.s_nodes()[j],
            alpha,
            dim,
            false,
        );
        re.push(t.re);
        im.push(t.im);
    }
    Ok((re, im))
}

/// `‖N(φ) + ωφ‖∞` over all nodes except the Dirichlet node `s = s0`.
pub fn stationary_residual_identity(profile: &RadialProfile, params: &ModelParams) -> Result<f64> {
    let (re, im) = radial_operator(&profile.to_field(), params.alpha, params.dim)?;
    Ok(re
        .iter()
        .zip(&im)
        .zip(&profile.values)
        .skip(1)
        .fold(0.0, |m, ((nr, ni), phi)| m.max((nr + params.omega * phi).hypot(*ni))))
}
