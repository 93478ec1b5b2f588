use super::{check_solitary, omega_star, ModelParams};
use crate::error::Result;

/// `ln(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// `ln(cosh² y)` without overflow.
fn ln_cosh_sq(y: f64) -> f64 {
    let y = y.abs();
    2.0 * y + 2.0 * (-2.0 * y).exp().ln_1p() - 4f64.ln()
}

/// `ln φ(x)` for the explicit profile `(1 + b cosh²(κx))^{-1/(2α)}`,
/// `b = ω*/ω - 1`, `κ = α√ω`.
pub(crate) fn ln_soliton(alpha: u32, omega: f64, x: f64) -> f64 {
    let a = alpha as f64;
    let b = omega_star(alpha) / omega - 1.0;
    let y = a * omega.sqrt() * x;
    -softplus(b.ln() + ln_cosh_sq(y)) / (2.0 * a)
}

const UNDERFLOW: f64 = 1e-300;

/// The 1D solitary wave at position `x` (evaluated in log form so that large
/// domains do not overflow `cosh`).
pub fn soliton_1d(params: &ModelParams, x: f64) -> Result<f64> {
    check_solitary(params.alpha, params.omega)?;
    let v = ln_soliton(params.alpha, params.omega, x).exp();
    Ok(if v < UNDERFLOW { 0.0 } else { v })
}

/// `φ'(x) = -(κ b / 2α) sinh(2κx) φ^{2α+1}`.
pub fn soliton_1d_derivative(params: &ModelParams, x: f64) -> Result<f64> {
    check_solitary(params.alpha, params.omega)?;
    let (alpha, omega) = (params.alpha, params.omega);
    let a = alpha as f64;
    let b = omega_star(alpha) / omega - 1.0;
    let kappa = a * omega.sqrt();
    let y = 2.0 * kappa * x;
    if y == 0.0 {
        return Ok(0.0);
    }
    let ya = y.abs();
    // ln sinh|y| = |y| + ln(1 - e^{-2|y|}) - ln 2
    let ln_sinh = ya + (-(-2.0 * ya).exp()).ln_1p() - 2f64.ln();
    let ln_mag = (kappa * b / (2.0 * a)).ln() + ln_sinh + (2.0 * a + 1.0) * ln_soliton(alpha, omega, x);
    let mag = ln_mag.exp();
    Ok(if mag < UNDERFLOW { 0.0 } else { -y.signum() * mag })
}

/// Peak value `(ω/ω*)^{1/(2α)}`.
pub fn soliton_max(params: &ModelParams) -> Result<f64> {
    check_solitary(params.alpha, params.omega)?;
    Ok((params.omega / params.omega_star()).powf(1.0 / (2.0 * params.alpha as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn p(alpha: u32, omega: f64) -> ModelParams {
        ModelParams::new(alpha, 1, omega).unwrap()
    }

    #[test]
    fn peak_values() {
        assert!((soliton_1d(&p(3, 0.02), 0.0).unwrap() - 0.08f64.powf(1.0 / 6.0)).abs() < 1e-15);
        assert!((soliton_1d(&p(3, 0.02), 0.0).unwrap() - 0.656_420).abs() < 1e-6);
        assert!((soliton_max(&p(3, 0.22)).unwrap() - 0.88f64.powf(1.0 / 6.0)).abs() < 1e-15);
        assert!((soliton_max(&p(3, 0.22)).unwrap() - 0.978_920).abs() < 1e-6);
        assert!(soliton_max(&p(3, 0.25 - 1e-12)).unwrap() > 1.0 - 1e-11);
        assert!(soliton_max(&p(3, 1e-18)).unwrap() < 1e-2);
    }

    #[test]
    fn closed_form_matches_direct_evaluation() {
        for (alpha, omega) in [(1, 0.3), (2, 0.1), (3, 0.22), (4, 0.05)] {
            let pp = p(alpha, omega);
            let a = alpha as f64;
            let b = omega_star(alpha) / omega - 1.0;
            for x in [-3.0, -0.5, 0.0, 0.7, 4.0] {
                let c = (a * omega.sqrt() * x).cosh();
                let direct = (1.0 + b * c * c).powf(-1.0 / (2.0 * a));
                assert!((soliton_1d(&pp, x).unwrap() - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn far_field_does_not_overflow() {
        let pp = p(3, 0.02);
        assert_eq!(soliton_1d(&pp, 1e6).unwrap(), 0.0);
        let v = soliton_1d(&pp, 300.0).unwrap();
        assert!(v > 0.0 && v < 1e-15);
        assert_eq!(soliton_1d_derivative(&pp, 1e6).unwrap(), 0.0);
    }

    #[test]
    fn even_and_decreasing() {
        let pp = p(3, 0.22);
        let mut prev = soliton_1d(&pp, 0.0).unwrap();
        for k in 1..200 {
            let x = k as f64 * 0.05;
            let v = soliton_1d(&pp, x).unwrap();
            assert_eq!(v, soliton_1d(&pp, -x).unwrap());
            assert!(v < prev && v > 0.0);
            prev = v;
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for (alpha, omega) in [(1, 0.3), (3, 0.22), (3, 0.02)] {
            let pp = p(alpha, omega);
            for x in [-2.0, 0.0, 0.3, 1.5, 6.0] {
                let h = 1e-5;
                let fd = (soliton_1d(&pp, x + h).unwrap() - soliton_1d(&pp, x - h).unwrap()) / (2.0 * h);
                let d = soliton_1d_derivative(&pp, x).unwrap();
                assert!((fd - d).abs() < 1e-8, "alpha {alpha} omega {omega} x {x}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn no_wave_at_threshold() {
        assert!(matches!(soliton_1d(&p(3, 0.25), 0.0), Err(Error::NoSolitaryWave { .. })));
        assert!(matches!(soliton_1d(&p(3, -0.1), 0.0), Err(Error::InvalidParameter(_))));
    }
}
