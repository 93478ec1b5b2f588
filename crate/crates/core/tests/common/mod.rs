//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

/// Right-hand side of the radial ODE in `r`, returning `φ''`.
fn phi_rr(r: f64, phi: f64, dphi: f64, alpha: u32, dim: u32, omega: f64) -> f64 {
    let a = alpha as f64;
    let p2a = phi.powi(2 * alpha as i32);
    let q = 1.0 - p2a;
    let forcing = (omega * phi - phi * p2a) * q - a * phi.powi(2 * alpha as i32 - 1) * dphi * dphi / q;
    if r == 0.0 {
        forcing / dim as f64
    } else {
        -(dim as f64 - 1.0) / r * dphi + forcing
    }
}

/// `φ(R)` for the initial value problem `φ(0) = peak`, `φ'(0) = 0`, by RK4
/// with step `dr`. Returns `None` if the state leaves `(-1, 1)`.
pub fn shoot(peak: f64, alpha: u32, dim: u32, omega: f64, big_r: f64, dr: f64) -> Option<f64> {
    let steps = (big_r / dr).round() as usize;
    let h = big_r / steps as f64;
    let c = phi_rr(0.0, peak, 0.0, alpha, dim, omega);
    // Series start one step away from the regular singular point.
    let mut r = h;
    let mut y = [peak + 0.5 * c * h * h, c * h];
    let f = |r: f64, y: [f64; 2]| [y[1], phi_rr(r, y[0], y[1], alpha, dim, omega)];
    for _ in 1..steps {
        let k1 = f(r, y);
        let k2 = f(r + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = f(r + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = f(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        r += h;
        if !(y[0].abs() < 1.0) {
            return None;
        }
        if y[0] < -0.5 {
            return Some(y[0]);
        }
    }
    Some(y[0])
}

/// Peak value of the positive solution with `φ(R) = 0`, by bisection on
/// `φ(0)` between `lo` and `hi`.
pub fn shooting_peak(alpha: u32, dim: u32, omega: f64, big_r: f64, dr: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        match shoot(mid, alpha, dim, omega, big_r, dr) {
            Some(v) if v > 0.0 => lo = mid,
            _ => hi = mid,
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}
