//! Mass and energy along the branch of solitary waves, slope-based stability
//! labels, the critical frequency and asymptotic fits.
//!
//! In one dimension the explicit profile reduces both functionals to
//! integrals over `u >= 0` of powers of `1 + ε sinh²u`, `ε = 1 - ω/ω*`:
//!
//! `M = (2/(α√ω)) (ω/ω*)^{1/α} ∫ (1 + ε sinh²u)^{-1/α} du`
//!
//! `E = (ω*/(α√ω)) (ω/ω*)^{1+1/α} ∫ (ε sinh²u - 1)(1 + ε sinh²u)^{-1-1/α} du`
//!
//! The first is the `z`-integral `∫ (1+z²)^{-1/α} (ε+z²)^{-1/2} dz` after
//! `z = √ε sinh u`, which removes the near-origin peak as `ε → 0`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::groundstate::{continuation, ContinuationPlan, SolverControls};
use crate::io::{fmt_num, write_csv, write_json};
use crate::model::{check_solitary, omega_star};

const QUAD_TOL: f64 = 1e-13;
/// Value of `ε sinh²u` beyond which the tail is summed in closed form.
const TAIL_START: f64 = 1e14;

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    quadrature::double_exponential::integrate(f, a, b, QUAD_TOL).integral
}

/// `∫_0^∞ (1 + ε sinh²u)^{-p} g(ε sinh²u) du`, where `g → 1` at infinity,
/// with the tail past `ε sinh²U = TAIL_START` replaced by its leading term.
fn sinh_integral(alpha: u32, eps: f64, p: f64, g: impl Fn(f64) -> f64) -> f64 {
    let a = alpha as f64;
    let big_u = 0.5 * (4.0 * TAIL_START / eps).ln();
    let body = integrate(
        |u| {
            let x = eps * u.sinh().powi(2);
            g(x) * (1.0 + x).powf(-p)
        },
        0.0,
        big_u,
    );
    // (ε e^{2u}/4)^{-1/α} integrated from U.
    let tail = 0.5 * a * (0.25 * eps).powf(-1.0 / a) * (-2.0 * big_u / a).exp();
    body + tail
}

fn eps_of(alpha: u32, omega: f64) -> Result<f64> {
    check_solitary(alpha, omega)?;
    Ok(1.0 - omega / omega_star(alpha))
}

/// 1D mass `∫|φ_ω|² dx` from the reduced integral.
pub fn mass_1d_reduced(alpha: u32, omega: f64) -> Result<f64> {
    let eps = eps_of(alpha, omega)?;
    let a = alpha as f64;
    let pre = 2.0 / (a * omega.sqrt()) * (omega / omega_star(alpha)).powf(1.0 / a);
    Ok(pre * sinh_integral(alpha, eps, 1.0 / a, |_| 1.0))
}

/// 1D energy of the explicit solitary wave.
pub fn energy_1d_reduced(alpha: u32, omega: f64) -> Result<f64> {
    let eps = eps_of(alpha, omega)?;
    let a = alpha as f64;
    let star = omega_star(alpha);
    let pre = star / (a * omega.sqrt()) * (omega / star).powf(1.0 + 1.0 / a);
    // (x - 1)(1 + x)^{-1-1/α} = (1 + x)^{-1/α} (x - 1)/(x + 1)
    Ok(pre * sinh_integral(alpha, eps, 1.0 / a, |x| (x - 1.0) / (x + 1.0)))
}

/// `lim_{ω→0} M(ω) ω^{1/2-1/α}` in one dimension,
/// `(2/α) ω*^{-1/α} ∫_0^∞ sech(u)^{2/α} du`, the mass of the semilinear soliton.
pub fn mass_1d_zero_constant(alpha: u32) -> f64 {
    let a = alpha as f64;
    let body = integrate(|u| u.cosh().powf(-2.0 / a), 0.0, 40.0 * a);
    2.0 / a * omega_star(alpha).powf(-1.0 / a) * body
}

/// Stability class from the sign of `dM/dω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    Unstable,
    UndeterminedEndpoint,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::UndeterminedEndpoint => "undetermined-endpoint",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPoint {
    pub omega: f64,
    pub mass: f64,
    pub energy: f64,
    /// Central difference over the neighbouring sweep points; NaN at the ends.
    pub dmass_domega: f64,
    pub stability: Stability,
}

/// Radial solver settings used by sweeps in `d >= 2`.
#[derive(Debug, Clone)]
pub struct RadialSweep {
    pub n: usize,
    pub s0: f64,
    pub controls: SolverControls,
}

impl Default for RadialSweep {
    fn default() -> Self {
        Self {
            n: 200,
            s0: 1e3,
            controls: SolverControls::default(),
        }
    }
}

#[derive(Debug)]
pub struct SweepResult {
    pub points: Vec<BifurcationPoint>,
    /// Frequency at which the radial continuation stopped, with the cause.
    pub failure: Option<(f64, Error)>,
}

fn label(points: &mut [BifurcationPoint]) {
    let n = points.len();
    for i in 0..n {
        if i == 0 || i + 1 == n {
            points[i].dmass_domega = f64::NAN;
            points[i].stability = Stability::UndeterminedEndpoint;
        } else {
            let slope = (points[i + 1].mass - points[i - 1].mass) / (points[i + 1].omega - points[i - 1].omega);
            points[i].dmass_domega = slope;
            points[i].stability = if slope > 0.0 {
                Stability::Stable
            } else {
                Stability::Unstable
            };
        }
    }
}

/// Mass, energy and slope at each frequency of `omegas` (strictly monotone).
/// `d = 1` uses the explicit profile; `d >= 2` runs a continuation with `radial`.
pub fn sweep(alpha: u32, dim: u32, omegas: &[f64], radial: &RadialSweep) -> Result<SweepResult> {
    if omegas.is_empty() {
        return Err(invalid("empty frequency grid"));
    }
    let inc = omegas.windows(2).all(|w| w[1] > w[0]);
    let dec = omegas.windows(2).all(|w| w[1] < w[0]);
    if !(inc || dec) {
        return Err(invalid("frequency grid must be strictly monotone"));
    }
    for &w in omegas {
        check_solitary(alpha, w)?;
    }
    let blank = |omega, mass, energy| BifurcationPoint {
        omega,
        mass,
        energy,
        dmass_domega: f64::NAN,
        stability: Stability::UndeterminedEndpoint,
    };
    let (mut points, failure) = if dim == 1 {
        let pts = omegas
            .iter()
            .map(|&w| Ok(blank(w, mass_1d_reduced(alpha, w)?, energy_1d_reduced(alpha, w)?)))
            .collect::<Result<Vec<_>>>()?;
        (pts, None)
    } else {
        let plan = ContinuationPlan::new(radial.n, radial.s0, omegas);
        let run = continuation(&plan, alpha, dim, &radial.controls)?;
        let pts = run
            .solutions
            .iter()
            .map(|gs| Ok(blank(gs.params.omega, gs.mass()?, gs.energy()?)))
            .collect::<Result<Vec<_>>>()?;
        (pts, run.failure)
    };
    if dec {
        points.reverse();
    }
    label(&mut points);
    Ok(SweepResult { points, failure })
}

/// Indices `i` where the slope changes sign between consecutive interior points.
pub fn slope_sign_changes(points: &[BifurcationPoint]) -> Vec<usize> {
    let slopes: Vec<(usize, f64)> = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.dmass_domega.is_finite())
        .map(|(i, p)| (i, p.dmass_domega))
        .collect();
    slopes
        .windows(2)
        .filter(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0))
        .map(|w| w[0].0)
        .collect()
}

/// Step of the central difference used for the 1D slope.
const SLOPE_STEP: f64 = 1e-6;

fn slope_1d(alpha: u32, omega: f64) -> Result<f64> {
    let h = SLOPE_STEP * omega_star(alpha);
    Ok((mass_1d_reduced(alpha, omega + h)? - mass_1d_reduced(alpha, omega - h)?) / (2.0 * h))
}

/// Frequency where `dM/dω` vanishes inside `bracket`.
///
/// For `d = 1` this bisects the central-difference slope to a bracket width
/// of `1e-6`; for `d >= 2` it sweeps `radial_points` frequencies across the
/// bracket and returns the midpoint of the interval where the slope changes
/// sign.
pub fn find_omega_c(
    alpha: u32,
    dim: u32,
    bracket: (f64, f64),
    radial: &RadialSweep,
    radial_points: usize,
) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(invalid("bracket must satisfy lo < hi"));
    }
    let no_change = Error::NoSignChange { lo, hi };
    if dim == 1 {
        let h = SLOPE_STEP * omega_star(alpha);
        check_solitary(alpha, lo - h)?;
        check_solitary(alpha, hi + h)?;
        let s_lo = slope_1d(alpha, lo)?;
        let s_hi = slope_1d(alpha, hi)?;
        if (s_lo > 0.0) == (s_hi > 0.0) {
            return Err(no_change);
        }
        while hi - lo > 1e-7 {
            let mid = 0.5 * (lo + hi);
            if (slope_1d(alpha, mid)? > 0.0) == (s_lo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Ok(0.5 * (lo + hi));
    }
    if radial_points < 4 {
        return Err(invalid("need at least 4 sweep points for d >= 2"));
    }
    let omegas: Vec<f64> = (0..radial_points)
        .map(|i| lo + (hi - lo) * i as f64 / (radial_points - 1) as f64)
        .collect();
    let run = sweep(alpha, dim, &omegas, radial)?;
    if let Some((_, e)) = run.failure {
        return Err(e);
    }
    match slope_sign_changes(&run.points).first() {
        Some(&i) => Ok(0.5 * (run.points[i].omega + run.points[i + 1].omega)),
        None => Err(no_change),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AsymptoticLaw {
    /// `M ≈ c·(-ln(ω*-ω)) + b`, `d = 1`.
    LogDivergenceAtStar,
    /// `M ≈ Γ (ω*-ω)^p`, `d >= 2`.
    PowerDivergenceAtStar,
    /// `M ≈ c ω^p` as `ω → 0`.
    PowerLawAtZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteFit {
    pub law: AsymptoticLaw,
    /// Slope for the log law, prefactor for the power laws.
    pub coefficient: f64,
    /// Fitted exponent (NaN for the log law).
    pub exponent: f64,
    /// Frequency range of the points used.
    pub window: (f64, f64),
    /// Root-mean-square residual of the least-squares fit.
    pub residual: f64,
}

/// Least-squares line `y = a + b x`, returning `(a, b, rms)`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rms = (x.iter().zip(y).map(|(xi, yi)| (yi - a - b * xi).powi(2)).sum::<f64>() / n).sqrt();
    (a, b, rms)
}

fn window_of(points: &[(f64, f64)]) -> (f64, f64) {
    points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)))
}

fn decades(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (hi / lo).log10()
}

/// Fit of `M` near `ω*` from `(ω, M)` pairs.
///
/// `d = 1` needs 5 points whose distances `ω*-ω` span two decades; `d >= 2`
/// needs them to span a factor of 3.
pub fn fit_asymptote_star(points: &[(f64, f64)], alpha: u32, dim: u32) -> Result<AsymptoteFit> {
    let star = omega_star(alpha);
    for &(w, m) in points {
        check_solitary(alpha, w)?;
        if !(m > 0.0) {
            return Err(invalid(format!("mass must be positive, got {m} at omega = {w}")));
        }
    }
    if points.len() < 5 {
        return Err(Error::InsufficientWindow(format!("{} points, need at least 5", points.len())));
    }
    // A factor of 3 in ω*-ω for d >= 2, slightly under half a decade.
    let need = if dim == 1 { 2.0 } else { 3f64.log10() - 1e-9 };
    let span = decades(points.iter().map(|p| star - p.0));
    if !(span >= need) {
        return Err(Error::InsufficientWindow(format!(
            "omega* - omega spans {span:.3} decades, need {need:.3}"
        )));
    }
    let x: Vec<f64> = points.iter().map(|p| (star - p.0).ln()).collect();
    let window = window_of(points);
    if dim == 1 {
        let xs: Vec<f64> = x.iter().map(|v| -v).collect();
        let m: Vec<f64> = points.iter().map(|p| p.1).collect();
        let (_, slope, rms) = line_fit(&xs, &m);
        Ok(AsymptoteFit {
            law: AsymptoticLaw::LogDivergenceAtStar,
            coefficient: slope,
            exponent: f64::NAN,
            window,
            residual: rms,
        })
    } else {
        let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
        let (a, b, rms) = line_fit(&x, &y);
        Ok(AsymptoteFit {
            law: AsymptoticLaw::PowerDivergenceAtStar,
            coefficient: a.exp(),
            exponent: b,
            window,
            residual: rms,
        })
    }
}

/// Log-log fit `M ≈ c ω^p` from `(ω, M)` pairs spanning at least a decade.
pub fn fit_asymptote_zero(points: &[(f64, f64)], alpha: u32, dim: u32) -> Result<AsymptoteFit> {
    let _ = dim;
    for &(w, m) in points {
        check_solitary(alpha, w)?;
        if !(m > 0.0) {
            return Err(invalid(format!("mass must be positive, got {m} at omega = {w}")));
        }
    }
    if points.len() < 2 {
        return Err(Error::InsufficientWindow(format!("{} points, need at least 2", points.len())));
    }
    let span = decades(points.iter().map(|p| p.0));
    if !(span >= 1.0) {
        return Err(Error::InsufficientWindow(format!("omega spans {span:.2} decades, need 1")));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (a, b, rms) = line_fit(&x, &y);
    Ok(AsymptoteFit {
        law: AsymptoticLaw::PowerLawAtZero,
        coefficient: a.exp(),
        exponent: b,
        window: window_of(points),
        residual: rms,
    })
}

/// Which closed-form constant a measured log-law slope is closer to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLawReport {
    pub slope: f64,
    /// `1/(α√ω*)`.
    pub full_constant: f64,
    /// `1/(2α√ω*)`.
    pub half_constant: f64,
    pub relative_to_full: f64,
    pub relative_to_half: f64,
    pub matches: LogLawMatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogLawMatch {
    Full,
    Half,
    Neither,
}

pub fn log_law_report(fit: &AsymptoteFit, alpha: u32) -> LogLawReport {
    let full = 1.0 / (alpha as f64 * omega_star(alpha).sqrt());
    let half = 0.5 * full;
    let rf = (fit.coefficient - full).abs() / full;
    let rh = (fit.coefficient - half).abs() / half;
    let matches = if rf <= 0.05 {
        LogLawMatch::Full
    } else if rh <= 0.05 {
        LogLawMatch::Half
    } else {
        LogLawMatch::Neither
    };
    LogLawReport {
        slope: fit.coefficient,
        full_constant: full,
        half_constant: half,
        relative_to_full: rf,
        relative_to_half: rh,
        matches,
    }
}

/// The integrand of the reduced mass and its frequency derivatives, and the
/// quadratic form whose positivity gives convexity of `M` for `α > 2`.
pub mod integrand {
    use crate::error::{invalid, Result};
    use crate::model::{check_solitary, omega_star};

    fn args(alpha: u32, omega: f64, z: f64) -> Result<(f64, f64)> {
        check_solitary(alpha, omega)?;
        if !(z > 0.0 && z.is_finite()) {
            return Err(invalid(format!("z must be positive and finite, got {z}")));
        }
        let star = omega_star(alpha);
        Ok((star, (1.0 - omega / star) + z * z))
    }

    /// `f = (1+z²)^{-1/α} ((1-ω/ω*)+z²)^{-1/2}`.
    pub fn f(alpha: u32, omega: f64, z: f64) -> Result<f64> {
        let (_, w) = args(alpha, omega, z)?;
        Ok((1.0 + z * z).powf(-1.0 / alpha as f64) * w.powf(-0.5))
    }

    /// `∂_ω f = (1/(2ω*)) (1+z²)^{-1/α} ((1-ω/ω*)+z²)^{-3/2}`.
    pub fn df(alpha: u32, omega: f64, z: f64) -> Result<f64> {
        let (star, w) = args(alpha, omega, z)?;
        Ok((1.0 + z * z).powf(-1.0 / alpha as f64) * w.powf(-1.5) / (2.0 * star))
    }

    /// `∂²_ω f = (3/(4ω*²)) (1+z²)^{-1/α} ((1-ω/ω*)+z²)^{-5/2}`.
    pub fn d2f(alpha: u32, omega: f64, z: f64) -> Result<f64> {
        let (star, w) = args(alpha, omega, z)?;
        Ok(3.0 / (4.0 * star * star) * (1.0 + z * z).powf(-1.0 / alpha as f64) * w.powf(-2.5))
    }

    /// `G_α = ((3α-2)/(3α))((α-2)/α) W² - (2(α-2)/(3α)) W ω/ω* + (ω/ω*)²`
    /// with `W = (1-ω/ω*)+z²`.
    pub fn g(alpha: u32, omega: f64, z: f64) -> Result<f64> {
        let (star, w) = args(alpha, omega, z)?;
        let a = alpha as f64;
        let r = omega / star;
        Ok((3.0 * a - 2.0) / (3.0 * a) * (a - 2.0) / a * w * w - 2.0 * (a - 2.0) / (3.0 * a) * w * r + r * r)
    }
}

#[derive(Serialize)]
struct FitsFile<'a> {
    fits: &'a [AsymptoteFit],
}

/// Writes `bifurcation.csv` and, when `fits` is non-empty, `fits.json`.
pub fn write_bifurcation(dir: &Path, points: &[BifurcationPoint], fits: &[AsymptoteFit]) -> Result<()> {
    let rows = points.iter().map(|p| {
        vec![
            fmt_num(p.omega),
            fmt_num(p.mass),
            fmt_num(p.energy),
            fmt_num(p.dmass_domega),
            p.stability.as_str().to_string(),
        ]
    });
    write_csv(
        &dir.join("bifurcation.csv"),
        &["omega", "mass", "energy", "dmass_domega", "stability"],
        rows,
    )?;
    if !fits.is_empty() {
        write_json(&dir.join("fits.json"), &FitsFile { fits })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_two_limit() {
        let m = mass_1d_reduced(2, 1e-6).unwrap();
        let limit = 3f64.sqrt() * std::f64::consts::PI / 2.0;
        assert!((m - limit).abs() < 5e-3 * limit, "{m}");
        assert!((mass_1d_zero_constant(2) - limit).abs() < 1e-10);
    }

    #[test]
    fn small_frequency_mass_vanishes_for_alpha_one() {
        assert!(mass_1d_reduced(1, 1e-6).unwrap() <= 1e-2);
    }

    #[test]
    fn domain_is_checked() {
        assert!(matches!(mass_1d_reduced(3, 0.25), Err(Error::NoSolitaryWave { .. })));
        assert!(mass_1d_reduced(3, 0.0).is_err());
        assert!(energy_1d_reduced(1, 0.6).is_err());
        assert!(integrand::f(3, 0.1, 0.0).is_err());
        assert!(integrand::g(3, 0.3, 1.0).is_err());
    }

    #[test]
    fn derivative_identity() {
        for &(alpha, omega, z) in &[(3, 0.1, 1.0), (1, 0.45, 0.01), (5, 0.01, 30.0)] {
            let star = omega_star(alpha);
            let w = (1.0 - omega / star) + z * z;
            let lhs = integrand::f(alpha, omega, z).unwrap() / (2.0 * star) / w;
            let rhs = integrand::df(alpha, omega, z).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
            let lhs2 = 1.5 / star * rhs / w;
            let rhs2 = integrand::d2f(alpha, omega, z).unwrap();
            assert!((lhs2 - rhs2).abs() <= 1e-12 * rhs2.abs());
        }
        assert!(integrand::g(3, 0.1, 1.0).unwrap() > 0.0);
    }

    #[test]
    fn fits_need_a_window() {
        let same = vec![(0.2, 1.0); 2];
        assert!(matches!(fit_asymptote_star(&same, 3, 1), Err(Error::InsufficientWindow(_))));
        assert!(matches!(fit_asymptote_zero(&same, 3, 1), Err(Error::InsufficientWindow(_))));
        let narrow: Vec<(f64, f64)> = (0..6).map(|i| (0.2 + 0.001 * i as f64, 1.0)).collect();
        assert!(matches!(fit_asymptote_star(&narrow, 3, 1), Err(Error::InsufficientWindow(_))));
    }

    #[test]
    fn exact_power_law_is_recovered() {
        let pts: Vec<(f64, f64)> = (0..8)
            .map(|i| {
                let d = 0.15 * 10f64.powf(-0.1 * i as f64);
                (0.5 - d, 2.5 * d.powf(-3.0))
            })
            .collect();
        let fit = fit_asymptote_star(&pts, 1, 3).unwrap();
        assert!((fit.exponent + 3.0).abs() < 1e-10);
        assert!((fit.coefficient - 2.5).abs() < 1e-9);
        assert!(fit.residual < 1e-10);
        let pts: Vec<(f64, f64)> = (0..8).map(|i| {
            let w = 1e-4 * 2f64.powi(i);
            (w, 0.7 * w.powf(0.5))
        }).collect();
        let fit = fit_asymptote_zero(&pts, 1, 1).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-12);
    }

    #[test]
    fn labels_follow_slopes() {
        let omegas: Vec<f64> = (1..20).map(|i| 0.0125 * i as f64).collect();
        let run = sweep(3, 1, &omegas, &RadialSweep::default()).unwrap();
        assert_eq!(run.points[0].stability, Stability::UndeterminedEndpoint);
        assert_eq!(run.points.last().unwrap().stability, Stability::UndeterminedEndpoint);
        for p in &run.points[1..run.points.len() - 1] {
            assert_eq!(p.stability == Stability::Stable, p.dmass_domega > 0.0);
        }
        assert_eq!(slope_sign_changes(&run.points).len(), 1);
        assert!(sweep(3, 1, &[], &RadialSweep::default()).is_err());
    }
}
