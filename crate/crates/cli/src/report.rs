//! Post-processing of run outputs and the one-line run summary.

use std::fmt;
use std::path::Path;

use serde::Serialize;

use quasisol::diagnostics::{fit_final_state, Diagnostics, FinalFit};
use quasisol::io::read_column;

/// Frequency fitted to the trailing 10% of the `linf` column of a
/// diagnostics CSV.
pub fn fit_report(diagnostics: &Path, alpha: u32) -> quasisol::Result<FinalFit> {
    let t = read_column(diagnostics, "t")?;
    let linf = read_column(diagnostics, "linf")?;
    fit_final_state(&t, &linf, alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunSummary {
    pub final_time: f64,
    pub initial_linf: f64,
    pub final_linf: f64,
    pub max_linf: f64,
    /// Only for 1D runs whose diagnostics allow a fit.
    pub fitted_omega: Option<f64>,
    pub max_delta: f64,
    /// Relative spread `max |L∞ - mean| / mean` over the trailing 10% of samples.
    pub trailing_spread: f64,
}

impl RunSummary {
    pub fn from_diagnostics(d: &Diagnostics, fit: Option<FinalFit>) -> Self {
        let last = |v: &[f64]| v.last().copied().unwrap_or(f64::NAN);
        let count = (d.linf.len() / 10).max(1).min(d.linf.len());
        let tail = &d.linf[d.linf.len() - count..];
        let mean = tail.iter().sum::<f64>() / count.max(1) as f64;
        let spread = tail.iter().fold(0.0f64, |m, v| m.max((v - mean).abs())) / mean;
        Self {
            final_time: last(&d.times),
            initial_linf: d.linf.first().copied().unwrap_or(f64::NAN),
            final_linf: last(&d.linf),
            max_linf: d.linf.iter().copied().fold(f64::NAN, f64::max),
            fitted_omega: fit.map(|f| f.omega),
            max_delta: d.max_delta(),
            trailing_spread: spread,
        }
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={} final_linf={:.10}", self.final_time, self.final_linf)?;
        if let Some(w) = self.fitted_omega {
            write!(f, " fitted_omega={w:.6}")?;
        }
        write!(f, " max_delta={:.3e}", self.max_delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_constant_trace() {
        let mut d = Diagnostics::default();
        for i in 0..20 {
            d.push(i as f64, 0.9, 1.0, -1.0);
        }
        let s = RunSummary::from_diagnostics(&d, None);
        assert_eq!(s.trailing_spread, 0.0);
        assert_eq!(s.max_delta, 0.0);
        assert_eq!(s.final_time, 19.0);
        assert!(!s.to_string().contains("fitted"));
    }
}
