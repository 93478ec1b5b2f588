//! Chebyshev collocation on `[0, s0]` through the map `s = (s0/2)(1 + l)`.
//!
//! Nodes run from `l = 1` (k = 0, the outer boundary `s = s0`) down to `l = -1`
//! (k = n, the origin `s = 0`).

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone)]
pub struct ChebGrid {
    n: usize,
    s0: f64,
    l_nodes: Vec<f64>,
    s_nodes: Vec<f64>,
    diff1: Mat<f64>,
    diff2: Mat<f64>,
    weights: Vec<f64>,
    weights_sqrt: Vec<f64>,
}

/// Builds a collocation grid of degree `n` on `[0, s0]`.
///
/// Derivatives with respect to `s` are `(2/s0) * diff1`; that factor is
/// applied by the caller.
pub fn cheb_grid(n: usize, s0: f64) -> Result<ChebGrid> {
    if n < 2 {
        return Err(invalid(format!("Chebyshev degree must be >= 2, got {n}")));
    }
    if !(s0 > 0.0 && s0.is_finite()) {
        return Err(invalid(format!("s0 must be positive and finite, got {s0}")));
    }
    let l_nodes = cheb_nodes(n);
    let s_nodes = l_nodes.iter().map(|l| 0.5 * s0 * (1.0 + l)).collect();
    let diff1 = cheb_diff_matrix(n);
    let diff2 = &diff1 * &diff1;
    let weights = weights_from_moments(n, plain_moment);
    let weights_sqrt = weights_from_moments(n, sqrt_moment);
    Ok(ChebGrid {
        n,
        s0,
        l_nodes,
        s_nodes,
        diff1,
        diff2,
        weights,
        weights_sqrt,
    })
}

impl ChebGrid {
    pub fn new(n: usize, s0: f64) -> Result<Self> {
        cheb_grid(n, s0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nodes, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn l_nodes(&self) -> &[f64] {
        &self.l_nodes
    }

    pub fn s_nodes(&self) -> &[f64] {
        &self.s_nodes
    }

    /// First-derivative matrix in `l`.
    pub fn diff1(&self) -> &Mat<f64> {
        &self.diff1
    }

    /// `diff1 * diff1`.
    pub fn diff2(&self) -> &Mat<f64> {
        &self.diff2
    }

    /// Clenshaw–Curtis weights for `∫_{-1}^{1} f(l) dl`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weights for `∫_{-1}^{1} f(l) sqrt(1 + l) dl`, exact for polynomial `f`
    /// of degree <= n.
    pub fn weights_sqrt(&self) -> &[f64] {
        &self.weights_sqrt
    }

    /// Chain factor `dl/ds = 2/s0`.
    pub fn ds_factor(&self) -> f64 {
        2.0 / self.s0
    }

    /// `d/ds` of nodal values.
    pub fn d_ds(&self, values: &[f64]) -> Vec<f64> {
        let c = self.ds_factor();
        mat_vec(&self.diff1, values).into_iter().map(|v| c * v).collect()
    }

    /// `d²/ds²` of nodal values.
    pub fn d2_ds2(&self, values: &[f64]) -> Vec<f64> {
        let c = self.ds_factor() * self.ds_factor();
        mat_vec(&self.diff2, values).into_iter().map(|v| c * v).collect()
    }

    /// `∫_0^{s0} v(s) s^p ds` for integer or half-integer `p >= 0`.
    ///
    /// Half-integer powers are folded into the `sqrt(1 + l)` weights so the
    /// rule stays spectrally accurate for odd dimensions.
    pub fn integrate_s_power(&self, values: &[f64], p: f64) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        let half = 0.5 * self.s0;
        let twice = 2.0 * p;
        assert!(
            p >= 0.0 && (twice - twice.round()).abs() < 1e-12,
            "power of s must be a non-negative multiple of 1/2"
        );
        let odd = (twice.round() as i64) % 2 == 1;
        if odd {
            let k = (p - 0.5).round() as i32;
            let sum: f64 = values
                .iter()
                .zip(&self.s_nodes)
                .zip(&self.weights_sqrt)
                .map(|((v, s), w)| v * s.powi(k) * w)
                .sum();
            sum * half * half.sqrt()
        } else {
            let k = p.round() as i32;
            let sum: f64 = values
                .iter()
                .zip(&self.s_nodes)
                .zip(&self.weights)
                .map(|((v, s), w)| v * s.powi(k) * w)
                .sum();
            sum * half
        }
    }

    /// Evaluates the interpolant of `values` at an arbitrary `s`; zero outside `[0, s0]`.
    pub fn interpolate(&self, values: &[f64], s: &[f64]) -> Vec<f64> {
        let coeffs = cheb_coeffs(values).expect("nodal values match grid");
        s.iter()
            .map(|&s| {
                if s > self.s0 || s < 0.0 {
                    0.0
                } else {
                    cheb_eval(&coeffs, 2.0 * s / self.s0 - 1.0)
                }
            })
            .collect()
    }
}

/// Canonical nodes `cos(kπ/n)`, evaluated in the symmetric sine form.
pub fn cheb_nodes(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| ((n as f64 - 2.0 * k as f64) * PI / (2.0 * n as f64)).sin())
        .collect()
}

/// Collocation differentiation matrix on `cos(kπ/n)`, `n >= 1`.
///
/// Off-diagonal node differences use the product-of-sines form; the diagonal
/// is the negative row sum.
pub fn cheb_diff_matrix(n: usize) -> Mat<f64> {
    assert!(n >= 1);
    let np1 = n + 1;
    let nf = n as f64;
    let c = |i: usize| if i == 0 || i == n { 2.0 } else { 1.0 };
    let mut d = Mat::<f64>::zeros(np1, np1);
    for i in 0..np1 {
        for j in 0..np1 {
            if i == j {
                continue;
            }
            let diff = 2.0
                * ((i + j) as f64 * PI / (2.0 * nf)).sin()
                * ((j as f64 - i as f64) * PI / (2.0 * nf)).sin();
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            d[(i, j)] = c(i) / c(j) * sign / diff;
        }
    }
    for i in 0..np1 {
        let mut sum = 0.0;
        for j in 0..np1 {
            if j != i {
                sum += d[(i, j)];
            }
        }
        d[(i, i)] = -sum;
    }
    d
}

/// `y_k = Σ_{m=0}^{n} b_m cos(π m k / n)` via an FFT of the even extension.
fn cosine_sum(b: &[f64]) -> Vec<f64> {
    let n = b.len() - 1;
    let len = 2 * n;
    let mut buf: Vec<Complex64> = Vec::with_capacity(len);
    buf.extend(b.iter().map(|&v| Complex64::new(v, 0.0)));
    buf.extend(b[1..n].iter().rev().map(|&v| Complex64::new(v, 0.0)));
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    (0..=n)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            0.5 * (buf[k].re + b[0] + sign * b[n])
        })
        .collect()
}

/// Coefficients `a_m` with `Σ a_m T_m(l_k) = values_k` on the `n + 1` canonical nodes.
pub fn cheb_coeffs(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::LengthMismatch {
            expected: 2,
            got: values.len(),
        });
    }
    let n = values.len() - 1;
    // Σ''_k f_k cos(mkπ/n) = y_m - (f_0 + (-1)^m f_n)/2
    let y = cosine_sum(values);
    let nf = n as f64;
    Ok((0..=n)
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let s = y[m] - 0.5 * (values[0] + sign * values[n]);
            let cm = if m == 0 || m == n { 2.0 } else { 1.0 };
            2.0 * s / (nf * cm)
        })
        .collect())
}

/// `max |a_m|` over the last 10% of indices (at least one).
pub fn trailing_magnitude(coeffs: &[f64]) -> f64 {
    let count = (coeffs.len() / 10).max(1);
    coeffs[coeffs.len() - count..]
        .iter()
        .fold(0.0, |acc, a| acc.max(a.abs()))
}

/// Clenshaw evaluation of `Σ a_m T_m(l)`.
pub fn cheb_eval(coeffs: &[f64], l: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &a in coeffs.iter().skip(1).rev() {
        let b0 = a + 2.0 * l * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + l * b1 - b2
}

/// Clenshaw–Curtis approximation of `∫_{-1}^{1} f(l) dl` from nodal values.
pub fn clenshaw_curtis(values: &[f64], grid: &ChebGrid) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: values.len(),
        });
    }
    Ok(values.iter().zip(grid.weights()).map(|(v, w)| v * w).sum())
}

/// `∫_{-1}^{1} T_k(x) dx`.
fn plain_moment(k: usize) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        let kf = k as f64;
        2.0 / (1.0 - kf * kf)
    }
}

/// `∫_{-1}^{1} sqrt(1 + x) T_m(x) dx`.
///
/// With `1 + x = 2u²` this is `2√2 ∫_{-1}^{1} u² T_{2m}(u) du`, a polynomial
/// moment.
fn sqrt_moment(m: usize) -> f64 {
    let k = 2 * m;
    let lower = if m >= 1 { k - 2 } else { 2 };
    let u2_moment = 0.5 * (plain_moment(k) + 0.5 * (plain_moment(k + 2) + plain_moment(lower)));
    2.0 * std::f64::consts::SQRT_2 * u2_moment
}

/// Interpolatory weights for the moments `μ_m = ∫ w(x) T_m(x) dx`.
fn weights_from_moments(n: usize, moment: impl Fn(usize) -> f64) -> Vec<f64> {
    let b: Vec<f64> = (0..=n)
        .map(|m| {
            let cm = if m == 0 || m == n { 2.0 } else { 1.0 };
            moment(m) / cm
        })
        .collect();
    let y = cosine_sum(&b);
    let nf = n as f64;
    y.iter()
        .enumerate()
        .map(|(k, yk)| {
            let gamma = if k == 0 || k == n { 0.5 } else { 1.0 };
            gamma * 2.0 / nf * yk
        })
        .collect()
}

pub(crate) fn mat_vec(m: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    let rows = m.nrows();
    let mut out = vec![0.0; rows];
    for (j, &vj) in v.iter().enumerate() {
        if vj == 0.0 {
            continue;
        }
        let col = m.col(j);
        for i in 0..rows {
            out[i] += col[i] * vj;
        }
    }
    out
}
