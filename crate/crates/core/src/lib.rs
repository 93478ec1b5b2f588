//! Solitary waves of the saturated quasi-linear Schrödinger equation
//!
//! `i∂tφ = -∇·(∇φ/(1-|φ|^{2α})) + α|φ|^{2α-2}|∇φ|²φ/(1-|φ|^{2α})² - |φ|^{2α}φ`:
//! construction of solitary waves, mass/energy bifurcation diagrams and
//! time-evolution experiments in 1D (periodic Fourier) and for radial data
//! in `d >= 2` (Chebyshev collocation in `s = r²`).

pub mod bifurcation;
pub mod diagnostics;
pub mod error;
pub mod evolve1d;
pub mod evolver;
pub mod groundstate;
pub mod io;
mod linalg;
pub mod model;
pub mod spectral;

pub use error::{Error, Result};
