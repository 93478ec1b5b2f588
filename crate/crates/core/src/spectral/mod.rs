//! Chebyshev collocation and periodic Fourier differentiation.

mod chebyshev;
mod fourier;

pub use chebyshev::{
    cheb_coeffs, cheb_diff_matrix, cheb_eval, cheb_grid, cheb_nodes, clenshaw_curtis,
    trailing_magnitude, ChebGrid,
};
pub(crate) use chebyshev::mat_vec;
pub(crate) use fourier::diff_in_place;
pub use fourier::{fourier_diff, Fourier1DGrid};
