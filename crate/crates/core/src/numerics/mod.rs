//! Grids, quadrature, finite differences and small dense eigenproblems.

mod diff;
mod grid;
mod linalg;

pub use diff::{derivative_1d, derivative_at, fd_weights, gradient, hessian};
pub(crate) use diff::partial;
pub use grid::{integrate, Axis, Grid, ScalarField, MAX_DIM, MIN_POINTS};
pub(crate) use grid::dot_weights;
pub use linalg::{
    cholesky, expm, gen_eig_spd, gen_eig_spd_vectors, hermitian_eigenvalues, matrix_rows, max_abs,
    product_eigenvalues, serialize_matrix, spd_inverse, sym_eig, sym_sqrt, SymEig, SymMatrix,
};
