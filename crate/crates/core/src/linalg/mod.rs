//! Dense and sparse linear algebra kernels.

pub mod cholesky;
pub mod dense;
pub mod eigen;
pub mod lanczos;
pub mod poly;
pub mod sparse;

pub use cholesky::{cholesky_factor, BandCholesky, Cholesky};
pub use dense::{axpy, dot, norm2, DenseMatrix, DenseSymMatrix};
pub use eigen::{gen_sym_eigenvalues, gen_sym_eigenvalues_inv, sym_eigenvalues, Spectrum};
pub use lanczos::{pencil_ritz_values, LanczosOptions};
pub use poly::{chebyshev_t, cubic_discriminant, solve_cubic_real, solve_quadratic_real};
pub use sparse::CsrMatrix;
