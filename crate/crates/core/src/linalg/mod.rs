//! Dense real linear algebra for small plant dimensions.
//!
//! Everything here is a pure function of its inputs. Tolerances are fixed
//! constants rather than parameters so results are reproducible.

mod cholesky;
mod eigen;
mod expm;
mod lyapunov;
mod matrix;
mod solve;
mod symeig;

pub use cholesky::{cholesky, solve_lower, solve_upper_transposed};
pub use eigen::{eigenvalues, spectral_abscissa};
pub use expm::expm;
pub use lyapunov::{lyap_solve, MAX_LYAPUNOV_DIM};
pub use matrix::Matrix;
pub use solve::{inverse, rank, solve_linear};
pub use symeig::{sym_eig, SymEig};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,
    #[error("matrix is singular to working precision")]
    SingularMatrix,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("iteration did not converge: {0}")]
    NoConvergence(&'static str),
    #[error("dimension {dim} exceeds the supported maximum {max}")]
    TooLarge { dim: usize, max: usize },
}
