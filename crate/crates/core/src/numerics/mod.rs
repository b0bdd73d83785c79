//! Shared numerical kernels: complex Hermitian eigensolver, Brillouin-zone
//! grids with deterministic reductions, periodic finite differences, and
//! 1D adaptive quadrature.

mod eigh;
mod grid;
mod matrix;
mod quadrature;

pub use eigh::{
    hermitian_eigh, jacobi_eigh, orthonormality_error, reconstruction_error, tridiag_eigh, Eigh,
    JACOBI_MAX_DIM,
};
pub use grid::{grid_mean_and_min, grid_mean_vec, periodic_gradient, perp_sum, BzGrid, KahanSum};
pub use matrix::{hermiticity_defect, ComplexMatrix, HermitianMatrix, HERMITICITY_TOL};
pub use quadrature::adaptive_simpson;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("axis {axis} out of range for a {dims}-dimensional grid")]
    BadAxis { axis: usize, dims: usize },
    #[error("axis {axis} has {points} points; at least 3 required for central differences")]
    GridTooCoarse { axis: usize, points: usize },
}
