//! Periodic grid, fields, spectral operators, projectors, mollifier and the
//! variable-coefficient elliptic solve.

mod elliptic;
mod field;
mod grid;
mod mollifier;
pub mod ops;
mod snapshot;

pub use elliptic::{
    solve_variable_elliptic, solve_variable_elliptic_with, EllipticOptions, EllipticSolution,
    DEFAULT_RTOL,
};
pub use field::{ScalarField, TensorField, VectorField};
pub use grid::SpectralGrid;
pub use mollifier::{bump, mollify, HasGrid, Mollifier};
pub use ops::{
    antisym_grad, divergence, gradient, jacobian, laplacian, leray_project, partial,
    project_friedrichs, solve_helmholtz,
};
pub use snapshot::Snapshot;

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("expected {expected} samples, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("invalid mollifier: {0}")]
    InvalidMollifier(String),
    #[error("elliptic coefficient must be positive and finite (min {min}, max {max})")]
    NonPositiveCoefficient { min: f64, max: f64 },
    #[error("elliptic solve did not converge: {iterations} iterations, relative residual {relative_residual:e}")]
    EllipticNonConvergence {
        iterations: usize,
        relative_residual: f64,
    },
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
