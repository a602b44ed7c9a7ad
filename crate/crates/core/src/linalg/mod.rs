//! Numeric substrate: exact rationals, dense complex matrices, operator norms
//! and low-rank operators.

mod lowrank;
mod matrix;
mod norm;
mod rational;

pub use lowrank::{gram_matrix, LowRankOperator, SparseVector};
pub use matrix::{
    adjoint, commutator, from_real, identity, is_finite, is_real, real_part, ComplexMatrix,
};
pub use norm::{
    hermitian_eigenvalues, operator_norm, operator_norm_with, power_norm, LinearOperator,
    NormEstimate, NormMethod, NormOptions,
};
pub use rational::{fraction_string, rational, Rational};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("power iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}
