//! Finite-dimensional C*-algebras with group actions, compressions of the
//! regular covariant representation `(sigma, I (x) lambda)` to finite windows,
//! and the coset-by-coset commutator estimate for `Q (x) P`.

mod action;
mod algebra;
mod compression;
mod presets;
mod theorem7;

use thiserror::Error;

use crate::folner::FolnerError;
use crate::group::GroupError;
use crate::linalg::LinalgError;
use crate::projection::ProjectionError;

pub use action::{defect_set, ActionInstance, ActionKind};
pub use algebra::FiniteDimAlgebra;
pub use compression::{
    covariance_residual, crossed_compression, interior_points, lambda_tensor_compression,
    sigma_compression, CompressionOperator, CrossedElement,
};
pub use presets::{
    box_level, bunce_deddens_instance, convergent_denominators, golden_mean, rotation_instance,
    silver_mean, tilted_projection, Level,
};
pub use theorem7::{theorem7_commutator, CosetBlock, Theorem7Report};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CrossedError {
    #[error("algebra: {0}")]
    Algebra(String),
    #[error("implementer {index} is not unitary (residual {residual:.3e})")]
    NotUnitary { index: usize, residual: f64 },
    #[error("action is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("action does not preserve norms (residual {0:.3e})")]
    NotIsometric(f64),
    #[error("test element {0} is not self-adjoint")]
    NotSelfAdjoint(usize),
    #[error("Q is not an orthogonal projection (residual {0:.3e})")]
    NotProjection(f64),
    #[error("unsupported action: {0}")]
    Unsupported(String),
    #[error("window: {0}")]
    Window(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Folner(#[from] FolnerError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
