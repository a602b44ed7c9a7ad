//! Numeric tolerances shared by every certificate in the crate.
//!
//! Exact quantities (coset sums, variations, boundary ratios) are compared in
//! rational arithmetic with no slack at all. The constants below only apply
//! to floating-point norms and identities.

/// Slack for identities that hold exactly in real arithmetic and only pick up
/// rounding (Gram matrices, window enlargement, finite-group oracles).
pub const IDENTITY: f64 = 1e-12;

/// Slack for structural operator identities that go through a matrix product
/// or decomposition (idempotency, block orthogonality, norm-equals-max-block).
pub const STRUCTURE: f64 = 1e-10;

/// Slack added to the right-hand side of every proved norm inequality.
pub const INEQUALITY: f64 = 1e-9;

/// Dimension above which dense singular value decompositions give way to
/// power iteration or Gram-system reductions.
pub const DENSE_THRESHOLD: usize = 2000;

/// Default cap on the index of any finite-index subgroup we enumerate.
pub const DEFAULT_INDEX_CAP: u64 = 100_000;

/// Target accuracy for iterative operator norms.
pub const NORM_TOL: f64 = 1e-13;
