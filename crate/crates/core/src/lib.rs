//! Følner tilings, quasidiagonalizing projection families and crossed-product
//! commutator certificates on concrete amenable residually finite groups.
//!
//! The pipeline runs bottom-up:
//!
//! 1. [`group`]: exact element arithmetic and finite-index normal subgroups;
//! 2. [`folner`]: Følner boxes, boundary ratios, separating subgroups and
//!    tiles `G = K L`;
//! 3. [`projection`]: the counting function `phi^2`, the coset vectors and
//!    the projection `P`, with exact coset identities and commutator norms
//!    against the left regular representation;
//! 4. [`crossed`]: finite-dimensional algebras with group actions, compressions
//!    of the regular covariant representation, and the block-by-block
//!    commutator estimate for `Q (x) P`.

pub mod crossed;
pub mod folner;
pub mod group;
pub mod linalg;
pub mod projection;
pub mod tolerance;
