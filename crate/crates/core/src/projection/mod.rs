//! The counting function `phi^2(x) = |K ∩ F x| / |F|`, the coset vectors
//! built from its square root, and the projection `P = sum_y |xi_y><xi_y|`.
//!
//! `phi^2` is kept as exact integer counts over `|F|`, so the coset-sum and
//! coset-variation identities are checked in rational arithmetic with zero
//! slack. Floating point only enters once amplitudes are formed.

mod commutator;
mod vectors;

use std::collections::HashMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::folner::{boundary_ratio, BoundaryRatio, FolnerSet, Tiling};
use crate::group::GroupElement;
use crate::linalg::{LinalgError, Rational};

pub use commutator::{
    commutator_window, enlarge_window, lambda_commutator_norm, lambda_commutator_norm_on,
    lambda_envelope, CommutatorNorm,
};
pub use vectors::{build_projection, CosetVector, QdProjection, Window};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectionError {
    #[error("Følner set and tiling belong to different groups")]
    GroupMismatch,
    #[error("{a} and {b} of the Følner set share a coset of L")]
    NotSeparated { a: String, b: String },
    #[error("coset sum at {label} is {value}, not 1")]
    CosetSum { label: String, value: String },
    #[error("window error: {0}")]
    Window(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Exact table of `phi^2` on its support `F^-1 K`.
#[derive(Debug, Clone)]
pub struct PhiTable<'a> {
    folner: &'a FolnerSet,
    tiling: &'a Tiling,
    points: Vec<GroupElement>,
    counts: Vec<u64>,
    lookup: HashMap<GroupElement, usize>,
    by_coset: Vec<Vec<usize>>,
}

/// Builds the `phi^2` table by counting pairs: `|K ∩ F x|` is the number of
/// `(f, k)` in `F x K` with `f^-1 k = x`.
pub fn build_phi<'a>(f: &'a FolnerSet, t: &'a Tiling) -> Result<PhiTable<'a>, ProjectionError> {
    if f.group() != t.group() {
        return Err(ProjectionError::GroupMismatch);
    }
    let g = f.group();
    let q = t.quotient();
    let mut seen: HashMap<usize, &GroupElement> = HashMap::new();
    for x in f.elements() {
        if let Some(prev) = seen.insert(q.coset(x), x) {
            return Err(ProjectionError::NotSeparated {
                a: prev.to_string(),
                b: x.to_string(),
            });
        }
    }
    let mut tally: HashMap<GroupElement, u64> = HashMap::new();
    for a in f.elements() {
        let a_inv = g.inv(a);
        for k in t.tile() {
            *tally.entry(g.mul(&a_inv, k)).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<(GroupElement, u64)> = tally.into_iter().collect();
    entries.sort();
    let (points, counts): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
    let lookup = points.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    let mut by_coset = vec![Vec::new(); t.index()];
    for (i, x) in points.iter().enumerate() {
        by_coset[q.coset(x)].push(i);
    }
    Ok(PhiTable {
        folner: f,
        tiling: t,
        points,
        counts,
        lookup,
        by_coset,
    })
}

impl<'a> PhiTable<'a> {
    pub fn folner(&self) -> &'a FolnerSet {
        self.folner
    }

    pub fn tiling(&self) -> &'a Tiling {
        self.tiling
    }

    /// Support `F^-1 K` in normal-form order.
    pub fn support(&self) -> &[GroupElement] {
        &self.points
    }

    /// `|K ∩ F x|`.
    pub fn count(&self, x: &GroupElement) -> u64 {
        self.lookup.get(x).map_or(0, |&i| self.counts[i])
    }

    pub fn phi_squared(&self, x: &GroupElement) -> Rational {
        Rational::new(BigInt::from(self.count(x)), BigInt::from(self.folner.len()))
    }

    /// `phi(x)` in double precision.
    pub fn amplitude(&self, x: &GroupElement) -> f64 {
        (self.count(x) as f64 / self.folner.len() as f64).sqrt()
    }

    /// Support points in the coset with index `c`, in normal-form order.
    pub fn coset_points(&self, c: usize) -> impl Iterator<Item = &GroupElement> {
        self.by_coset[c].iter().map(move |&i| &self.points[i])
    }

    /// `sum_{x in yL} phi^2(x)`, exactly.
    pub fn coset_sum(&self, y: &GroupElement) -> Rational {
        let c = self.tiling.quotient().coset(y);
        let total: u64 = self.by_coset[c].iter().map(|&i| self.counts[i]).sum();
        Rational::new(BigInt::from(total), BigInt::from(self.folner.len()))
    }

    /// `sum_{x in yL} |phi^2(x) - phi^2(sx)|`, exactly.
    ///
    /// Only `x` with `x` or `sx` in the support contribute, i.e. support points
    /// of `yL` and `s^-1` times support points of `syL`.
    pub fn coset_variation(&self, y: &GroupElement, s: &GroupElement) -> Rational {
        let g = self.folner.group();
        let q = self.tiling.quotient();
        let s_inv = g.inv(s);
        let mut xs: Vec<GroupElement> = self.coset_points(q.coset(y)).cloned().collect();
        let shifted = q.coset(&g.mul(s, y));
        xs.extend(self.coset_points(shifted).map(|w| g.mul(&s_inv, w)));
        xs.sort();
        xs.dedup();
        let total: i128 = xs
            .iter()
            .map(|x| (self.count(x) as i128 - self.count(&g.mul(s, x)) as i128).abs())
            .sum();
        Rational::new(BigInt::from(total), BigInt::from(self.folner.len()))
    }

    /// Checks both coset identities for every tile element and every `s` in
    /// `generators`.
    pub fn check_coset_identities(&self, generators: &[GroupElement]) -> CosetIdentityReport {
        let one = Rational::from_integer(BigInt::from(1));
        let sums_ok = self.tiling.tile().iter().all(|y| self.coset_sum(y) == one);
        let per_generator = generators
            .iter()
            .map(|s| {
                let ratio = boundary_ratio(self.folner, s);
                let bound = ratio.value();
                let max_variation = self
                    .tiling
                    .tile()
                    .iter()
                    .map(|y| self.coset_variation(y, s))
                    .max()
                    .unwrap_or_default();
                VariationRecord {
                    generator: s.clone(),
                    ratio,
                    holds: max_variation <= bound,
                    max_variation,
                }
            })
            .collect();
        CosetIdentityReport {
            cosets: self.tiling.index(),
            sums_ok,
            per_generator,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VariationRecord {
    pub generator: GroupElement,
    pub ratio: BoundaryRatio,
    /// Largest coset variation over the tile.
    pub max_variation: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct CosetIdentityReport {
    pub cosets: usize,
    /// Every coset sum equals 1 exactly.
    pub sums_ok: bool,
    pub per_generator: Vec<VariationRecord>,
}

impl CosetIdentityReport {
    pub fn variations_ok(&self) -> bool {
        self.per_generator.iter().all(|r| r.holds)
    }

    pub fn passed(&self) -> bool {
        self.sums_ok && self.variations_ok()
    }
}
