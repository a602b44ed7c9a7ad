//! Følner sets, boundary ratios and tilings by finite-index normal subgroups.

mod tiling;

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::group::{FiniteIndexSubgroup, Group, GroupElement, GroupError};
use crate::linalg::Rational;

pub use tiling::{complete_tile, Factorization, Tiling, TilingCertificate, TilingDocument};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FolnerError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("invalid Følner set: {0}")]
    InvalidSet(String),
    #[error("no subgroup in the family separates F^-1 F below index cap {cap}")]
    FamilyExhausted { cap: u64 },
    #[error("tile precondition violated: {a} and {b} lie in the same coset")]
    SharedCoset { a: String, b: String },
    #[error("tiling certificate failed: {0}")]
    Certificate(String),
    #[error("factorization of {point} is not unique: {count} pairs")]
    Factorization { point: String, count: usize },
    #[error("tiling document: {0}")]
    Document(String),
}

/// Finite subset of a group containing the identity.
#[derive(Debug, Clone)]
pub struct FolnerSet {
    group: Group,
    label: usize,
    elements: Vec<GroupElement>,
    members: HashSet<GroupElement>,
}

impl FolnerSet {
    pub fn new(group: &Group, label: usize, elements: Vec<GroupElement>) -> Result<Self, FolnerError> {
        group.validate()?;
        let members: HashSet<GroupElement> = elements.iter().cloned().collect();
        if members.len() != elements.len() {
            return Err(FolnerError::InvalidSet("duplicate elements".into()));
        }
        if let Some(x) = elements.iter().find(|x| !group.contains(x)) {
            return Err(FolnerError::InvalidSet(format!("{x} is not in {group}")));
        }
        if !members.contains(&group.identity()) {
            return Err(FolnerError::InvalidSet("must contain the identity".into()));
        }
        let mut elements = elements;
        elements.sort();
        Ok(Self {
            group: group.clone(),
            label,
            elements,
            members,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Sequence parameter `n`.
    pub fn label(&self) -> usize {
        self.label
    }

    /// Elements in normal-form order.
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.members.contains(x)
    }
}

/// Box-shaped Følner set of parameter `n >= 1`.
///
/// `Z^m`: `{0..n-1}^m`. `H3(Z)`: `0 <= a, b < n`, `0 <= c < n^2`; the
/// `c`-depth has to outgrow the `ab'` drift of right translation.
/// Finite groups: the whole group. Products: the product of factor boxes.
pub fn folner_box(group: &Group, n: usize) -> Result<FolnerSet, FolnerError> {
    if n == 0 {
        return Err(FolnerError::InvalidSet("box parameter must be at least 1".into()));
    }
    group.validate()?;
    let coords = box_coords(group, n as i64)?;
    FolnerSet::new(group, n, coords.into_iter().map(GroupElement::from).collect())
}

fn box_coords(group: &Group, n: i64) -> Result<Vec<Vec<i64>>, FolnerError> {
    Ok(match group {
        Group::Lattice { rank } => cartesian(&vec![n; *rank]),
        Group::Heisenberg => {
            let depth = n.checked_mul(n).ok_or(GroupError::Overflow)?;
            cartesian(&[n, n, depth])
        }
        Group::Cyclic { moduli } => cartesian(moduli),
        Group::Product { factors } => {
            let mut acc = vec![Vec::new()];
            for g in factors {
                let part = box_coords(g, n)?;
                acc = acc
                    .into_iter()
                    .flat_map(|p| {
                        part.iter().map(move |q| {
                            let mut v = p.clone();
                            v.extend_from_slice(q);
                            v
                        })
                    })
                    .collect();
            }
            acc
        }
    })
}

fn cartesian(ranges: &[i64]) -> Vec<Vec<i64>> {
    let mut acc = vec![Vec::new()];
    for &r in ranges {
        acc = acc
            .into_iter()
            .flat_map(|p| {
                (0..r).map(move |i| {
                    let mut v = p.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    acc
}

/// `|F delta Fs| / |F|` kept as its unreduced counts, so reports can print
/// the literal fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryRatio {
    /// `|F \ Fs|`
    pub left_only: u64,
    /// `|Fs \ F|`
    pub right_only: u64,
    pub size: u64,
}

impl BoundaryRatio {
    pub fn symmetric_difference(&self) -> u64 {
        self.left_only + self.right_only
    }

    pub fn value(&self) -> Rational {
        Rational::new(
            BigInt::from(self.symmetric_difference()),
            BigInt::from(self.size),
        )
    }

    pub fn to_f64(&self) -> f64 {
        self.symmetric_difference() as f64 / self.size as f64
    }
}

impl fmt::Display for BoundaryRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.symmetric_difference(), self.size)
    }
}

/// Exact boundary ratio of `F` under right translation by `s`.
pub fn boundary_ratio(f: &FolnerSet, s: &GroupElement) -> BoundaryRatio {
    let g = &f.group;
    let s_inv = g.inv(s);
    // f in Fs  <=>  f s^-1 in F
    let left_only = f
        .elements
        .iter()
        .filter(|x| !f.contains(&g.mul(x, &s_inv)))
        .count() as u64;
    let right_only = f
        .elements
        .iter()
        .filter(|x| !f.contains(&g.mul(x, s)))
        .count() as u64;
    BoundaryRatio {
        left_only,
        right_only,
        size: f.len() as u64,
    }
}

/// `F^-1 F = { f^-1 g : f, g in F }`, sorted.
pub fn difference_set(f: &FolnerSet) -> Vec<GroupElement> {
    let g = &f.group;
    let inverses: Vec<GroupElement> = f.elements.iter().map(|x| g.inv(x)).collect();
    let set: HashSet<GroupElement> = inverses
        .iter()
        .flat_map(|a| f.elements.iter().map(move |b| g.mul(a, b)))
        .collect();
    let mut out: Vec<GroupElement> = set.into_iter().collect();
    out.sort();
    out
}

/// First member `L` of `family` with `F^-1 F  ∩ L = {e}`.
pub fn separating_subgroup(
    f: &FolnerSet,
    family: &[FiniteIndexSubgroup],
    cap: u64,
) -> Result<FiniteIndexSubgroup, FolnerError> {
    if let Some(l) = family.iter().find(|l| l.group() != &f.group) {
        return Err(FolnerError::Group(GroupError::Mismatch {
            element: format!("{:?}", l.spec()),
            group: f.group.to_string(),
        }));
    }
    let e = f.group.identity();
    let diffs: Vec<GroupElement> = difference_set(f).into_iter().filter(|x| *x != e).collect();
    family
        .iter()
        .filter(|l| l.index() <= cap)
        .find(|l| diffs.iter().all(|x| !l.contains(x)))
        .cloned()
        .ok_or(FolnerError::FamilyExhausted { cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{subgroup_family, SubgroupSpec};
    use crate::linalg::rational;

    fn el(c: &[i64]) -> GroupElement {
        GroupElement::new(c)
    }

    #[test]
    fn boxes() {
        let f = folner_box(&Group::integers(), 4).unwrap();
        assert_eq!(f.elements(), &[el(&[0]), el(&[1]), el(&[2]), el(&[3])]);
        assert_eq!(folner_box(&Group::lattice(2), 2).unwrap().len(), 4);
        assert_eq!(folner_box(&Group::Heisenberg, 2).unwrap().len(), 16);
        assert_eq!(folner_box(&Group::cyclic(&[12]), 5).unwrap().len(), 12);
        assert!(folner_box(&Group::integers(), 0).is_err());
    }

    #[test]
    fn rejects_sets_without_identity() {
        assert!(FolnerSet::new(&Group::integers(), 1, vec![el(&[1])]).is_err());
        assert!(FolnerSet::new(&Group::integers(), 1, vec![el(&[0]), el(&[0])]).is_err());
    }

    #[test]
    fn ratios_on_lattices() {
        let f = folner_box(&Group::integers(), 8).unwrap();
        assert_eq!(boundary_ratio(&f, &el(&[1])).value(), rational(1, 4));
        let f = folner_box(&Group::lattice(2), 4).unwrap();
        let r = boundary_ratio(&f, &el(&[1, 0]));
        assert_eq!(r.to_string(), "8/16");
        assert_eq!(r.value(), rational(1, 2));
        assert_eq!(boundary_ratio(&f, &el(&[0, 0])).symmetric_difference(), 0);
    }

    #[test]
    fn integer_boxes_have_ratio_two_over_n() {
        for n in 1..=40 {
            let f = folner_box(&Group::integers(), n).unwrap();
            assert_eq!(boundary_ratio(&f, &el(&[1])).value(), rational(2, n as i64));
        }
    }

    /// Independent recount with explicit translated sets.
    fn brute_ratio(f: &FolnerSet, s: &GroupElement) -> (usize, usize) {
        let g = f.group();
        let a: HashSet<GroupElement> = f.elements().iter().cloned().collect();
        let b: HashSet<GroupElement> = f.elements().iter().map(|x| g.mul(x, s)).collect();
        (a.symmetric_difference(&b).count(), a.len())
    }

    #[test]
    fn heisenberg_ratio_matches_recount() {
        let h = Group::Heisenberg;
        let f = folner_box(&h, 3).unwrap();
        for s in h.word_ball(2) {
            let r = boundary_ratio(&f, &s);
            assert_eq!((r.symmetric_difference() as usize, r.size as usize), brute_ratio(&f, &s), "s = {s}");
        }
        // b-translation of the n = 3 box: the b = 2 slab leaves, plus the
        // corners pushed past c = 8 by the a-twist
        let r = boundary_ratio(&f, &el(&[0, 1, 0]));
        assert_eq!(r.to_string(), "66/81");
        assert_eq!(r.left_only, r.right_only);
    }

    #[test]
    fn separating_search() {
        let z = Group::integers();
        let fam = subgroup_family(&z, 1000).unwrap();
        let l = separating_subgroup(&folner_box(&z, 5).unwrap(), &fam, 1000).unwrap();
        assert_eq!(l.spec(), &SubgroupSpec::Moduli(vec![5]));

        let z2 = Group::lattice(2);
        let fam = subgroup_family(&z2, 1000).unwrap();
        let l = separating_subgroup(&folner_box(&z2, 3).unwrap(), &fam, 1000).unwrap();
        assert_eq!(l.spec(), &SubgroupSpec::Moduli(vec![3, 3]));

        let fam = subgroup_family(&z, 1000).unwrap();
        assert_eq!(
            separating_subgroup(&folner_box(&z, 50).unwrap(), &fam, 10).unwrap_err(),
            FolnerError::FamilyExhausted { cap: 10 }
        );
    }

    /// Brute force over levels: the first level N for which no nonidentity
    /// element of F^-1 F has all three coordinates divisible by N.
    #[test]
    fn heisenberg_separating_level() {
        let h = Group::Heisenberg;
        for n in 2..=3 {
            let f = folner_box(&h, n).unwrap();
            let diffs = difference_set(&f);
            let expected = (1i64..)
                .find(|&lvl| {
                    diffs.iter().filter(|x| **x != h.identity()).all(|x| {
                        x.coords().iter().any(|c| c.rem_euclid(lvl) != 0)
                    })
                })
                .unwrap();
            let fam = subgroup_family(&h, 100_000).unwrap();
            let l = separating_subgroup(&f, &fam, 100_000).unwrap();
            assert_eq!(l.spec(), &SubgroupSpec::Level(expected));
        }
        let f = folner_box(&h, 2).unwrap();
        let l = separating_subgroup(&f, &subgroup_family(&h, 1000).unwrap(), 1000).unwrap();
        assert_eq!(l.spec(), &SubgroupSpec::Level(4));
    }

    #[test]
    fn boxes_are_monotone_and_exhaust_balls() {
        for g in [Group::integers(), Group::lattice(2), Group::Heisenberg] {
            for n in 1..6 {
                let a = folner_box(&g, n).unwrap();
                let b = folner_box(&g, n + 1).unwrap();
                assert!(a.elements().iter().all(|x| b.contains(x)));
            }
        }
        // boxes start at the identity, so they exhaust balls only after a
        // translate; a ball of radius r sits inside t * box(n) for a fixed
        // centring t
        let h = Group::Heisenberg;
        for r in 0..=6i64 {
            let n = (2 * r + 1) as usize;
            let centre = el(&[r, r, (n * n / 2) as i64]);
            let b = folner_box(&h, n).unwrap();
            let shifted: HashSet<GroupElement> = b.elements().iter().map(|x| h.mul(&h.inv(&centre), x)).collect();
            assert!(h.word_ball(r as usize).iter().all(|x| shifted.contains(x)), "radius {r}");
        }
    }

    #[test]
    fn folner_ratios_decay() {
        for g in [Group::integers(), Group::lattice(2), Group::Heisenberg] {
            for s in g.basis_generators() {
                let ratios: Vec<f64> = (1..=8)
                    .map(|n| boundary_ratio(&folner_box(&g, n).unwrap(), &s).to_f64())
                    .collect();
                assert!(ratios.windows(2).all(|w| w[1] <= w[0]), "{g}: {ratios:?}");
                assert!(ratios[7] < ratios[0]);
            }
        }
    }
}
