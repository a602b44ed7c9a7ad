//! Concrete discrete groups with exact normal forms.
//!
//! Elements are flat integer coordinate vectors whose meaning is fixed by the
//! [`Group`] descriptor:
//!
//! * `lattice` of rank m: `Z^m`, componentwise addition;
//! * `heisenberg`: `H3(Z)` as triples with `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`;
//! * `cyclic` with moduli `k_1..k_r`: residues in `[0, k_i)`;
//! * `product`: factor coordinates concatenated in order.
//!
//! Coordinates are `i64` with checked arithmetic; overflow is a hard failure.

mod quotient;
mod subgroup;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

pub use quotient::QuotientMap;
pub use subgroup::{subgroup_family, FiniteIndexSubgroup, SubgroupSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid group descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("element {element} does not belong to {group}")]
    Mismatch { element: String, group: String },
    #[error("coordinate overflow in group arithmetic")]
    Overflow,
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("subgroup is not normal: {0}")]
    NotNormal(String),
    #[error("subgroup index {index} exceeds the cap {cap}")]
    IndexCap { index: u64, cap: u64 },
    #[error("group is infinite; {0} needs a finite group")]
    Infinite(&'static str),
}

/// Canonical coordinates of a group element. Equal elements have equal
/// coordinates, so derived `Eq`, `Hash` and `Ord` are exact.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(SmallVec<[i64; 4]>);

impl GroupElement {
    pub fn new(coords: &[i64]) -> Self {
        Self(SmallVec::from_slice(coords))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for GroupElement {
    fn from(v: Vec<i64>) -> Self {
        Self(SmallVec::from_vec(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Group {
    Lattice { rank: usize },
    Heisenberg,
    Cyclic { moduli: Vec<i64> },
    Product { factors: Vec<Group> },
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Lattice { rank: 1 } => write!(f, "Z"),
            Group::Lattice { rank } => write!(f, "Z^{rank}"),
            Group::Heisenberg => write!(f, "H3(Z)"),
            Group::Cyclic { moduli } => {
                let parts: Vec<String> = moduli.iter().map(|k| format!("Z/{k}")).collect();
                write!(f, "{}", parts.join("x"))
            }
            Group::Product { factors } => {
                let parts: Vec<String> = factors.iter().map(|g| format!("({g})")).collect();
                write!(f, "{}", parts.join("x"))
            }
        }
    }
}

impl Group {
    pub fn lattice(rank: usize) -> Self {
        Group::Lattice { rank }
    }

    pub fn integers() -> Self {
        Group::Lattice { rank: 1 }
    }

    pub fn cyclic(moduli: &[i64]) -> Self {
        Group::Cyclic {
            moduli: moduli.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<(), GroupError> {
        match self {
            Group::Lattice { rank } if *rank == 0 => Err(GroupError::InvalidDescriptor(
                "lattice rank must be at least 1".into(),
            )),
            Group::Cyclic { moduli } if moduli.is_empty() || moduli.iter().any(|&k| k < 1) => {
                Err(GroupError::InvalidDescriptor(
                    "cyclic moduli must be a nonempty list of positive integers".into(),
                ))
            }
            Group::Product { factors } if factors.is_empty() => Err(
                GroupError::InvalidDescriptor("product needs at least one factor".into()),
            ),
            Group::Product { factors } => factors.iter().try_for_each(Group::validate),
            _ => Ok(()),
        }
    }

    /// Number of normal-form coordinates.
    pub fn dim(&self) -> usize {
        match self {
            Group::Lattice { rank } => *rank,
            Group::Heisenberg => 3,
            Group::Cyclic { moduli } => moduli.len(),
            Group::Product { factors } => factors.iter().map(Group::dim).sum(),
        }
    }

    pub fn order(&self) -> Option<u64> {
        match self {
            Group::Lattice { .. } | Group::Heisenberg => None,
            Group::Cyclic { moduli } => moduli
                .iter()
                .try_fold(1u64, |acc, &k| acc.checked_mul(k as u64)),
            Group::Product { factors } => factors
                .iter()
                .try_fold(1u64, |acc, g| g.order().and_then(|o| acc.checked_mul(o))),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            Group::Heisenberg => false,
            Group::Product { factors } => factors.iter().all(Group::is_abelian),
            _ => true,
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(SmallVec::from_elem(0, self.dim()))
    }

    /// Validated element constructor.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement, GroupError> {
        let e = GroupElement::new(coords);
        if self.contains(&e) {
            Ok(e)
        } else {
            Err(self.mismatch(&e))
        }
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.len() == self.dim() && self.coords_valid(x.coords())
    }

    fn coords_valid(&self, x: &[i64]) -> bool {
        match self {
            Group::Cyclic { moduli } => x.iter().zip(moduli).all(|(&c, &k)| (0..k).contains(&c)),
            Group::Product { factors } => {
                let mut off = 0;
                factors.iter().all(|g| {
                    let d = g.dim();
                    let ok = g.coords_valid(&x[off..off + d]);
                    off += d;
                    ok
                })
            }
            _ => true,
        }
    }

    fn mismatch(&self, x: &GroupElement) -> GroupError {
        GroupError::Mismatch {
            element: x.to_string(),
            group: self.to_string(),
        }
    }

    /// Group product with validation of both operands and overflow checking.
    pub fn checked_mul(
        &self,
        a: &GroupElement,
        b: &GroupElement,
    ) -> Result<GroupElement, GroupError> {
        for x in [a, b] {
            if !self.contains(x) {
                return Err(self.mismatch(x));
            }
        }
        let mut out = SmallVec::with_capacity(self.dim());
        self.mul_into(a.coords(), b.coords(), &mut out)?;
        Ok(GroupElement(out))
    }

    /// Group product. Operands are assumed to come from this group; coordinate
    /// overflow aborts.
    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        debug_assert!(self.contains(a) && self.contains(b));
        let mut out = SmallVec::with_capacity(self.dim());
        self.mul_into(a.coords(), b.coords(), &mut out)
            .expect("coordinate overflow in group arithmetic");
        GroupElement(out)
    }

    fn mul_into(
        &self,
        a: &[i64],
        b: &[i64],
        out: &mut SmallVec<[i64; 4]>,
    ) -> Result<(), GroupError> {
        match self {
            Group::Lattice { .. } => {
                for (x, y) in a.iter().zip(b) {
                    out.push(x.checked_add(*y).ok_or(GroupError::Overflow)?);
                }
            }
            Group::Heisenberg => {
                let twist = a[0].checked_mul(b[1]).ok_or(GroupError::Overflow)?;
                out.push(a[0].checked_add(b[0]).ok_or(GroupError::Overflow)?);
                out.push(a[1].checked_add(b[1]).ok_or(GroupError::Overflow)?);
                let c = a[2]
                    .checked_add(b[2])
                    .and_then(|c| c.checked_add(twist))
                    .ok_or(GroupError::Overflow)?;
                out.push(c);
            }
            Group::Cyclic { moduli } => {
                for ((x, y), k) in a.iter().zip(b).zip(moduli) {
                    out.push((x + y).rem_euclid(*k));
                }
            }
            Group::Product { factors } => {
                let mut off = 0;
                for g in factors {
                    let d = g.dim();
                    g.mul_into(&a[off..off + d], &b[off..off + d], out)?;
                    off += d;
                }
            }
        }
        Ok(())
    }

    pub fn inv(&self, a: &GroupElement) -> GroupElement {
        let mut out = SmallVec::with_capacity(self.dim());
        self.inv_into(a.coords(), &mut out)
            .expect("coordinate overflow in group arithmetic");
        GroupElement(out)
    }

    fn inv_into(&self, a: &[i64], out: &mut SmallVec<[i64; 4]>) -> Result<(), GroupError> {
        match self {
            Group::Lattice { .. } => {
                for x in a {
                    out.push(x.checked_neg().ok_or(GroupError::Overflow)?);
                }
            }
            Group::Heisenberg => {
                // (a,b,c)^-1 = (-a, -b, -c + ab)
                let ab = a[0].checked_mul(a[1]).ok_or(GroupError::Overflow)?;
                out.push(a[0].checked_neg().ok_or(GroupError::Overflow)?);
                out.push(a[1].checked_neg().ok_or(GroupError::Overflow)?);
                out.push(
                    a[2].checked_neg()
                        .and_then(|c| c.checked_add(ab))
                        .ok_or(GroupError::Overflow)?,
                );
            }
            Group::Cyclic { moduli } => {
                for (x, k) in a.iter().zip(moduli) {
                    out.push((-x).rem_euclid(*k));
                }
            }
            Group::Product { factors } => {
                let mut off = 0;
                for g in factors {
                    let d = g.dim();
                    g.inv_into(&a[off..off + d], out)?;
                    off += d;
                }
            }
        }
        Ok(())
    }

    /// `a b a^-1`.
    pub fn conjugate(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.mul(&self.mul(a, b), &self.inv(a))
    }

    /// Standard generators, one per factor direction: `e_i` for lattices and
    /// cyclic groups, `(1,0,0)` and `(0,1,0)` for the Heisenberg group.
    /// Trivial factors (`Z/1`) contribute nothing.
    pub fn basis_generators(&self) -> Vec<GroupElement> {
        match self {
            Group::Lattice { rank } => (0..*rank).map(|i| unit(*rank, i)).collect(),
            Group::Heisenberg => vec![GroupElement::new(&[1, 0, 0]), GroupElement::new(&[0, 1, 0])],
            Group::Cyclic { moduli } => (0..moduli.len())
                .filter(|&i| moduli[i] > 1)
                .map(|i| unit(moduli.len(), i))
                .collect(),
            Group::Product { factors } => {
                let dim = self.dim();
                let mut out = Vec::new();
                let mut off = 0;
                for g in factors {
                    for s in g.basis_generators() {
                        let mut c = vec![0; dim];
                        c[off..off + g.dim()].copy_from_slice(s.coords());
                        out.push(GroupElement::from(c));
                    }
                    off += g.dim();
                }
                out
            }
        }
    }

    /// Basis generators together with their inverses, deduplicated.
    pub fn generators(&self) -> Vec<GroupElement> {
        let mut out = Vec::new();
        for s in self.basis_generators() {
            let t = self.inv(&s);
            out.push(s.clone());
            if t != s {
                out.push(t);
            }
        }
        out
    }

    /// Every element of a finite group, sorted.
    pub fn elements(&self) -> Result<Vec<GroupElement>, GroupError> {
        let order = self.order().ok_or(GroupError::Infinite("element enumeration"))?;
        let ranges = self.finite_ranges();
        let mut out = Vec::with_capacity(order as usize);
        let mut cur = vec![0i64; ranges.len()];
        loop {
            out.push(GroupElement::new(&cur));
            let mut i = ranges.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < ranges[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    fn finite_ranges(&self) -> Vec<i64> {
        match self {
            Group::Cyclic { moduli } => moduli.clone(),
            Group::Product { factors } => factors.iter().flat_map(Group::finite_ranges).collect(),
            _ => unreachable!("finite_ranges on an infinite group"),
        }
    }

    /// All elements of word length at most `radius` in the symmetric generating
    /// set, sorted by (length, normal form).
    pub fn word_ball(&self, radius: usize) -> Vec<GroupElement> {
        self.ball_layers().take(radius + 1).flatten().collect()
    }

    /// Spheres of increasing word length, each sorted by normal form.
    pub fn ball_layers(&self) -> BallLayers<'_> {
        let e = self.identity();
        BallLayers {
            group: self,
            gens: self.generators(),
            seen: HashSet::from([e.clone()]),
            frontier: vec![e],
            started: false,
        }
    }
}

fn unit(dim: usize, i: usize) -> GroupElement {
    let mut c = vec![0; dim];
    c[i] = 1;
    GroupElement::from(c)
}

/// Breadth-first enumeration of word-length spheres.
pub struct BallLayers<'a> {
    group: &'a Group,
    gens: Vec<GroupElement>,
    seen: HashSet<GroupElement>,
    frontier: Vec<GroupElement>,
    started: bool,
}

impl Iterator for BallLayers<'_> {
    type Item = Vec<GroupElement>;

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
            return Some(self.frontier.clone());
        }
        let mut next = Vec::new();
        for x in &self.frontier {
            for s in &self.gens {
                let y = self.group.mul(x, s);
                if self.seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        next.sort();
        self.frontier = next.clone();
        Some(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn el(c: &[i64]) -> GroupElement {
        GroupElement::new(c)
    }

    #[test]
    fn lattice_and_heisenberg_products() {
        let z2 = Group::lattice(2);
        assert_eq!(z2.mul(&el(&[1, 2]), &el(&[3, -1])), el(&[4, 1]));
        let h = Group::Heisenberg;
        assert_eq!(h.mul(&el(&[1, 0, 0]), &el(&[0, 1, 0])), el(&[1, 1, 1]));
        assert_eq!(h.mul(&el(&[0, 1, 0]), &el(&[1, 0, 0])), el(&[1, 1, 0]));
    }

    #[test]
    fn inverses() {
        assert_eq!(Group::integers().inv(&el(&[5])), el(&[-5]));
        let h = Group::Heisenberg;
        assert_eq!(h.inv(&el(&[1, 1, 1])), el(&[-1, -1, 0]));
        let x = el(&[3, -2, 7]);
        assert_eq!(h.mul(&x, &h.inv(&x)), h.identity());
        assert_eq!(Group::cyclic(&[5]).inv(&el(&[2])), el(&[3]));
    }

    #[test]
    fn mismatch_and_overflow_are_errors() {
        let z = Group::integers();
        assert!(matches!(
            z.checked_mul(&el(&[1, 2]), &el(&[1])),
            Err(GroupError::Mismatch { .. })
        ));
        let c = Group::cyclic(&[4]);
        assert!(c.checked_mul(&el(&[4]), &el(&[1])).is_err());
        assert_eq!(
            z.checked_mul(&el(&[i64::MAX]), &el(&[1])),
            Err(GroupError::Overflow)
        );
        let h = Group::Heisenberg;
        assert_eq!(
            h.checked_mul(&el(&[1 << 40, 0, 0]), &el(&[0, 1 << 40, 0])),
            Err(GroupError::Overflow)
        );
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn unchecked_mul_fails_hard_on_overflow() {
        let z = Group::integers();
        z.mul(&el(&[i64::MAX]), &el(&[1]));
    }

    #[test]
    fn small_balls() {
        let z = Group::integers();
        let ball = z.word_ball(2);
        let mut sorted = ball.clone();
        sorted.sort();
        assert_eq!(sorted, (-2..=2).map(|i| el(&[i])).collect::<Vec<_>>());
        assert_eq!(Group::lattice(2).word_ball(1).len(), 5);
        assert_eq!(Group::cyclic(&[2, 3]).word_ball(10).len(), 6);
    }

    /// Closure of all words of length <= r, built by brute-force products of
    /// generator sequences rather than layer-by-layer search.
    fn brute_force_ball(g: &Group, r: usize) -> HashSet<GroupElement> {
        let mut gens = g.generators();
        gens.push(g.identity());
        let mut words: HashSet<GroupElement> = HashSet::from([g.identity()]);
        for _ in 0..r {
            words = words
                .iter()
                .flat_map(|w| gens.iter().map(move |s| (w, s)))
                .map(|(w, s)| g.mul(w, s))
                .collect();
        }
        words
    }

    #[test]
    fn heisenberg_ball_matches_brute_force_closure() {
        let h = Group::Heisenberg;
        for r in 0..=4 {
            let ball: HashSet<_> = h.word_ball(r).into_iter().collect();
            assert_eq!(ball, brute_force_ball(&h, r), "radius {r}");
        }
        // sizes of H3 word balls in the standard generators
        let sizes: Vec<usize> = (0..=2).map(|r| h.word_ball(r).len()).collect();
        assert_eq!(sizes, vec![1, 5, 17]);
    }

    #[test]
    fn finite_enumeration() {
        let g = Group::Product {
            factors: vec![Group::cyclic(&[2]), Group::cyclic(&[3])],
        };
        let els = g.elements().unwrap();
        assert_eq!(els.len(), 6);
        assert_eq!(els[0], g.identity());
        assert!(Group::Heisenberg.elements().is_err());
        assert_eq!(g.generators().len(), 3);
    }

    #[test]
    fn descriptor_json() {
        let g: Group = serde_json::from_str(r#"{"kind":"lattice","rank":2}"#).unwrap();
        assert_eq!(g, Group::lattice(2));
        let h: Group = serde_json::from_str(
            r#"{"kind":"product","factors":[{"kind":"heisenberg"},{"kind":"cyclic","moduli":[3]}]}"#,
        )
        .unwrap();
        assert_eq!(h.dim(), 4);
        assert!(Group::Lattice { rank: 0 }.validate().is_err());
    }

    fn heis_elem() -> impl Strategy<Value = GroupElement> {
        (-20i64..20, -20i64..20, -50i64..50).prop_map(|(a, b, c)| el(&[a, b, c]))
    }

    fn mixed_elem() -> impl Strategy<Value = GroupElement> {
        (-9i64..9, 0i64..6, -4i64..4, -4i64..4, -9i64..9).prop_map(|(z, k, a, b, c)| el(&[z, k, a, b, c]))
    }

    fn mixed_group() -> Group {
        Group::Product {
            factors: vec![Group::integers(), Group::cyclic(&[6]), Group::Heisenberg],
        }
    }

    proptest! {
        #[test]
        fn heisenberg_axioms(a in heis_elem(), b in heis_elem(), c in heis_elem()) {
            let h = Group::Heisenberg;
            prop_assert_eq!(h.mul(&h.mul(&a, &b), &c), h.mul(&a, &h.mul(&b, &c)));
            prop_assert_eq!(h.mul(&a, &h.inv(&a)), h.identity());
            prop_assert_eq!(h.mul(&h.inv(&a), &a), h.identity());
            prop_assert_eq!(h.mul(&h.identity(), &a), a.clone());
        }

        #[test]
        fn product_axioms(a in mixed_elem(), b in mixed_elem(), c in mixed_elem()) {
            let g = mixed_group();
            prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
            prop_assert_eq!(g.mul(&a, &g.inv(&a)), g.identity());
            prop_assert_eq!(g.mul(&g.identity(), &a), a);
        }
    }
}
