use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Group, GroupElement, GroupError};

/// Parameters of a finite-index normal subgroup.
///
/// * `moduli` on `Z^m`: `N_1 Z x ... x N_m Z`; on `Z/k_1 x ... x Z/k_r`:
///   `d_1 Z/k_1 x ...` with `d_i | k_i`.
/// * `level` on `H3(Z)`: the congruence kernel `{(a,b,c) : a = b = c = 0 mod N}`.
/// * `elements` on finite groups: an explicit element list.
/// * `product` on product groups: one spec per factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubgroupSpec {
    Moduli(Vec<i64>),
    Level(i64),
    Elements(Vec<GroupElement>),
    Product(Vec<SubgroupSpec>),
}

/// A validated finite-index normal subgroup of a specific group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteIndexSubgroup {
    group: Group,
    spec: SubgroupSpec,
    index: u64,
    members: Option<HashSet<GroupElement>>,
}

impl FiniteIndexSubgroup {
    pub fn new(group: &Group, spec: SubgroupSpec, cap: u64) -> Result<Self, GroupError> {
        group.validate()?;
        let index = spec_index(group, &spec)?;
        if index > cap {
            return Err(GroupError::IndexCap { index, cap });
        }
        let members = match &spec {
            SubgroupSpec::Elements(els) => Some(els.iter().cloned().collect()),
            _ => None,
        };
        let sub = Self {
            group: group.clone(),
            spec,
            index,
            members,
        };
        sub.check_normal()?;
        Ok(sub)
    }

    /// The whole group, as the index-one subgroup.
    pub fn whole(group: &Group) -> Self {
        Self::new(group, whole_spec(group), 1).expect("the whole group is a normal subgroup")
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn spec(&self) -> &SubgroupSpec {
        &self.spec
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.group.contains(x) && spec_contains(&self.group, &self.spec, self.members.as_ref(), x.coords())
    }

    /// Generators of the subgroup as a group (for `elements`, the full list).
    pub fn generators(&self) -> Vec<GroupElement> {
        spec_generators(&self.group, &self.spec)
    }

    fn check_normal(&self) -> Result<(), GroupError> {
        let g = &self.group;
        for s in g.generators() {
            for l in self.generators() {
                if !self.contains(&l) {
                    return Err(GroupError::InvalidSubgroup(format!(
                        "generator {l} is not a member"
                    )));
                }
                let c = g.conjugate(&s, &l);
                if !self.contains(&c) {
                    return Err(GroupError::NotNormal(format!("{s} {l} {s}^-1 = {c}")));
                }
            }
        }
        Ok(())
    }
}

fn whole_spec(group: &Group) -> SubgroupSpec {
    match group {
        Group::Lattice { rank } => SubgroupSpec::Moduli(vec![1; *rank]),
        Group::Heisenberg => SubgroupSpec::Level(1),
        Group::Cyclic { moduli } => SubgroupSpec::Moduli(vec![1; moduli.len()]),
        Group::Product { factors } => SubgroupSpec::Product(factors.iter().map(whole_spec).collect()),
    }
}

fn spec_index(group: &Group, spec: &SubgroupSpec) -> Result<u64, GroupError> {
    let bad = |msg: String| Err(GroupError::InvalidSubgroup(msg));
    match (group, spec) {
        (Group::Lattice { rank }, SubgroupSpec::Moduli(m)) => {
            if m.len() != *rank || m.iter().any(|&n| n < 1) {
                return bad(format!("moduli {m:?} invalid for Z^{rank}"));
            }
            product_index(m)
        }
        (Group::Cyclic { moduli }, SubgroupSpec::Moduli(m)) => {
            if m.len() != moduli.len() || m.iter().zip(moduli).any(|(&d, &k)| d < 1 || k % d != 0) {
                return bad(format!("moduli {m:?} must divide {moduli:?}"));
            }
            product_index(m)
        }
        (Group::Heisenberg, SubgroupSpec::Level(n)) => {
            if *n < 1 {
                return bad(format!("level {n} must be positive"));
            }
            let n = *n as u64;
            n.checked_mul(n)
                .and_then(|x| x.checked_mul(n))
                .ok_or(GroupError::Overflow)
        }
        (_, SubgroupSpec::Elements(els)) => {
            let order = group.order().ok_or(GroupError::InvalidSubgroup(
                "element-list subgroups need a finite group".into(),
            ))?;
            let set: HashSet<&GroupElement> = els.iter().collect();
            if set.len() != els.len() {
                return bad("duplicate elements in subgroup list".into());
            }
            if let Some(x) = els.iter().find(|x| !group.contains(x)) {
                return bad(format!("{x} is not an element of {group}"));
            }
            if !set.contains(&group.identity()) {
                return bad("subgroup must contain the identity".into());
            }
            for a in els {
                if !set.contains(&group.inv(a)) {
                    return bad(format!("not closed under inverse at {a}"));
                }
                for b in els {
                    if !set.contains(&group.mul(a, b)) {
                        return bad(format!("not closed under products at {a}, {b}"));
                    }
                }
            }
            if order % els.len() as u64 != 0 {
                return bad("subgroup order does not divide group order".into());
            }
            Ok(order / els.len() as u64)
        }
        (Group::Product { factors }, SubgroupSpec::Product(specs)) => {
            if specs.len() != factors.len() {
                return bad(format!(
                    "{} factor specs for {} factors",
                    specs.len(),
                    factors.len()
                ));
            }
            factors.iter().zip(specs).try_fold(1u64, |acc, (g, s)| {
                acc.checked_mul(spec_index(g, s)?).ok_or(GroupError::Overflow)
            })
        }
        _ => bad(format!("{spec:?} does not apply to {group}")),
    }
}

fn product_index(m: &[i64]) -> Result<u64, GroupError> {
    m.iter()
        .try_fold(1u64, |acc, &n| acc.checked_mul(n as u64))
        .ok_or(GroupError::Overflow)
}

fn spec_contains(
    group: &Group,
    spec: &SubgroupSpec,
    members: Option<&HashSet<GroupElement>>,
    x: &[i64],
) -> bool {
    match (group, spec) {
        (_, SubgroupSpec::Moduli(m)) => x.iter().zip(m).all(|(c, n)| c.rem_euclid(*n) == 0),
        (_, SubgroupSpec::Level(n)) => x.iter().all(|c| c.rem_euclid(*n) == 0),
        (_, SubgroupSpec::Elements(els)) => match members {
            Some(set) => set.contains(&GroupElement::new(x)),
            None => els.iter().any(|e| e.coords() == x),
        },
        (Group::Product { factors }, SubgroupSpec::Product(specs)) => {
            let mut off = 0;
            factors.iter().zip(specs).all(|(g, s)| {
                let d = g.dim();
                let ok = spec_contains(g, s, None, &x[off..off + d]);
                off += d;
                ok
            })
        }
        _ => false,
    }
}

fn spec_generators(group: &Group, spec: &SubgroupSpec) -> Vec<GroupElement> {
    match (group, spec) {
        (_, SubgroupSpec::Moduli(m)) => (0..m.len())
            .map(|i| {
                let mut c = vec![0; m.len()];
                let k = match group {
                    Group::Cyclic { moduli } => moduli[i],
                    _ => i64::MAX,
                };
                c[i] = if m[i] == k { 0 } else { m[i] };
                GroupElement::from(c)
            })
            .collect(),
        (_, SubgroupSpec::Level(n)) => vec![
            GroupElement::new(&[*n, 0, 0]),
            GroupElement::new(&[0, *n, 0]),
            GroupElement::new(&[0, 0, *n]),
        ],
        (_, SubgroupSpec::Elements(els)) => els.clone(),
        (Group::Product { factors }, SubgroupSpec::Product(specs)) => {
            let dim = group.dim();
            let mut out = Vec::new();
            let mut off = 0;
            for (g, s) in factors.iter().zip(specs) {
                for l in spec_generators(g, s) {
                    let mut c = vec![0; dim];
                    c[off..off + g.dim()].copy_from_slice(l.coords());
                    out.push(GroupElement::from(c));
                }
                off += g.dim();
            }
            out
        }
        _ => Vec::new(),
    }
}

/// The parametrized subgroup family scanned by the separating-subgroup search,
/// sorted by index and then by parameters, truncated at `cap`.
///
/// `Z^m` uses `(N Z)^m`, `H3(Z)` the level-N kernels, finite cyclic products
/// all divisor subgroups, and products every combination of factor members.
pub fn subgroup_family(group: &Group, cap: u64) -> Result<Vec<FiniteIndexSubgroup>, GroupError> {
    group.validate()?;
    let mut specs = family_specs(group, cap);
    specs.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| format!("{:?}", a.1).cmp(&format!("{:?}", b.1))));
    specs
        .into_iter()
        .map(|(_, s)| FiniteIndexSubgroup::new(group, s, cap))
        .collect()
}

fn family_specs(group: &Group, cap: u64) -> Vec<(u64, SubgroupSpec)> {
    match group {
        Group::Lattice { rank } => (1i64..)
            .map(|n| ((n as u64).checked_pow(*rank as u32), n))
            .take_while(|(idx, _)| idx.is_some_and(|i| i <= cap))
            .map(|(idx, n)| (idx.unwrap(), SubgroupSpec::Moduli(vec![n; *rank])))
            .collect(),
        Group::Heisenberg => (1i64..)
            .map(|n| ((n as u64).checked_pow(3), n))
            .take_while(|(idx, _)| idx.is_some_and(|i| i <= cap))
            .map(|(idx, n)| (idx.unwrap(), SubgroupSpec::Level(n)))
            .collect(),
        Group::Cyclic { moduli } => {
            let mut out = vec![(1u64, Vec::new())];
            for &k in moduli {
                let divisors: Vec<i64> = (1..=k).filter(|d| k % d == 0).collect();
                out = out
                    .into_iter()
                    .flat_map(|(idx, prefix)| {
                        divisors.iter().filter_map(move |&d| {
                            let i = idx * d as u64;
                            (i <= cap).then(|| {
                                let mut p: Vec<i64> = prefix.clone();
                                p.push(d);
                                (i, p)
                            })
                        })
                    })
                    .collect();
            }
            out.into_iter().map(|(i, m)| (i, SubgroupSpec::Moduli(m))).collect()
        }
        Group::Product { factors } => {
            let mut out = vec![(1u64, Vec::new())];
            for g in factors {
                let members = family_specs(g, cap);
                out = out
                    .into_iter()
                    .flat_map(|(idx, prefix)| {
                        members.iter().filter_map(move |(i, s)| {
                            let total = idx.checked_mul(*i)?;
                            (total <= cap).then(|| {
                                let mut p: Vec<SubgroupSpec> = prefix.clone();
                                p.push(s.clone());
                                (total, p)
                            })
                        })
                    })
                    .collect();
            }
            out.into_iter().map(|(i, p)| (i, SubgroupSpec::Product(p))).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(c: &[i64]) -> GroupElement {
        GroupElement::new(c)
    }

    #[test]
    fn indices() {
        let z = Group::integers();
        let l = FiniteIndexSubgroup::new(&z, SubgroupSpec::Moduli(vec![5]), 100).unwrap();
        assert_eq!(l.index(), 5);
        assert!(l.contains(&el(&[-10])) && !l.contains(&el(&[7])));
        let z2 = Group::lattice(2);
        let l = FiniteIndexSubgroup::new(&z2, SubgroupSpec::Moduli(vec![3, 4]), 100).unwrap();
        assert_eq!(l.index(), 12);
        let h = FiniteIndexSubgroup::new(&Group::Heisenberg, SubgroupSpec::Level(4), 100).unwrap();
        assert_eq!(h.index(), 64);
    }

    #[test]
    fn cap_and_validation() {
        let h = Group::Heisenberg;
        assert_eq!(
            FiniteIndexSubgroup::new(&h, SubgroupSpec::Level(50), 100_000),
            Err(GroupError::IndexCap { index: 125_000, cap: 100_000 })
        );
        assert!(FiniteIndexSubgroup::new(&Group::cyclic(&[12]), SubgroupSpec::Moduli(vec![5]), 100).is_err());
        assert!(FiniteIndexSubgroup::new(&h, SubgroupSpec::Moduli(vec![2, 2, 2]), 100).is_err());
    }

    #[test]
    fn element_list_subgroups() {
        let g = Group::cyclic(&[12]);
        let l = FiniteIndexSubgroup::new(&g, SubgroupSpec::Elements(vec![el(&[0]), el(&[4]), el(&[8])]), 100).unwrap();
        assert_eq!(l.index(), 4);
        let not_closed = SubgroupSpec::Elements(vec![el(&[0]), el(&[4])]);
        assert!(matches!(
            FiniteIndexSubgroup::new(&g, not_closed, 100),
            Err(GroupError::InvalidSubgroup(_))
        ));
        let trivial = FiniteIndexSubgroup::new(&g, SubgroupSpec::Elements(vec![el(&[0])]), 100).unwrap();
        assert_eq!(trivial.index(), 12);
    }

    /// The Heisenberg congruence kernel is closed under conjugation by every
    /// element of a word ball, not just by generators.
    #[test]
    fn heisenberg_kernel_is_normal() {
        let h = Group::Heisenberg;
        for n in 1..=5 {
            let l = FiniteIndexSubgroup::new(&h, SubgroupSpec::Level(n), 1000).unwrap();
            for g in h.word_ball(3) {
                for k in l.generators() {
                    assert!(l.contains(&h.conjugate(&g, &k)));
                    assert!(l.contains(&h.conjugate(&h.inv(&g), &k)));
                }
            }
        }
    }

    #[test]
    fn families_are_sorted_by_index() {
        let fam = subgroup_family(&Group::cyclic(&[2, 3]), 100).unwrap();
        let idx: Vec<u64> = fam.iter().map(|l| l.index()).collect();
        assert_eq!(idx, vec![1, 2, 3, 6]);
        let fam = subgroup_family(&Group::Heisenberg, 100_000).unwrap();
        assert_eq!(fam.len(), 46);
        let fam = subgroup_family(&Group::lattice(2), 30).unwrap();
        assert_eq!(fam.iter().map(|l| l.index()).collect::<Vec<_>>(), vec![1, 4, 9, 16, 25]);
        let prod = Group::Product { factors: vec![Group::integers(), Group::cyclic(&[2])] };
        let fam = subgroup_family(&prod, 4).unwrap();
        assert_eq!(fam.iter().map(|l| l.index()).collect::<Vec<_>>(), vec![1, 2, 2, 3, 4, 4]);
    }
}
