use std::collections::HashMap;

use super::{FiniteIndexSubgroup, Group, GroupElement, GroupError, SubgroupSpec};

/// Bijective indexing of the cosets of a finite-index normal subgroup by
/// `0..index`, with `q(e) = 0` and a canonical representative per coset.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    subgroup: FiniteIndexSubgroup,
    scheme: Scheme,
}

#[derive(Debug, Clone)]
enum Scheme {
    /// Coordinatewise residues, mixed radix with the first coordinate fastest.
    Residues { moduli: Vec<i64> },
    /// Explicit coset table over a finite group.
    Table {
        cosets: HashMap<GroupElement, usize>,
        reps: Vec<GroupElement>,
    },
    /// One scheme per product factor, mixed radix over factor indices.
    Product { parts: Vec<(usize, QuotientMap)> },
}

impl QuotientMap {
    pub fn new(subgroup: &FiniteIndexSubgroup) -> Result<Self, GroupError> {
        let scheme = build_scheme(subgroup.group(), subgroup.spec(), subgroup)?;
        let q = Self {
            subgroup: subgroup.clone(),
            scheme,
        };
        q.self_check()?;
        Ok(q)
    }

    pub fn subgroup(&self) -> &FiniteIndexSubgroup {
        &self.subgroup
    }

    pub fn group(&self) -> &Group {
        self.subgroup.group()
    }

    pub fn index(&self) -> usize {
        self.subgroup.index() as usize
    }

    /// Coset index of `x`.
    pub fn coset(&self, x: &GroupElement) -> usize {
        self.coset_of(x.coords())
    }

    fn coset_of(&self, x: &[i64]) -> usize {
        match &self.scheme {
            Scheme::Residues { moduli } => {
                let mut idx = 0usize;
                let mut stride = 1usize;
                for (c, m) in x.iter().zip(moduli) {
                    idx += c.rem_euclid(*m) as usize * stride;
                    stride *= *m as usize;
                }
                idx
            }
            Scheme::Table { cosets, .. } => cosets[&GroupElement::new(x)],
            Scheme::Product { parts } => {
                let mut idx = 0usize;
                let mut stride = 1usize;
                let mut off = 0;
                for (d, q) in parts {
                    idx += q.coset_of(&x[off..off + d]) * stride;
                    stride *= q.index();
                    off += d;
                }
                idx
            }
        }
    }

    /// Canonical representative of coset `i`.
    pub fn representative(&self, i: usize) -> GroupElement {
        let mut out = Vec::with_capacity(self.group().dim());
        self.rep_into(i, &mut out);
        GroupElement::from(out)
    }

    fn rep_into(&self, mut i: usize, out: &mut Vec<i64>) {
        match &self.scheme {
            Scheme::Residues { moduli } => {
                for m in moduli {
                    out.push((i % *m as usize) as i64);
                    i /= *m as usize;
                }
            }
            Scheme::Table { reps, .. } => out.extend_from_slice(reps[i].coords()),
            Scheme::Product { parts } => {
                for (_, q) in parts {
                    q.rep_into(i % q.index(), out);
                    i /= q.index();
                }
            }
        }
    }

    /// Quotient group law on coset indices.
    pub fn mul(&self, i: usize, j: usize) -> usize {
        let g = self.group();
        self.coset(&g.mul(&self.representative(i), &self.representative(j)))
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.coset(&self.group().inv(&self.representative(i)))
    }

    /// Every representative maps back to its own index and lies in the group.
    fn self_check(&self) -> Result<(), GroupError> {
        if self.coset(&self.group().identity()) != 0 {
            return Err(GroupError::InvalidSubgroup("identity is not coset 0".into()));
        }
        for i in 0..self.index() {
            let r = self.representative(i);
            if !self.group().contains(&r) || self.coset(&r) != i {
                return Err(GroupError::InvalidSubgroup(format!(
                    "coset {i} has no consistent representative"
                )));
            }
        }
        Ok(())
    }
}

fn build_scheme(
    group: &Group,
    spec: &SubgroupSpec,
    whole: &FiniteIndexSubgroup,
) -> Result<Scheme, GroupError> {
    Ok(match (group, spec) {
        (_, SubgroupSpec::Moduli(m)) => Scheme::Residues { moduli: m.clone() },
        (Group::Heisenberg, SubgroupSpec::Level(n)) => Scheme::Residues {
            moduli: vec![*n; 3],
        },
        (_, SubgroupSpec::Elements(_)) => {
            let mut cosets = HashMap::new();
            let mut reps = Vec::new();
            // Elements come sorted, identity first, so q(e) = 0 and every
            // representative is the minimal normal form in its coset.
            for x in group.elements()? {
                if cosets.contains_key(&x) {
                    continue;
                }
                let i = reps.len();
                for l in subgroup_elements(whole) {
                    cosets.insert(group.mul(&x, &l), i);
                }
                reps.push(x);
            }
            Scheme::Table { cosets, reps }
        }
        (Group::Product { factors }, SubgroupSpec::Product(specs)) => {
            let mut parts = Vec::new();
            for (g, s) in factors.iter().zip(specs) {
                let sub = FiniteIndexSubgroup::new(g, s.clone(), u64::MAX)?;
                parts.push((g.dim(), QuotientMap::new(&sub)?));
            }
            Scheme::Product { parts }
        }
        _ => {
            return Err(GroupError::InvalidSubgroup(format!(
                "{spec:?} does not apply to {group}"
            )))
        }
    })
}

fn subgroup_elements(l: &FiniteIndexSubgroup) -> Vec<GroupElement> {
    match l.spec() {
        SubgroupSpec::Elements(els) => els.clone(),
        _ => unreachable!("table scheme only for element lists"),
    }
}
