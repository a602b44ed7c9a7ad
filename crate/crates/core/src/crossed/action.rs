use std::collections::BTreeSet;

use super::{CrossedError, FiniteDimAlgebra};
use crate::folner::{FolnerSet, Tiling};
use crate::group::{FiniteIndexSubgroup, Group, GroupElement, QuotientMap};
use crate::linalg::{adjoint, ComplexMatrix};
use crate::tolerance;

#[derive(Debug, Clone)]
pub enum ActionKind {
    Trivial,
    /// `G` acts through `G / L_m` by permuting equal-size blocks:
    /// block `j` of `alpha(g) a` is block `q(g)^-1 j` of `a`.
    Translation {
        quotient: QuotientMap,
        block_size: usize,
    },
    /// `alpha(g) = Ad(u_1^{g_1} ... u_m^{g_m})` on `Z^m`.
    Inner { implementers: Vec<ComplexMatrix> },
}

/// A group action on a finite-dimensional algebra together with the finite
/// family of self-adjoint test elements it is checked against.
#[derive(Debug, Clone)]
pub struct ActionInstance {
    group: Group,
    algebra: FiniteDimAlgebra,
    kind: ActionKind,
    test_elements: Vec<ComplexMatrix>,
}

impl ActionInstance {
    pub fn trivial(
        group: &Group,
        algebra: FiniteDimAlgebra,
        test_elements: Vec<ComplexMatrix>,
    ) -> Result<Self, CrossedError> {
        Self::build(group, algebra, ActionKind::Trivial, test_elements)
    }

    /// `A = M_d (+) ... (+) M_d` over `G / L_m`, translated by `G`.
    pub fn translation(
        subgroup: &FiniteIndexSubgroup,
        block_size: usize,
        test_elements: Vec<ComplexMatrix>,
    ) -> Result<Self, CrossedError> {
        let quotient = QuotientMap::new(subgroup)?;
        let algebra = FiniteDimAlgebra::new(vec![block_size; quotient.index()])?;
        Self::build(
            subgroup.group(),
            algebra,
            ActionKind::Translation {
                quotient,
                block_size,
            },
            test_elements,
        )
    }

    pub fn inner(
        group: &Group,
        algebra: FiniteDimAlgebra,
        implementers: Vec<ComplexMatrix>,
        test_elements: Vec<ComplexMatrix>,
    ) -> Result<Self, CrossedError> {
        Self::build(group, algebra, ActionKind::Inner { implementers }, test_elements)
    }

    fn build(
        group: &Group,
        algebra: FiniteDimAlgebra,
        kind: ActionKind,
        test_elements: Vec<ComplexMatrix>,
    ) -> Result<Self, CrossedError> {
        group.validate()?;
        let inst = Self {
            group: group.clone(),
            algebra,
            kind,
            test_elements,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn algebra(&self) -> &FiniteDimAlgebra {
        &self.algebra
    }

    pub fn kind(&self) -> &ActionKind {
        &self.kind
    }

    pub fn test_elements(&self) -> &[ComplexMatrix] {
        &self.test_elements
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ActionKind::Trivial => "trivial",
            ActionKind::Translation { .. } => "translation",
            ActionKind::Inner { .. } => "inner",
        }
    }

    fn validate(&self) -> Result<(), CrossedError> {
        for (i, a) in self.test_elements.iter().enumerate() {
            self.algebra.check(a)?;
            if !self.algebra.is_self_adjoint(a) {
                return Err(CrossedError::NotSelfAdjoint(i));
            }
        }
        match &self.kind {
            ActionKind::Trivial => {}
            ActionKind::Translation { quotient, .. } => {
                if quotient.group() != &self.group {
                    return Err(CrossedError::Unsupported(
                        "quotient map belongs to another group".into(),
                    ));
                }
            }
            ActionKind::Inner { implementers } => {
                let Group::Lattice { rank } = self.group else {
                    return Err(CrossedError::Unsupported(format!(
                        "inner actions are only supported on Z^m, not {}",
                        self.group
                    )));
                };
                if implementers.len() != rank {
                    return Err(CrossedError::Unsupported(format!(
                        "{} implementers for rank {rank}",
                        implementers.len()
                    )));
                }
                let id = self.algebra.identity();
                for (i, u) in implementers.iter().enumerate() {
                    self.algebra.check(u)?;
                    let residual = (adjoint(u) * u - &id).camax();
                    if residual > tolerance::IDENTITY {
                        return Err(CrossedError::NotUnitary { index: i, residual });
                    }
                }
                for (i, u) in implementers.iter().enumerate() {
                    for v in &implementers[i + 1..] {
                        let r = (u * v - v * u).camax();
                        if r > tolerance::IDENTITY {
                            return Err(CrossedError::NotHomomorphism(format!(
                                "implementers do not commute (residual {r:.3e})"
                            )));
                        }
                    }
                }
            }
        }
        let rel = self.relation_residual();
        let tol = match self.kind {
            ActionKind::Inner { .. } => tolerance::IDENTITY,
            _ => 0.0,
        };
        if rel > tol {
            return Err(CrossedError::NotHomomorphism(format!(
                "alpha(st) != alpha(s) alpha(t) (residual {rel:.3e})"
            )));
        }
        let iso = self.isometry_residual();
        if iso > tolerance::IDENTITY {
            return Err(CrossedError::NotIsometric(iso));
        }
        Ok(())
    }

    /// `alpha(g) a`.
    pub fn act(&self, g: &GroupElement, a: &ComplexMatrix) -> ComplexMatrix {
        match &self.kind {
            ActionKind::Trivial => a.clone(),
            ActionKind::Translation {
                quotient,
                block_size,
            } => {
                let c = quotient.coset(g);
                let ci = quotient.inverse(c);
                let d = *block_size;
                let mut out = ComplexMatrix::zeros(a.nrows(), a.ncols());
                for j in 0..quotient.index() {
                    let src = quotient.mul(ci, j);
                    out.view_mut((j * d, j * d), (d, d))
                        .copy_from(&a.view((src * d, src * d), (d, d)));
                }
                out
            }
            ActionKind::Inner { implementers } => {
                let u = self.implementer(implementers, g);
                &u * a * adjoint(&u)
            }
        }
    }

    fn implementer(&self, implementers: &[ComplexMatrix], g: &GroupElement) -> ComplexMatrix {
        let mut u = self.algebra.identity();
        for (ui, &k) in implementers.iter().zip(g.coords()) {
            u *= unitary_power(ui, k);
        }
        u
    }

    /// Largest `||alpha(st) a - alpha(s) alpha(t) a||` over pairs of
    /// generators (with inverses) and test elements.
    pub fn relation_residual(&self) -> f64 {
        let gens = self.group.generators();
        let mut worst: f64 = 0.0;
        for a in &self.test_elements {
            for s in &gens {
                for t in &gens {
                    let lhs = self.act(&self.group.mul(s, t), a);
                    let rhs = self.act(s, &self.act(t, a));
                    worst = worst.max(self.algebra.norm(&(lhs - rhs)));
                }
            }
        }
        worst
    }

    /// Largest `| ||alpha(s) a|| - ||a|| |` over generators and test elements.
    pub fn isometry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.test_elements {
            let n = self.algebra.norm(a);
            for s in self.group.generators() {
                worst = worst.max((self.algebra.norm(&self.act(&s, a)) - n).abs());
            }
        }
        worst
    }

    /// `max_{l in L ∩ K K^-1 F} ||alpha(l) a - a||`.
    pub fn almost_periodicity_defect(
        &self,
        a: &ComplexMatrix,
        tiling: &Tiling,
        f: &FolnerSet,
    ) -> f64 {
        defect_set(tiling, f)
            .iter()
            .map(|l| self.algebra.norm(&(self.act(l, a) - a)))
            .fold(0.0, f64::max)
    }
}

/// `L ∩ K K^-1 F`, in normal-form order. For fixed `k'` and `f` exactly one
/// `k` in the transversal `K` puts `k k'^-1 f` into `L`.
pub fn defect_set(tiling: &Tiling, f: &FolnerSet) -> Vec<GroupElement> {
    let g = tiling.group();
    let q = tiling.quotient();
    let mut out = BTreeSet::new();
    for kp in tiling.tile() {
        let kpi = g.inv(kp);
        for x in f.elements() {
            let w = g.mul(&kpi, x);
            let k = &tiling.tile()[q.inverse(q.coset(&w))];
            out.insert(g.mul(k, &w));
        }
    }
    out.into_iter().collect()
}

fn unitary_power(u: &ComplexMatrix, k: i64) -> ComplexMatrix {
    let base = if k < 0 { adjoint(u) } else { u.clone() };
    let mut e = k.unsigned_abs();
    let mut acc = ComplexMatrix::identity(u.nrows(), u.ncols());
    let mut sq = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}
