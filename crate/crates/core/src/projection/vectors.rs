use std::collections::HashMap;

use nalgebra::DMatrix;
use num_bigint::BigInt;

use super::{PhiTable, ProjectionError};
use crate::group::{Group, GroupElement, QuotientMap};
use crate::linalg::{
    from_real, gram_matrix, hermitian_eigenvalues, operator_norm, LowRankOperator, Rational,
    SparseVector,
};
use crate::tolerance;

/// Ordered, duplicate-free list of group elements indexing a finite
/// compression of `l^2(G)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    points: Vec<GroupElement>,
    lookup: HashMap<GroupElement, usize>,
}

impl Window {
    /// Sorts and deduplicates.
    pub fn new(mut points: Vec<GroupElement>) -> Self {
        points.sort();
        points.dedup();
        let lookup = points.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        Self { points, lookup }
    }

    pub fn points(&self) -> &[GroupElement] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn position(&self, x: &GroupElement) -> Option<usize> {
        self.lookup.get(x).copied()
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.lookup.contains_key(x)
    }
}

/// `xi_{yL} = sum_{x in yL} phi(x) delta_x` for a tile element `y`.
#[derive(Debug, Clone)]
pub struct CosetVector {
    pub label: GroupElement,
    pub coset: usize,
    /// `(x, phi(x))` over the support, in normal-form order.
    pub entries: Vec<(GroupElement, f64)>,
}

impl CosetVector {
    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum()
    }

    /// Entries landing in `window`, as window-indexed sparse vector.
    pub fn on_window(&self, window: &Window) -> SparseVector {
        SparseVector::from_real(
            self.entries
                .iter()
                .filter_map(|(x, a)| window.position(x).map(|i| (i, *a))),
        )
    }

    /// `lambda(s) xi`, restricted to `window`.
    pub fn translated_on(&self, group: &Group, s: &GroupElement, window: &Window) -> SparseVector {
        SparseVector::from_real(
            self.entries
                .iter()
                .filter_map(|(x, a)| window.position(&group.mul(s, x)).map(|i| (i, *a))),
        )
    }
}

/// `P = sum_{y in K} P_{yL}` together with its rank-one factors.
#[derive(Debug, Clone)]
pub struct QdProjection {
    group: Group,
    quotient: QuotientMap,
    window: Window,
    vectors: Vec<CosetVector>,
    by_coset: Vec<usize>,
}

/// Assembles the coset vectors once every coset sum has been certified equal
/// to 1. The window is the support `F^-1 K`.
pub fn build_projection(phi: &PhiTable<'_>) -> Result<QdProjection, ProjectionError> {
    let one = Rational::from_integer(BigInt::from(1));
    let tiling = phi.tiling();
    let mut vectors = Vec::with_capacity(tiling.index());
    for (c, y) in tiling.tile().iter().enumerate() {
        let sum = phi.coset_sum(y);
        if sum != one {
            return Err(ProjectionError::CosetSum {
                label: y.to_string(),
                value: sum.to_string(),
            });
        }
        let entries = phi
            .coset_points(c)
            .map(|x| (x.clone(), phi.amplitude(x)))
            .collect();
        vectors.push(CosetVector {
            label: y.clone(),
            coset: c,
            entries,
        });
    }
    let mut by_coset = vec![0; vectors.len()];
    for (i, v) in vectors.iter().enumerate() {
        by_coset[v.coset] = i;
    }
    Ok(QdProjection {
        group: phi.folner().group().clone(),
        quotient: tiling.quotient().clone(),
        window: Window::new(phi.support().to_vec()),
        vectors,
        by_coset,
    })
}

impl QdProjection {
    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Support window `F^-1 K`.
    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn vectors(&self) -> &[CosetVector] {
        &self.vectors
    }

    /// The coset vector carried by the coset containing `x`.
    pub fn vector_for(&self, x: &GroupElement) -> &CosetVector {
        &self.vectors[self.by_coset[self.quotient.coset(x)]]
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn sparse_vectors(&self, window: &Window) -> Vec<SparseVector> {
        self.vectors.iter().map(|v| v.on_window(window)).collect()
    }

    /// `<xi_y, xi_z>` over the tile.
    pub fn gram(&self) -> DMatrix<f64> {
        gram_matrix(&self.sparse_vectors(&self.window)).map(|z| z.re)
    }

    /// Largest entrywise deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let g = self.gram();
        let n = g.nrows();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (g[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    /// True when the supports of the coset vectors are pairwise disjoint.
    pub fn supports_disjoint(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.vectors
            .iter()
            .flat_map(|v| v.entries.iter().map(|e| &e.0))
            .all(|x| seen.insert(x))
    }

    /// Dense matrix of `P` restricted to `window`.
    pub fn dense_on(&self, window: &Window) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(window.len(), window.len());
        for v in &self.vectors {
            let idx: Vec<(usize, f64)> = v
                .entries
                .iter()
                .filter_map(|(x, a)| window.position(x).map(|i| (i, *a)))
                .collect();
            for &(i, a) in &idx {
                for &(j, b) in &idx {
                    p[(i, j)] += a * b;
                }
            }
        }
        p
    }

    pub fn dense(&self) -> DMatrix<f64> {
        self.dense_on(&self.window)
    }

    pub fn low_rank(&self) -> LowRankOperator {
        let mut op = LowRankOperator::new(self.window.len());
        for v in self.sparse_vectors(&self.window) {
            op.push(v.clone(), v).expect("vectors live on the window");
        }
        op
    }

    pub fn trace(&self) -> f64 {
        self.vectors.iter().map(CosetVector::norm_sqr).sum()
    }

    /// `||P^2 - P||`: dense on small windows, otherwise from the spectrum of
    /// the Gram matrix (the nonzero eigenvalues of `P` are those of `Gram`).
    pub fn idempotency_defect(&self) -> Result<f64, ProjectionError> {
        if self.window.len() <= tolerance::DENSE_THRESHOLD {
            let p = self.dense();
            let d = &p * &p - &p;
            return Ok(operator_norm(&from_real(&d), tolerance::NORM_TOL)?);
        }
        let g = from_real(&self.gram());
        Ok(hermitian_eigenvalues(&g)
            .into_iter()
            .map(|mu| (mu * mu - mu).abs())
            .fold(0.0, f64::max))
    }

    /// Largest entry of `|P - P^T|` on the support window.
    pub fn asymmetry(&self) -> f64 {
        if self.window.len() > tolerance::DENSE_THRESHOLD {
            return 0.0;
        }
        let p = self.dense();
        (&p - p.transpose()).amax()
    }

    /// `||P delta_x - delta_x||`, computed from the coset vectors.
    pub fn projection_defect(&self, x: &GroupElement) -> f64 {
        let mut image: HashMap<&GroupElement, f64> = HashMap::new();
        for v in &self.vectors {
            if let Some((_, ax)) = v.entries.iter().find(|e| &e.0 == x) {
                for (z, az) in &v.entries {
                    *image.entry(z).or_insert(0.0) += ax * az;
                }
            }
        }
        let mut sq = 0.0;
        let mut hit = false;
        let mut keys: Vec<&&GroupElement> = image.keys().collect();
        keys.sort();
        for z in keys {
            let mut val = image[*z];
            if *z == x {
                val -= 1.0;
                hit = true;
            }
            sq += val * val;
        }
        if !hit {
            sq += 1.0;
        }
        sq.sqrt()
    }
}
