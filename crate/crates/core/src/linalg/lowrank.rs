use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::norm::{hermitian_eigenvalues, LinearOperator};
use super::LinalgError;

/// Sparse vector in `C^dim`, entries sorted by index with no repeats.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, Complex64)>,
}

impl SparseVector {
    /// Collects `(index, value)` pairs, summing repeated indices and dropping zeros.
    pub fn from_entries(mut entries: Vec<(usize, Complex64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, Complex64)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += v,
                _ => out.push((i, v)),
            }
        }
        out.retain(|e| e.1 != Complex64::new(0.0, 0.0));
        Self { entries: out }
    }

    pub fn from_real(entries: impl IntoIterator<Item = (usize, f64)>) -> Self {
        Self::from_entries(
            entries
                .into_iter()
                .map(|(i, x)| (i, Complex64::new(x, 0.0)))
                .collect(),
        )
    }

    pub fn entries(&self) -> &[(usize, Complex64)] {
        &self.entries
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_entries(self.entries.iter().map(|&(i, v)| (i, v * c)).collect())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.1.norm_sqr()).sum()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    /// `<self, other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &SparseVector) -> Complex64 {
        let (mut i, mut j) = (0, 0);
        let mut acc = Complex64::new(0.0, 0.0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (self.entries[i], other.entries[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a.1.conj() * b.1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

/// Gram matrix `G[i][j] = <v_i, v_j>` of a family of sparse vectors.
///
/// Accumulates per coordinate, so the cost is the sum over coordinates of the
/// squared number of vectors touching it.
pub fn gram_matrix(family: &[SparseVector]) -> ComplexMatrix {
    let r = family.len();
    let mut by_coord: Vec<(usize, usize, Complex64)> = family
        .iter()
        .enumerate()
        .flat_map(|(col, v)| v.entries.iter().map(move |&(i, x)| (i, col, x)))
        .collect();
    by_coord.sort_by_key(|e| (e.0, e.1));
    let mut g = ComplexMatrix::zeros(r, r);
    let mut start = 0;
    while start < by_coord.len() {
        let mut end = start;
        while end < by_coord.len() && by_coord[end].0 == by_coord[start].0 {
            end += 1;
        }
        let bucket = &by_coord[start..end];
        for &(_, a, xa) in bucket {
            for &(_, b, xb) in bucket {
                g[(a, b)] += xa.conj() * xb;
            }
        }
        start = end;
    }
    g
}

/// Operator on `C^dim` stored as `sum_i left_i right_i^*`.
#[derive(Debug, Clone, Default)]
pub struct LowRankOperator {
    dim: usize,
    left: Vec<SparseVector>,
    right: Vec<SparseVector>,
}

impl LowRankOperator {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            left: Vec::new(),
            right: Vec::new(),
        }
    }

    pub fn push(&mut self, left: SparseVector, right: SparseVector) -> Result<(), LinalgError> {
        for v in [&left, &right] {
            if v.max_index().is_some_and(|m| m >= self.dim) {
                return Err(LinalgError::Dimension(format!(
                    "vector index {} outside dimension {}",
                    v.max_index().unwrap(),
                    self.dim
                )));
            }
        }
        self.left.push(left);
        self.right.push(right);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank_bound(&self) -> usize {
        self.left.len()
    }

    pub fn left(&self) -> &[SparseVector] {
        &self.left
    }

    pub fn right(&self) -> &[SparseVector] {
        &self.right
    }

    pub fn materialize(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for (u, v) in self.left.iter().zip(&self.right) {
            for &(i, x) in u.entries() {
                for &(j, y) in v.entries() {
                    m[(i, j)] += x * y.conj();
                }
            }
        }
        m
    }

    /// Operator norm through the rank x rank Gram system.
    ///
    /// With `U`, `V` the matrices whose columns are the left and right factors,
    /// `||U V*||^2` is the top eigenvalue of `Gv^{1/2} Gu Gv^{1/2}` where `Gu`,
    /// `Gv` are their Gram matrices.
    pub fn gram_norm(&self) -> f64 {
        if self.left.is_empty() {
            return 0.0;
        }
        let gu = gram_matrix(&self.left);
        let gv = gram_matrix(&self.right);
        let root = hermitian_sqrt(&gv);
        let b = &root * gu * &root;
        let b = (&b + b.adjoint()).scale(0.5);
        hermitian_eigenvalues(&b)
            .last()
            .copied()
            .unwrap_or(0.0)
            .max(0.0)
            .sqrt()
    }
}

/// Positive square root of a positive semidefinite Hermitian matrix;
/// small negative eigenvalues from rounding are clamped to zero.
fn hermitian_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    let sym = (m + m.adjoint()).scale(0.5);
    if super::matrix::is_real(&sym) {
        let eig = super::matrix::real_part(&sym).symmetric_eigen();
        let d = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
        let q = &eig.eigenvectors;
        let r = q * nalgebra::DMatrix::from_diagonal(&d) * q.transpose();
        return super::matrix::from_real(&r);
    }
    let eig = sym.symmetric_eigen();
    let d = eig
        .eigenvalues
        .map(|x| Complex64::new(x.max(0.0).sqrt(), 0.0));
    let q = &eig.eigenvectors;
    q * ComplexMatrix::from_diagonal(&d) * q.adjoint()
}

impl SparseVector {
    fn dot(&self, x: &[Complex64]) -> Complex64 {
        self.entries.iter().map(|(i, a)| a.conj() * x[*i]).sum()
    }

    fn axpy(&self, c: Complex64, y: &mut [Complex64]) {
        for (i, a) in &self.entries {
            y[*i] += c * a;
        }
    }
}

impl LinearOperator for LowRankOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (u, v) in self.left.iter().zip(&self.right) {
            u.axpy(v.dot(x), y);
        }
    }

    fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (u, v) in self.left.iter().zip(&self.right) {
            v.axpy(u.dot(x), y);
        }
    }
}
