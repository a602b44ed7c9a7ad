use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CrossedError;
use crate::linalg::{adjoint, operator_norm, ComplexMatrix};
use crate::tolerance;

/// `M_{d_1} (+) ... (+) M_{d_r}`, represented block-diagonally on `C^D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteDimAlgebra {
    blocks: Vec<usize>,
}

impl FiniteDimAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self, CrossedError> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(CrossedError::Algebra(format!("invalid block sizes {blocks:?}")));
        }
        Ok(Self { blocks })
    }

    /// `C^n = C(X)` for an `n`-point space.
    pub fn commutative(n: usize) -> Self {
        Self { blocks: vec![1; n.max(1)] }
    }

    pub fn matrices(d: usize) -> Self {
        Self { blocks: vec![d.max(1)] }
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// Dimension `D` of the defining representation.
    pub fn dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, &d| {
                let o = *acc;
                *acc += d;
                Some(o)
            })
            .collect()
    }

    pub fn identity(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.dim(), self.dim())
    }

    /// Block-diagonal element from a real vector; requires all blocks of size 1.
    pub fn diagonal(&self, values: &[f64]) -> Result<ComplexMatrix, CrossedError> {
        if values.len() != self.dim() || self.blocks.iter().any(|&d| d != 1) {
            return Err(CrossedError::Algebra(
                "diagonal elements need a commutative algebra of matching size".into(),
            ));
        }
        let d = nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| Complex64::new(v, 0.0)),
        );
        Ok(DMatrix::from_diagonal(&d))
    }

    pub fn block(&self, a: &ComplexMatrix, i: usize) -> ComplexMatrix {
        let o = self.offsets()[i];
        let d = self.blocks[i];
        a.view((o, o), (d, d)).into_owned()
    }

    pub fn from_blocks(&self, parts: &[ComplexMatrix]) -> Result<ComplexMatrix, CrossedError> {
        if parts.len() != self.blocks.len()
            || parts
                .iter()
                .zip(&self.blocks)
                .any(|(p, &d)| p.nrows() != d || p.ncols() != d)
        {
            return Err(CrossedError::Algebra("block shapes do not match".into()));
        }
        let mut m = ComplexMatrix::zeros(self.dim(), self.dim());
        for ((p, o), d) in parts.iter().zip(self.offsets()).zip(&self.blocks) {
            m.view_mut((o, o), (*d, *d)).copy_from(p);
        }
        Ok(m)
    }

    /// Largest entry outside the diagonal blocks, or `None` on a shape mismatch.
    pub fn off_block_mass(&self, a: &ComplexMatrix) -> Option<f64> {
        let n = self.dim();
        if a.nrows() != n || a.ncols() != n {
            return None;
        }
        let mut owner = Vec::with_capacity(n);
        for (i, &d) in self.blocks.iter().enumerate() {
            owner.extend(std::iter::repeat_n(i, d));
        }
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                if owner[r] != owner[c] {
                    worst = worst.max(a[(r, c)].norm());
                }
            }
        }
        Some(worst)
    }

    pub fn contains(&self, a: &ComplexMatrix) -> bool {
        crate::linalg::is_finite(a)
            && self
                .off_block_mass(a)
                .is_some_and(|m| m <= tolerance::IDENTITY)
    }

    pub fn check(&self, a: &ComplexMatrix) -> Result<(), CrossedError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(CrossedError::Algebra(format!(
                "{}x{} matrix is not an element of the algebra with blocks {:?}",
                a.nrows(),
                a.ncols(),
                self.blocks
            )))
        }
    }

    /// C*-norm: the largest block norm.
    pub fn norm(&self, a: &ComplexMatrix) -> f64 {
        (0..self.blocks.len())
            .map(|i| operator_norm(&self.block(a, i), tolerance::NORM_TOL).unwrap_or(f64::NAN))
            .fold(0.0, f64::max)
    }

    pub fn is_self_adjoint(&self, a: &ComplexMatrix) -> bool {
        (a - adjoint(a)).iter().all(|z| z.norm() <= tolerance::IDENTITY)
    }
}
