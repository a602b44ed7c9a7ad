//! Operator (spectral) norms.
//!
//! Small matrices go through a full singular value decomposition. Larger ones,
//! and matrix-free operators, use power iteration on `M*M` started from a fixed
//! seeded vector; iteration stops once the Rayleigh residual certifies the
//! estimate to within the requested tolerance.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::{is_finite, is_real, real_part, ComplexMatrix};
use super::LinalgError;
use crate::tolerance;

/// A linear map on `C^dim` known only through its action.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
    fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]);
}

impl LinearOperator for ComplexMatrix {
    fn dim(&self) -> usize {
        self.nrows().max(self.ncols())
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let xv = DVector::from_column_slice(&x[..self.ncols()]);
        let r = self * xv;
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        y[..self.nrows()].copy_from_slice(r.as_slice());
    }

    fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        let xv = DVector::from_column_slice(&x[..self.nrows()]);
        let r = self.ad_mul(&xv);
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        y[..self.ncols()].copy_from_slice(r.as_slice());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    Dense,
    PowerIteration,
    /// Low-rank factors reduced to their Gram matrices.
    Gram,
    /// Maximum over an orthogonal block decomposition supplied by the caller.
    Blockwise,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub method: NormMethod,
    /// Final Rayleigh residual for power iteration, zero for direct methods.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct NormOptions {
    pub tol: f64,
    pub dense_threshold: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            tol: tolerance::NORM_TOL,
            dense_threshold: tolerance::DENSE_THRESHOLD,
            max_iterations: 20_000,
            seed: 0x005e_ed0f_f01e,
        }
    }
}

/// Largest singular value of `m`, accurate to within `tol`.
pub fn operator_norm(m: &ComplexMatrix, tol: f64) -> Result<f64, LinalgError> {
    let opts = NormOptions {
        tol,
        ..NormOptions::default()
    };
    operator_norm_with(m, &opts).map(|e| e.value)
}

pub fn operator_norm_with(
    m: &ComplexMatrix,
    opts: &NormOptions,
) -> Result<NormEstimate, LinalgError> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(LinalgError::BadTolerance(opts.tol));
    }
    if !is_finite(m) {
        return Err(LinalgError::NonFinite);
    }
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(direct(0.0));
    }
    if m.nrows().max(m.ncols()) <= opts.dense_threshold {
        return Ok(direct(dense_norm(m)));
    }
    power_norm(m, opts)
}

fn direct(value: f64) -> NormEstimate {
    NormEstimate {
        value,
        method: NormMethod::Dense,
        residual: 0.0,
        iterations: 0,
    }
}

fn dense_norm(m: &ComplexMatrix) -> f64 {
    let sv = if is_real(m) {
        real_part(m).singular_values()
    } else {
        m.clone().singular_values()
    };
    sv.iter().cloned().fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix, ascending. Only the lower triangle is read.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = if is_real(m) {
        real_part(m).symmetric_eigenvalues().iter().cloned().collect()
    } else {
        m.clone().symmetric_eigenvalues().iter().cloned().collect()
    };
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Power iteration on `A*A` for a matrix-free operator.
pub fn power_norm<O: LinearOperator + ?Sized>(
    op: &O,
    opts: &NormOptions,
) -> Result<NormEstimate, LinalgError> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(LinalgError::BadTolerance(opts.tol));
    }
    let n = op.dim();
    if n == 0 {
        return Ok(direct(0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    normalize(&mut v);
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        op.apply(&v, &mut w);
        op.apply_adjoint(&w, &mut z);
        // Rayleigh quotient of A*A at v is |Av|^2.
        let mu: f64 = w.iter().map(|c| c.norm_sqr()).sum();
        residual = z
            .iter()
            .zip(&v)
            .map(|(zi, vi)| (zi - vi * mu).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let sigma = mu.sqrt();
        // Some eigenvalue of A*A lies within `residual` of mu, so sqrt(mu)
        // is within residual / sigma of a singular value.
        if residual <= opts.tol * sigma.max(opts.tol) {
            return Ok(NormEstimate {
                value: sigma,
                method: NormMethod::PowerIteration,
                residual,
                iterations: it,
            });
        }
        v.copy_from_slice(&z);
        normalize(&mut v);
    }
    Err(LinalgError::NonConvergence {
        iterations: opts.max_iterations,
        residual,
    })
}

fn normalize(v: &mut [Complex64]) {
    let nrm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if nrm > 0.0 {
        v.iter_mut().for_each(|c| *c /= nrm);
    }
}
