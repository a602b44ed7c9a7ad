use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ActionInstance, CrossedError, FiniteDimAlgebra};
use crate::folner::{complete_tile, folner_box, FolnerSet, Tiling};
use crate::group::{FiniteIndexSubgroup, Group, SubgroupSpec};
use crate::linalg::ComplexMatrix;

/// `(sqrt 5 - 1) / 2 = [0; 1, 1, 1, ...]`.
pub fn golden_mean() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// `sqrt 2 - 1 = [0; 2, 2, 2, ...]`.
pub fn silver_mean() -> f64 {
    2f64.sqrt() - 1.0
}

/// Distinct continued-fraction denominators `q_k > 1` of `theta` up to `max_q`.
pub fn convergent_denominators(theta: f64, max_q: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let (mut q_prev, mut q) = (0u64, 1u64);
    let mut frac = theta - theta.floor();
    while frac > 1e-12 {
        let x = 1.0 / frac;
        let a = x.floor();
        frac = x - a;
        let Some(next) = (a as u64).checked_mul(q).and_then(|v| v.checked_add(q_prev)) else {
            break;
        };
        if next > max_q {
            break;
        }
        if next > 1 && out.last() != Some(&next) {
            out.push(next);
        }
        q_prev = q;
        q = next;
    }
    out
}

/// `Z` acting on `M_2` by `Ad diag(1, e^{2 pi i theta})`, tested on the flip.
pub fn rotation_instance(theta: f64) -> Result<ActionInstance, CrossedError> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let u = DMatrix::from_row_slice(
        2,
        2,
        &[
            one,
            zero,
            zero,
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * theta),
        ],
    );
    let flip = DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]);
    ActionInstance::inner(
        &Group::integers(),
        FiniteDimAlgebra::matrices(2),
        vec![u],
        vec![flip],
    )
}

/// `C(G / L_m)` with `G` translating through the quotient. Test elements are
/// the indicator of the identity coset and a weighted sum of all indicators.
pub fn bunce_deddens_instance(subgroup: &FiniteIndexSubgroup) -> Result<ActionInstance, CrossedError> {
    let n = subgroup.index() as usize;
    let alg = FiniteDimAlgebra::commutative(n);
    let mut indicator = vec![0.0; n];
    indicator[0] = 1.0;
    let weights: Vec<f64> = (0..n).map(|c| (c + 1) as f64 / n as f64).collect();
    let tests = vec![alg.diagonal(&indicator)?, alg.diagonal(&weights)?];
    ActionInstance::translation(subgroup, 1, tests)
}

/// Projection onto `(cos t, sin t)` in `C^2`. Its commutator with
/// `diag(1, 0)` has norm `|sin 2t| / 2`.
pub fn tilted_projection(t: f64) -> ComplexMatrix {
    let v = nalgebra::dvector![Complex64::new(t.cos(), 0.0), Complex64::new(t.sin(), 0.0)];
    &v * v.adjoint()
}

/// A Følner set with a tile for it.
#[derive(Debug, Clone)]
pub struct Level {
    pub folner: FolnerSet,
    pub tiling: Tiling,
}

/// `F = box(n)` tiled against the subgroup given by `spec`.
pub fn box_level(group: &Group, n: usize, spec: SubgroupSpec, cap: u64) -> Result<Level, CrossedError> {
    let folner = folner_box(group, n)?;
    let l = FiniteIndexSubgroup::new(group, spec, cap)?;
    let tiling = complete_tile(&folner, &l)?;
    Ok(Level { folner, tiling })
}
