use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{defect_set, ActionInstance, CrossedError};
use crate::folner::{FolnerSet, Tiling};
use crate::group::GroupElement;
use crate::linalg::{
    adjoint, operator_norm, operator_norm_with, power_norm, ComplexMatrix, LinearOperator,
    NormMethod, NormOptions,
};
use crate::projection::QdProjection;
use crate::tolerance;

/// Per-coset data for `[sigma(a), Q (x) P_{yL}]`.
#[derive(Debug, Clone, Serialize)]
pub struct CosetBlock {
    pub label: GroupElement,
    pub points: usize,
    /// `||[sigma(a), Q (x) P_{yL}]||`.
    pub norm: f64,
    /// `||(I - Q (x) P_{yL}) sigma(a) (Q (x) P_{yL})||`.
    pub off_diagonal: f64,
    /// `||[rho(alpha(y^-1) a), Q]||`.
    pub q_commutator: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem7Report {
    pub dim: usize,
    pub window: usize,
    pub blocks: Vec<CosetBlock>,
    pub full_norm: f64,
    pub full_route: NormMethod,
    pub max_block: f64,
    pub orthogonality_residual: f64,
    pub orthogonality_pairs: u64,
    pub overlapping_pairs: u64,
    pub defect: f64,
    pub defect_set_size: usize,
    /// `2 max_y (||[rho(alpha(y^-1) a), Q]|| + defect)`.
    pub bound: f64,
}

impl Theorem7Report {
    pub fn norm_gap(&self) -> f64 {
        (self.full_norm - self.max_block).abs()
    }

    pub fn orthogonality_ok(&self) -> bool {
        self.orthogonality_residual <= tolerance::STRUCTURE
    }

    pub fn norms_agree(&self) -> bool {
        self.norm_gap() <= tolerance::STRUCTURE
    }

    /// Both per-coset steps of the estimate: `||C_y|| <= 2 ||E_y||` and
    /// `||E_y|| <= ||[rho(alpha(y^-1) a), Q]|| + defect`.
    pub fn per_coset_ok(&self) -> bool {
        self.blocks.iter().all(|b| {
            b.norm <= 2.0 * b.off_diagonal + tolerance::INEQUALITY
                && b.off_diagonal <= b.q_commutator + self.defect + tolerance::INEQUALITY
        })
    }

    pub fn bound_ok(&self) -> bool {
        self.full_norm <= self.bound + tolerance::INEQUALITY
    }

    pub fn passed(&self) -> bool {
        self.orthogonality_ok() && self.norms_agree() && self.per_coset_ok() && self.bound_ok()
    }
}

fn check_projection(q: &ComplexMatrix, dim: usize) -> Result<(), CrossedError> {
    if q.nrows() != dim || q.ncols() != dim {
        return Err(CrossedError::Algebra(format!(
            "Q is {}x{}, expected {dim}x{dim}",
            q.nrows(),
            q.ncols()
        )));
    }
    let r = (q - adjoint(q)).camax().max((q * q - q).camax());
    if r > tolerance::IDENTITY {
        return Err(CrossedError::NotProjection(r));
    }
    Ok(())
}

/// Runs the coset-by-coset estimate for `[sigma(a), Q (x) P]` and computes the
/// full commutator norm independently on the support window of `P`.
pub fn theorem7_commutator(
    action: &ActionInstance,
    a: &ComplexMatrix,
    q: &ComplexMatrix,
    proj: &QdProjection,
    tiling: &Tiling,
    f: &FolnerSet,
) -> Result<Theorem7Report, CrossedError> {
    let g = action.group();
    if proj.group() != g || tiling.group() != g || f.group() != g {
        return Err(CrossedError::Window(
            "action, projection and tiling live on different groups".into(),
        ));
    }
    let alg = action.algebra();
    let d = alg.dim();
    alg.check(a)?;
    check_projection(q, d)?;
    let window = proj.window();
    for v in proj.vectors() {
        if let Some((x, _)) = v.entries.iter().find(|(x, _)| !window.contains(x)) {
            return Err(CrossedError::Window(format!(
                "coset support point {x} lies outside the window"
            )));
        }
    }

    let blocks_at: Vec<ComplexMatrix> = window
        .points()
        .iter()
        .map(|x| action.act(&g.inv(x), a))
        .collect();

    let defect_points = defect_set(tiling, f);
    let defect = defect_points
        .iter()
        .map(|l| alg.norm(&(action.act(l, a) - a)))
        .fold(0.0, f64::max);

    let blocks: Vec<CosetBlock> = proj
        .vectors()
        .par_iter()
        .map(|v| {
            let idx: Vec<(usize, f64)> = v
                .entries
                .iter()
                .map(|(x, phi)| (window.position(x).expect("checked above"), *phi))
                .collect();
            coset_block(v.label.clone(), &idx, &blocks_at, q, &action.act(&g.inv(&v.label), a))
        })
        .collect::<Result<_, _>>()?;

    let (orthogonality_residual, overlapping_pairs) = orthogonality(proj, &blocks_at, q)?;
    let r = proj.vectors().len() as u64;

    let (full_norm, full_route) = full_norm(proj, &blocks_at, q)?;
    let max_block = blocks.iter().map(|b| b.norm).fold(0.0, f64::max);
    let bound = 2.0
        * blocks
            .iter()
            .map(|b| b.q_commutator + defect)
            .fold(0.0, f64::max);
    Ok(Theorem7Report {
        dim: d,
        window: window.len(),
        blocks,
        full_norm,
        full_route,
        max_block,
        orthogonality_residual,
        orthogonality_pairs: r * r.saturating_sub(1) / 2,
        overlapping_pairs,
        defect,
        defect_set_size: defect_points.len(),
        bound,
    })
}

/// Dense `[sigma(a), Q (x) P_{yL}]` on `C^D (x) l^2(supp xi_y)`:
/// block `(j, k)` is `phi_j phi_k (A_j Q - Q A_k)`.
fn block_matrix(idx: &[(usize, f64)], at: &[ComplexMatrix], q: &ComplexMatrix) -> ComplexMatrix {
    let d = q.nrows();
    let s = idx.len();
    let aq: Vec<ComplexMatrix> = idx.iter().map(|(i, _)| &at[*i] * q).collect();
    let qa: Vec<ComplexMatrix> = idx.iter().map(|(i, _)| q * &at[*i]).collect();
    let mut m = ComplexMatrix::zeros(d * s, d * s);
    for (j, (_, pj)) in idx.iter().enumerate() {
        for (k, (_, pk)) in idx.iter().enumerate() {
            let c = Complex64::new(pj * pk, 0.0);
            m.view_mut((j * d, k * d), (d, d))
                .copy_from(&((&aq[j] - &qa[k]) * c));
        }
    }
    m
}

fn coset_block(
    label: GroupElement,
    idx: &[(usize, f64)],
    at: &[ComplexMatrix],
    q: &ComplexMatrix,
    a_label: &ComplexMatrix,
) -> Result<CosetBlock, CrossedError> {
    let d = q.nrows();
    let norm = operator_norm(&block_matrix(idx, at, q), tolerance::NORM_TOL)?;
    let mut b = ComplexMatrix::zeros(d, d);
    for (i, p) in idx {
        b += &at[*i] * Complex64::new(p * p, 0.0);
    }
    let qbq = q * b * q;
    let mut e = ComplexMatrix::zeros(d * idx.len(), d);
    for (j, (i, p)) in idx.iter().enumerate() {
        e.view_mut((j * d, 0), (d, d))
            .copy_from(&((&at[*i] * q - &qbq) * Complex64::new(*p, 0.0)));
    }
    let off_diagonal = operator_norm(&e, tolerance::NORM_TOL)?;
    let q_commutator = operator_norm(&(a_label * q - q * a_label), tolerance::NORM_TOL)?;
    Ok(CosetBlock {
        label,
        points: idx.len(),
        norm,
        off_diagonal,
        q_commutator,
    })
}

/// Largest `||C_y* C_z||` over distinct cosets. `C_y* C_z` only sees rows
/// where both supports meet, so pairs with disjoint supports contribute an
/// exact zero and only overlapping pairs are multiplied out.
fn orthogonality(
    proj: &QdProjection,
    at: &[ComplexMatrix],
    q: &ComplexMatrix,
) -> Result<(f64, u64), CrossedError> {
    let window = proj.window();
    let supports: Vec<Vec<(usize, f64)>> = proj
        .vectors()
        .iter()
        .map(|v| {
            v.entries
                .iter()
                .map(|(x, p)| (window.position(x).expect("checked"), *p))
                .collect()
        })
        .collect();
    let mut owners: Vec<Vec<usize>> = vec![Vec::new(); window.len()];
    for (c, s) in supports.iter().enumerate() {
        for (i, _) in s {
            owners[*i].push(c);
        }
    }
    let mut pairs = std::collections::BTreeSet::new();
    for o in &owners {
        for (n, &y) in o.iter().enumerate() {
            for &z in &o[n + 1..] {
                pairs.insert((y, z));
            }
        }
    }
    let d = q.nrows();
    let mut worst: f64 = 0.0;
    for &(y, z) in &pairs {
        let cy = block_matrix(&supports[y], at, q);
        let cz = block_matrix(&supports[z], at, q);
        let mut prod = ComplexMatrix::zeros(cy.ncols(), cz.ncols());
        for (jy, (iy, _)) in supports[y].iter().enumerate() {
            if let Some(jz) = supports[z].iter().position(|(iz, _)| iz == iy) {
                let ry = cy.rows(jy * d, d);
                let rz = cz.rows(jz * d, d);
                prod += ry.adjoint() * rz;
            }
        }
        worst = worst.max(operator_norm(&prod, tolerance::NORM_TOL)?);
    }
    Ok((worst, pairs.len() as u64))
}

/// `[sigma(a), Q (x) P]` on the full support window, built from `P` as a
/// whole rather than coset by coset.
fn full_norm(
    proj: &QdProjection,
    at: &[ComplexMatrix],
    q: &ComplexMatrix,
) -> Result<(f64, NormMethod), CrossedError> {
    let d = q.nrows();
    let w = proj.window().len();
    if d * w <= tolerance::DENSE_THRESHOLD {
        let p = proj.dense();
        let mut m = ComplexMatrix::zeros(d * w, d * w);
        for x in 0..w {
            for z in 0..w {
                let pxz = p[(x, z)];
                if pxz != 0.0 {
                    let blk = (&at[x] * q - q * &at[z]) * Complex64::new(pxz, 0.0);
                    m.view_mut((x * d, z * d), (d, d)).copy_from(&blk);
                }
            }
        }
        let opts = NormOptions {
            dense_threshold: usize::MAX,
            ..NormOptions::default()
        };
        return Ok((operator_norm_with(&m, &opts)?.value, NormMethod::Dense));
    }
    let op = FullCommutator {
        d,
        at,
        at_adj: at.iter().map(adjoint).collect(),
        q,
        vectors: proj.sparse_vectors(proj.window()),
    };
    let est = power_norm(&op, &NormOptions::default())?;
    Ok((est.value, NormMethod::PowerIteration))
}

struct FullCommutator<'a> {
    d: usize,
    at: &'a [ComplexMatrix],
    at_adj: Vec<ComplexMatrix>,
    q: &'a ComplexMatrix,
    vectors: Vec<crate::linalg::SparseVector>,
}

impl FullCommutator<'_> {
    fn qp(&self, v: &[Complex64], out: &mut [Complex64]) {
        let d = self.d;
        out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for xi in &self.vectors {
            let mut c = nalgebra::DVector::zeros(d);
            for (i, p) in xi.entries() {
                for r in 0..d {
                    c[r] += p.conj() * v[i * d + r];
                }
            }
            let qc = self.q * c;
            for (i, p) in xi.entries() {
                for r in 0..d {
                    out[i * d + r] += p * qc[r];
                }
            }
        }
    }

    fn diag(blocks: &[ComplexMatrix], d: usize, v: &[Complex64], out: &mut [Complex64]) {
        for (i, b) in blocks.iter().enumerate() {
            let x = nalgebra::DVector::from_column_slice(&v[i * d..(i + 1) * d]);
            out[i * d..(i + 1) * d].copy_from_slice((b * x).as_slice());
        }
    }

    fn commutator(&self, blocks: &[ComplexMatrix], v: &[Complex64], y: &mut [Complex64], sign: f64) {
        let n = v.len();
        let mut t = vec![Complex64::new(0.0, 0.0); n];
        let mut u = vec![Complex64::new(0.0, 0.0); n];
        self.qp(v, &mut t);
        Self::diag(blocks, self.d, &t, &mut u);
        Self::diag(blocks, self.d, v, &mut t);
        self.qp(&t, y);
        for (yi, ui) in y.iter_mut().zip(&u) {
            *yi = (ui - *yi) * sign;
        }
    }
}

impl LinearOperator for FullCommutator<'_> {
    fn dim(&self) -> usize {
        self.d * self.at.len()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.commutator(self.at, x, y, 1.0);
    }

    fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.commutator(&self.at_adj, x, y, -1.0);
    }
}
