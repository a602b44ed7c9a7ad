use std::collections::BTreeMap;

use super::{ActionInstance, CrossedError};
use crate::group::{Group, GroupElement};
use crate::linalg::{adjoint, operator_norm, ComplexMatrix};
use crate::projection::Window;
use crate::tolerance;

/// Finitely supported `f: G -> A`, an element of `C_c(G, A)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CrossedElement {
    terms: BTreeMap<GroupElement, ComplexMatrix>,
}

impl CrossedElement {
    pub fn new() -> Self {
        Self::default()
    }

    /// `a delta_g`.
    pub fn delta(g: GroupElement, a: ComplexMatrix) -> Self {
        let mut f = Self::new();
        f.insert(g, a);
        f
    }

    /// Adds `a` to the coefficient at `g`.
    pub fn insert(&mut self, g: GroupElement, a: ComplexMatrix) {
        match self.terms.get_mut(&g) {
            Some(b) => *b += a,
            None => {
                self.terms.insert(g, a);
            }
        }
    }

    pub fn get(&self, g: &GroupElement) -> Option<&ComplexMatrix> {
        self.terms.get(g)
    }

    pub fn support(&self) -> Vec<GroupElement> {
        self.terms.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, &ComplexMatrix)> {
        self.terms.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, a) in &other.terms {
            out.insert(g.clone(), a.clone());
        }
        out
    }

    /// `(f * g)(t) = sum_s f(s) alpha(s)(g(s^-1 t))`.
    pub fn convolve(&self, other: &Self, action: &ActionInstance) -> Self {
        let grp = action.group();
        let mut out = Self::new();
        for (s, a) in &self.terms {
            for (u, b) in &other.terms {
                out.insert(grp.mul(s, u), a * action.act(s, b));
            }
        }
        out
    }

    /// `f*(s) = alpha(s)(f(s^-1)*)`.
    pub fn adjoint(&self, action: &ActionInstance) -> Self {
        let grp = action.group();
        let mut out = Self::new();
        for (s, a) in &self.terms {
            let si = grp.inv(s);
            out.insert(si.clone(), action.act(&si, &adjoint(a)));
        }
        out
    }
}

/// Compression of an operator on `C^D (x) l^2(G)` to `C^D (x) l^2(window)`.
/// Row and column `(x, r)` sit at `D * position(x) + r`.
#[derive(Debug, Clone)]
pub struct CompressionOperator {
    pub window: Window,
    pub block: usize,
    pub matrix: ComplexMatrix,
}

impl CompressionOperator {
    fn zeros(window: &Window, block: usize) -> Self {
        let n = window.len() * block;
        Self {
            window: window.clone(),
            block,
            matrix: ComplexMatrix::zeros(n, n),
        }
    }

    /// The `D x D` block at window positions `(i, j)`.
    pub fn block_at(&self, i: usize, j: usize) -> ComplexMatrix {
        let d = self.block;
        self.matrix.view((i * d, j * d), (d, d)).into_owned()
    }

    fn add_block(&mut self, i: usize, j: usize, m: &ComplexMatrix) {
        let d = self.block;
        let mut v = self.matrix.view_mut((i * d, j * d), (d, d));
        v += m;
    }
}

/// Block-diagonal `sigma(a)` with block `rho(alpha(x^-1) a)` at `x`.
pub fn sigma_compression(
    action: &ActionInstance,
    a: &ComplexMatrix,
    window: &Window,
) -> CompressionOperator {
    let g = action.group();
    let mut op = CompressionOperator::zeros(window, action.algebra().dim());
    for (i, x) in window.points().iter().enumerate() {
        op.add_block(i, i, &action.act(&g.inv(x), a));
    }
    op
}

/// `I (x) lambda(s)`: identity block from column `x` to row `sx` when both
/// lie in the window.
pub fn lambda_tensor_compression(
    group: &Group,
    dim: usize,
    s: &GroupElement,
    window: &Window,
) -> CompressionOperator {
    let id = ComplexMatrix::identity(dim, dim);
    let mut op = CompressionOperator::zeros(window, dim);
    for (j, x) in window.points().iter().enumerate() {
        if let Some(i) = window.position(&group.mul(s, x)) {
            op.add_block(i, j, &id);
        }
    }
    op
}

/// `sum_s sigma(f(s)) (I (x) lambda(s))` on the window.
pub fn crossed_compression(
    action: &ActionInstance,
    f: &CrossedElement,
    window: &Window,
) -> Result<CompressionOperator, CrossedError> {
    let g = action.group();
    let mut op = CompressionOperator::zeros(window, action.algebra().dim());
    for (s, a) in f.iter() {
        action.algebra().check(a)?;
        for (j, x) in window.points().iter().enumerate() {
            let z = g.mul(s, x);
            if let Some(i) = window.position(&z) {
                op.add_block(i, j, &action.act(&g.inv(&z), a));
            }
        }
    }
    Ok(op)
}

/// Window positions `z` with `s^-1 z` in the window for every `s` in
/// `support`: the rows on which compressing after `lambda(s)` loses nothing.
pub fn interior_points(group: &Group, support: &[GroupElement], window: &Window) -> Vec<usize> {
    let inv: Vec<GroupElement> = support.iter().map(|s| group.inv(s)).collect();
    window
        .points()
        .iter()
        .enumerate()
        .filter(|(_, z)| inv.iter().all(|si| window.contains(&group.mul(si, z))))
        .map(|(i, _)| i)
        .collect()
}

/// Largest blockwise deviation of `U sigma(a) U*` from `sigma(alpha(s) a)`,
/// with `U` the compression of `I (x) lambda(s)`, over points `x` with
/// `s^-1 x` in the window.
pub fn covariance_residual(
    action: &ActionInstance,
    a: &ComplexMatrix,
    s: &GroupElement,
    window: &Window,
) -> Result<f64, CrossedError> {
    let g = action.group();
    let d = action.algebra().dim();
    let u = lambda_tensor_compression(g, d, s, window);
    let sig = sigma_compression(action, a, window);
    let lhs = CompressionOperator {
        window: window.clone(),
        block: d,
        matrix: &u.matrix * &sig.matrix * adjoint(&u.matrix),
    };
    let rhs = sigma_compression(action, &action.act(s, a), window);
    let si = g.inv(s);
    let mut worst: f64 = 0.0;
    for (i, x) in window.points().iter().enumerate() {
        if window.contains(&g.mul(&si, x)) {
            let diff = lhs.block_at(i, i) - rhs.block_at(i, i);
            worst = worst.max(operator_norm(&diff, tolerance::NORM_TOL)?);
        }
    }
    Ok(worst)
}
