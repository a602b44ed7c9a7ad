use serde::{Deserialize, Serialize};

use super::{ProjectionError, QdProjection, Window};
use crate::group::{Group, GroupElement};
use crate::linalg::{operator_norm_with, power_norm, LowRankOperator, NormMethod, NormOptions};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorNorm {
    pub value: f64,
    pub window_size: usize,
    pub route: NormMethod,
}

/// `W ∪ sW ∪ s^-1 W` for the support window `W` of `P`; `[lambda(s), P]`
/// vanishes off this set.
pub fn commutator_window(proj: &QdProjection, s: &GroupElement) -> Window {
    enlarge_window(proj.group(), proj.window(), s)
}

/// `V ∪ tV ∪ t^-1 V`.
pub fn enlarge_window(group: &Group, window: &Window, t: &GroupElement) -> Window {
    let ti = group.inv(t);
    let mut pts = window.points().to_vec();
    for x in window.points() {
        pts.push(group.mul(t, x));
        pts.push(group.mul(&ti, x));
    }
    Window::new(pts)
}

/// `2 sqrt(ratio)`.
pub fn lambda_envelope(ratio: f64) -> f64 {
    2.0 * ratio.sqrt()
}

fn commutator_factors(proj: &QdProjection, s: &GroupElement, window: &Window) -> LowRankOperator {
    let g = proj.group();
    let si = g.inv(s);
    let minus = num_complex::Complex64::new(-1.0, 0.0);
    let mut op = LowRankOperator::new(window.len());
    for v in proj.vectors() {
        let xi = v.on_window(window);
        op.push(v.translated_on(g, s, window), xi.clone())
            .expect("window-indexed");
        op.push(xi, v.translated_on(g, &si, window).scale(minus))
            .expect("window-indexed");
    }
    op
}

/// `lambda(s)` carries `l^2(yL)` onto `l^2(syL)` and `P` preserves each coset
/// space, so `[lambda(s), P]` splits into the rank-two pieces
/// `lambda(s) P_{yL} - P_{syL} lambda(s)` from `l^2(yL)` to `l^2(syL)`, which
/// have orthogonal domains and orthogonal ranges. The norm is their maximum.
fn blockwise_norm(proj: &QdProjection, s: &GroupElement, window: &Window) -> f64 {
    let g = proj.group();
    let si = g.inv(s);
    let minus = num_complex::Complex64::new(-1.0, 0.0);
    proj.vectors()
        .iter()
        .map(|v| {
            let w = proj.vector_for(&g.mul(s, &v.label));
            let mut op = LowRankOperator::new(window.len());
            op.push(v.translated_on(g, s, window), v.on_window(window))
                .expect("window-indexed");
            op.push(w.on_window(window), w.translated_on(g, &si, window).scale(minus))
                .expect("window-indexed");
            op.gram_norm()
        })
        .fold(0.0, f64::max)
}

/// `||[lambda(s), P]||` on its exact support window, choosing the dense
/// route for small windows and the blockwise route otherwise.
pub fn lambda_commutator_norm(
    proj: &QdProjection,
    s: &GroupElement,
) -> Result<CommutatorNorm, ProjectionError> {
    let window = commutator_window(proj, s);
    lambda_commutator_norm_on(proj, s, &window, None)
}

/// Norm of the compression of `[lambda(s), P]` to `window`.
pub fn lambda_commutator_norm_on(
    proj: &QdProjection,
    s: &GroupElement,
    window: &Window,
    route: Option<NormMethod>,
) -> Result<CommutatorNorm, ProjectionError> {
    if !proj.group().contains(s) {
        return Err(ProjectionError::Window(format!(
            "{s} is not an element of {}",
            proj.group()
        )));
    }
    let route = route.unwrap_or(if window.len() <= tolerance::DENSE_THRESHOLD {
        NormMethod::Dense
    } else {
        NormMethod::Blockwise
    });
    if route == NormMethod::Blockwise {
        return Ok(CommutatorNorm {
            value: blockwise_norm(proj, s, window),
            window_size: window.len(),
            route,
        });
    }
    let op = commutator_factors(proj, s, window);
    let value = match route {
        NormMethod::Dense => {
            let opts = NormOptions {
                dense_threshold: usize::MAX,
                ..NormOptions::default()
            };
            operator_norm_with(&op.materialize(), &opts)?.value
        }
        NormMethod::Gram => op.gram_norm(),
        NormMethod::PowerIteration => power_norm(&op, &NormOptions::default())?.value,
        NormMethod::Blockwise => unreachable!(),
    };
    Ok(CommutatorNorm {
        value,
        window_size: window.len(),
        route,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folner::{boundary_ratio, complete_tile, folner_box, FolnerSet, Tiling};
    use crate::group::{FiniteIndexSubgroup, SubgroupSpec};
    use crate::projection::{build_phi, build_projection};

    fn el(c: &[i64]) -> GroupElement {
        GroupElement::new(c)
    }

    fn box_projection(g: &Group, n: usize, moduli: Vec<i64>) -> (QdProjection, FolnerSet) {
        let f = folner_box(g, n).unwrap();
        let l = FiniteIndexSubgroup::new(g, SubgroupSpec::Moduli(moduli), 100_000).unwrap();
        let t = complete_tile(&f, &l).unwrap();
        let p = build_projection(&build_phi(&f, &t).unwrap()).unwrap();
        (p, f)
    }

    // Dense commutator assembled entry by entry from the definition,
    // independent of the rank-one factorisation.
    fn naive_norm(p: &QdProjection, s: &GroupElement) -> f64 {
        let g = p.group();
        let v = commutator_window(p, s);
        let pm = p.dense_on(&v);
        let n = v.len();
        let mut lam = nalgebra::DMatrix::<f64>::zeros(n, n);
        for (j, x) in v.points().iter().enumerate() {
            if let Some(i) = v.position(&g.mul(s, x)) {
                lam[(i, j)] = 1.0;
            }
        }
        let c = &lam * &pm - &pm * &lam;
        c.singular_values().max()
    }

    #[test]
    fn finite_group_commutes() {
        let g = Group::cyclic(&[6]);
        let f = folner_box(&g, 1).unwrap();
        let l = FiniteIndexSubgroup::new(&g, SubgroupSpec::Elements(vec![el(&[0])]), 10).unwrap();
        let t = complete_tile(&f, &l).unwrap();
        let p = build_projection(&build_phi(&f, &t).unwrap()).unwrap();
        for s in g.generators() {
            assert!(lambda_commutator_norm(&p, &s).unwrap().value < 1e-12);
        }
    }

    #[test]
    fn window_is_closed_under_translation_by_s() {
        let (p, _) = box_projection(&Group::integers(), 4, vec![4]);
        let w = commutator_window(&p, &el(&[1]));
        assert_eq!(w.points().first(), Some(&el(&[-4])));
        assert_eq!(w.points().last(), Some(&el(&[4])));
    }

    #[test]
    fn integer_example_meets_envelope() {
        let z = Group::integers();
        let f = folner_box(&z, 16).unwrap();
        let l = FiniteIndexSubgroup::new(&z, SubgroupSpec::Moduli(vec![31]), 100).unwrap();
        let t = Tiling::from_parts(&l, (0..31).map(|i| el(&[i])).collect(), Some(&f)).unwrap();
        let p = build_projection(&build_phi(&f, &t).unwrap()).unwrap();
        let s = el(&[1]);
        let ratio = boundary_ratio(&f, &s);
        assert_eq!(ratio.to_string(), "2/16");
        let norm = lambda_commutator_norm(&p, &s).unwrap().value;
        assert!(norm <= lambda_envelope(ratio.to_f64()) + 1e-9);
        assert!((norm - naive_norm(&p, &s)).abs() < 1e-10);
    }

    #[test]
    fn routes_agree() {
        let (p, _) = box_projection(&Group::integers(), 8, vec![8]);
        let s = el(&[1]);
        let w = commutator_window(&p, &s);
        let d = lambda_commutator_norm_on(&p, &s, &w, Some(NormMethod::Dense)).unwrap();
        let g = lambda_commutator_norm_on(&p, &s, &w, Some(NormMethod::Gram)).unwrap();
        let pi = lambda_commutator_norm_on(&p, &s, &w, Some(NormMethod::PowerIteration)).unwrap();
        let b = lambda_commutator_norm_on(&p, &s, &w, Some(NormMethod::Blockwise)).unwrap();
        assert!((d.value - g.value).abs() < 1e-9);
        assert!((d.value - b.value).abs() < 1e-12);
        assert!((d.value - pi.value).abs() < 1e-9);
        assert!((d.value - naive_norm(&p, &s)).abs() < 1e-10);
    }

    #[test]
    fn blockwise_on_truncated_windows() {
        let (p, _) = box_projection(&Group::lattice(2), 3, vec![4, 4]);
        for s in p.group().generators() {
            let w = commutator_window(&p, &s);
            let cut = Window::new(w.points().iter().step_by(3).cloned().collect());
            let d = lambda_commutator_norm_on(&p, &s, &cut, Some(NormMethod::Dense)).unwrap();
            let b = lambda_commutator_norm_on(&p, &s, &cut, Some(NormMethod::Blockwise)).unwrap();
            assert!((d.value - b.value).abs() < 1e-12);
            assert!(d.value > 0.0);
        }
    }

    #[test]
    fn window_is_exact() {
        let (p, _) = box_projection(&Group::lattice(2), 3, vec![3, 3]);
        for s in p.group().generators() {
            let w = commutator_window(&p, &s);
            let big = enlarge_window(p.group(), &w, &el(&[1, 1]));
            let a = lambda_commutator_norm_on(&p, &s, &w, None).unwrap().value;
            let b = lambda_commutator_norm_on(&p, &s, &big, None).unwrap().value;
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn integer_decay() {
        let z = Group::integers();
        let s = el(&[1]);
        let mut prev = f64::INFINITY;
        for n in [4usize, 8, 16, 32, 64] {
            let (p, f) = box_projection(&z, n, vec![n as i64]);
            let norm = lambda_commutator_norm(&p, &s).unwrap().value;
            let env = lambda_envelope(boundary_ratio(&f, &s).to_f64());
            assert!(norm <= env + 1e-9, "n={n}: {norm} > {env}");
            assert!(norm < prev);
            prev = norm;
        }
    }

    #[test]
    fn heisenberg_small() {
        let h = Group::Heisenberg;
        let f = folner_box(&h, 2).unwrap();
        let l = FiniteIndexSubgroup::new(&h, SubgroupSpec::Level(4), 1000).unwrap();
        let t = complete_tile(&f, &l).unwrap();
        let p = build_projection(&build_phi(&f, &t).unwrap()).unwrap();
        for s in h.generators() {
            let c = lambda_commutator_norm(&p, &s).unwrap();
            let w = commutator_window(&p, &s);
            let g = lambda_commutator_norm_on(&p, &s, &w, Some(NormMethod::Gram)).unwrap();
            let b = lambda_commutator_norm_on(&p, &s, &w, Some(NormMethod::Blockwise)).unwrap();
            assert!((b.value - g.value).abs() < 1e-9);
            let env = lambda_envelope(boundary_ratio(&f, &s).to_f64());
            assert!(c.value <= env + 1e-9);
            assert!((c.value - g.value).abs() < 1e-9);
        }
    }
}
