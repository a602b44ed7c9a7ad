//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p qd-cli --test acceptance`.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use qd_cli::commands::{crossed_report, lambda_report, CrossedReport, LambdaReport};
use qd_cli::config::RunConfig;
use qd_cli::presets::Preset;
use qd_core::crossed::{
    box_level, bunce_deddens_instance, crossed_compression, interior_points, theorem7_commutator,
    tilted_projection, ActionInstance, CrossedElement, FiniteDimAlgebra, Theorem7Report,
};
use qd_core::group::{FiniteIndexSubgroup, Group, GroupElement, SubgroupSpec};
use qd_core::projection::{build_phi, build_projection, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type CMatrix = DMatrix<Complex64>;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn config(name: &str) -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    RunConfig::load(Some(&path), None).expect("bundled config")
}

fn spectral(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

// ---------------------------------------------------------------------------
// criterion 1

fn coset_identities() -> Outcome {
    let start = Instant::now();
    let mut levels = 0;
    let mut failures = Vec::new();
    for (name, expected) in [("integers.json", 7), ("lattice2.json", 4), ("heisenberg.json", 2)] {
        let cfg = config(name);
        let gens = cfg.generators().unwrap();
        if cfg.levels.len() != expected {
            failures.push(format!("{name}: {} levels", cfg.levels.len()));
        }
        for lc in &cfg.levels {
            let lvl = cfg.build_level(lc).unwrap();
            let phi = build_phi(&lvl.folner, &lvl.tiling).unwrap();
            let r = phi.check_coset_identities(&gens);
            if !r.sums_ok || !r.variations_ok() {
                failures.push(format!("{name} n={}", lc.n));
            }
            levels += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let fast = secs < 60.0;
    outcome(
        failures.is_empty() && fast,
        format!(
            "{levels} levels exact, {:.1} s (< 60 s){}",
            secs,
            if failures.is_empty() { String::new() } else { format!("; failed {failures:?}") }
        ),
    )
}

// ---------------------------------------------------------------------------
// criteria 2-4

fn lambda_reports() -> Vec<(&'static str, LambdaReport)> {
    ["integers.json", "lattice2.json", "heisenberg.json"]
        .into_iter()
        .map(|n| (n, lambda_report(&config(n)).unwrap()))
        .collect()
}

fn envelope(reports: &[(&str, LambdaReport)]) -> Outcome {
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut rows = 0;
    for (_, r) in reports {
        for l in &r.levels {
            for g in &l.generators {
                worst = worst.max(g.norm - g.envelope);
                rows += 1;
            }
        }
    }
    let ints = &reports[0].1;
    let mut closed_form = true;
    for l in &ints.levels {
        for g in &l.generators {
            closed_form &= (g.envelope - 2.0 * (2.0 / l.n as f64).sqrt()).abs() < 1e-12;
        }
    }
    let norm_at = |n: usize| {
        ints.levels.iter().find(|l| l.n == n).unwrap().generators[0].norm
    };
    let (n4, n64) = (norm_at(4), norm_at(64));
    outcome(
        worst <= 1e-9 && closed_form && n64 < 0.5 * n4,
        format!(
            "{rows} rows, max(norm - envelope) = {worst:.3e}; Z envelope 2*sqrt(2/n): {closed_form}; \
             norm n=64 {n64:.4} vs n=4 {n4:.4}"
        ),
    )
}

fn window_exactness(reports: &[(&str, LambdaReport)]) -> Outcome {
    let worst = reports
        .iter()
        .flat_map(|(_, r)| &r.levels)
        .flat_map(|l| &l.generators)
        .map(|g| g.enlarged_delta)
        .fold(0.0, f64::max);
    outcome(worst < 1e-12, format!("max change after enlarging = {worst:.3e}"))
}

fn projection_laws(reports: &[(&str, LambdaReport)]) -> Outcome {
    let (mut idem, mut gram, mut trace) = (0.0f64, 0.0f64, 0.0f64);
    for (_, r) in reports {
        for l in &r.levels {
            idem = idem.max(l.projection.idempotency_defect);
            gram = gram.max(l.projection.gram_deviation);
            trace = trace.max((l.projection.trace - l.tile_size as f64).abs());
        }
    }
    outcome(
        idem <= 1e-10 && gram <= 1e-12 && trace <= 1e-9,
        format!("||P^2-P|| {idem:.1e}, Gram dev {gram:.1e}, |tr P - |K|| {trace:.1e}"),
    )
}

// ---------------------------------------------------------------------------
// crossed instances for criteria 5 and 6

struct CrossedRecord {
    name: String,
    norm: f64,
    bound: f64,
    max_block: f64,
    orthogonality: f64,
}

fn from_report(name: &str, r: &CrossedReport) -> Vec<CrossedRecord> {
    r.levels
        .iter()
        .flat_map(|l| {
            l.elements.iter().map(move |e| CrossedRecord {
                name: format!("{name} n={} a{}", l.n, e.element),
                norm: e.norm,
                bound: e.bound,
                max_block: e.max_block,
                orthogonality: e.orthogonality_residual,
            })
        })
        .collect()
}

fn from_theorem7(name: String, r: &Theorem7Report) -> CrossedRecord {
    CrossedRecord {
        name,
        norm: r.full_norm,
        bound: r.bound,
        max_block: r.max_block,
        orthogonality: r.orthogonality_residual,
    }
}

/// `C(Z/2)` translated by `Z`, `a = diag(1, 0)`, with `Q` tilted so that
/// `||[a, Q]|| = 1/n`.
fn four_over_n() -> Vec<(usize, Theorem7Report)> {
    let z = Group::integers();
    let l2 = FiniteIndexSubgroup::new(&z, SubgroupSpec::Moduli(vec![2]), 10).unwrap();
    let e0 = FiniteDimAlgebra::commutative(2).diagonal(&[1.0, 0.0]).unwrap();
    let act = ActionInstance::translation(&l2, 1, vec![e0.clone()]).unwrap();
    [4usize, 8, 16, 32]
        .into_iter()
        .map(|n| {
            let q = tilted_projection((2.0 / n as f64).asin() / 2.0);
            let lvl = box_level(&z, n, SubgroupSpec::Moduli(vec![n as i64]), 1000).unwrap();
            let p = build_projection(&build_phi(&lvl.folner, &lvl.tiling).unwrap()).unwrap();
            (n, theorem7_commutator(&act, &e0, &q, &p, &lvl.tiling, &lvl.folner).unwrap())
        })
        .collect()
}

struct FiniteCase {
    name: &'static str,
    action: ActionInstance,
    level: qd_core::crossed::Level,
}

fn finite_cases() -> Vec<FiniteCase> {
    let prod = Group::Product {
        factors: vec![Group::cyclic(&[2]), Group::cyclic(&[3])],
    };
    [("Z/12", Group::cyclic(&[12])), ("Z/2xZ/3", prod)]
        .into_iter()
        .map(|(name, g)| {
            let trivial = SubgroupSpec::Elements(vec![g.identity()]);
            let l = FiniteIndexSubgroup::new(&g, trivial.clone(), 100).unwrap();
            FiniteCase {
                name,
                action: bunce_deddens_instance(&l).unwrap(),
                level: box_level(&g, 1, trivial, 100).unwrap(),
            }
        })
        .collect()
}

fn crossed_records(
    presets: &[(&str, CrossedReport)],
    tilted: &[(usize, Theorem7Report)],
    finite: &[FiniteCase],
) -> Vec<CrossedRecord> {
    let mut out: Vec<CrossedRecord> = presets.iter().flat_map(|(n, r)| from_report(n, r)).collect();
    for (n, r) in tilted {
        out.push(from_theorem7(format!("tilted n={n}"), r));
    }
    for case in finite {
        let p = build_projection(&build_phi(&case.level.folner, &case.level.tiling).unwrap()).unwrap();
        for (i, a) in case.action.test_elements().iter().enumerate() {
            let r = theorem7_commutator(
                &case.action,
                a,
                &case.action.algebra().identity(),
                &p,
                &case.level.tiling,
                &case.level.folner,
            )
            .unwrap();
            out.push(from_theorem7(format!("{} a{i}", case.name), &r));
        }
    }
    out
}

fn block_structure(records: &[CrossedRecord]) -> Outcome {
    let orth = records.iter().map(|r| r.orthogonality).fold(0.0, f64::max);
    let (gap, at) = records
        .iter()
        .map(|r| ((r.norm - r.max_block).abs(), r.name.as_str()))
        .fold((0.0, ""), |acc, x| if x.0 > acc.0 { x } else { acc });
    outcome(
        orth <= 1e-10 && gap <= 1e-10,
        format!(
            "{} instances, max orthogonality residual {orth:.1e}, max |full - max block| {gap:.1e}{}",
            records.len(),
            if at.is_empty() { String::new() } else { format!(" ({at})") }
        ),
    )
}

fn proof_inequality(records: &[CrossedRecord], tilted: &[(usize, Theorem7Report)]) -> Outcome {
    let slack = records
        .iter()
        .map(|r| r.norm - r.bound)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut four = true;
    let mut terms = true;
    let mut shown = Vec::new();
    for (n, r) in tilted {
        let inv = 1.0 / *n as f64;
        four &= r.full_norm <= 4.0 * inv + 1e-9;
        terms &= r.defect <= inv + 1e-12 && r.blocks.iter().all(|b| b.q_commutator <= inv + 1e-12);
        shown.push(format!("n={n}: {:.4}<={:.4}", r.full_norm, 4.0 * inv));
    }
    outcome(
        slack <= 1e-9 && four && terms,
        format!(
            "max(norm - bound) = {slack:.3e} over {} instances; 4/n instance {}",
            records.len(),
            shown.join(", ")
        ),
    )
}

// ---------------------------------------------------------------------------
// criteria 7 and 8

fn periodic_nullity(bd: &CrossedReport) -> Outcome {
    let worst = bd
        .levels
        .iter()
        .flat_map(|l| &l.elements)
        .map(|e| e.norm)
        .fold(0.0, f64::max);
    let ns: Vec<usize> = bd.levels.iter().map(|l| l.n).collect();
    outcome(worst <= 1e-10, format!("levels {ns:?}, max norm {worst:.1e}"))
}

fn rotation_decay(rot: &CrossedReport, secs: f64) -> Outcome {
    let ns: Vec<usize> = rot.levels.iter().map(|l| l.n).collect();
    let per_level = |f: fn(&qd_cli::commands::CrossedRow) -> f64| -> Vec<f64> {
        rot.levels
            .iter()
            .map(|l| l.elements.iter().map(f).fold(0.0, f64::max))
            .collect()
    };
    let defects = per_level(|e| e.defect);
    let norms = per_level(|e| e.norm);
    let decreasing = defects.windows(2).all(|w| w[1] < w[0]);
    let bounded = rot
        .levels
        .iter()
        .flat_map(|l| &l.elements)
        .all(|e| e.norm <= e.bound + 1e-9);
    let (first, last) = (norms[0], *norms.last().unwrap());
    outcome(
        ns == [2, 3, 5, 8, 13, 21] && decreasing && bounded && last < first / 3.0 && secs < 120.0,
        format!(
            "q_k {ns:?}, defects strictly decreasing: {decreasing}, norm {first:.4} -> {last:.4}, {secs:.1} s (< 120 s)"
        ),
    )
}

// ---------------------------------------------------------------------------
// criterion 9

/// Index of `g` in `elements`.
fn index_of(elements: &[GroupElement], g: &GroupElement) -> usize {
    elements.iter().position(|e| e == g).unwrap()
}

fn finite_oracle(cases: &[FiniteCase]) -> Outcome {
    let mut worst_p: f64 = 0.0;
    let mut worst_lambda: f64 = 0.0;
    let mut worst_sigma: f64 = 0.0;
    for case in cases {
        let g = case.level.folner.group();
        let elements = g.elements().unwrap();
        let n = elements.len();
        let d = case.action.algebra().dim();
        let p = build_projection(&build_phi(&case.level.folner, &case.level.tiling).unwrap()).unwrap();
        let window = Window::new(elements.clone());
        let pd = p.dense_on(&window);
        worst_p = worst_p.max((pd.clone() - DMatrix::<f64>::identity(n, n)).amax());
        // reorder P onto our own enumeration of G
        let mut pg = CMatrix::zeros(n, n);
        for (i, x) in elements.iter().enumerate() {
            for (j, y) in elements.iter().enumerate() {
                let (a, b) = (window.position(x).unwrap(), window.position(y).unwrap());
                pg[(i, j)] = Complex64::new(pd[(a, b)], 0.0);
            }
        }
        let big_p = pg.kronecker(&CMatrix::identity(d, d));
        for s in &elements {
            let mut lam = CMatrix::zeros(n, n);
            for (j, x) in elements.iter().enumerate() {
                lam[(index_of(&elements, &g.mul(s, x)), j)] = Complex64::new(1.0, 0.0);
            }
            worst_lambda = worst_lambda.max(spectral(&(&lam * &pg - &pg * &lam)));
        }
        for a in case.action.test_elements() {
            // sigma(a) is block diagonal with blocks alpha(x^-1) a
            let mut sigma = CMatrix::zeros(n * d, n * d);
            for (i, x) in elements.iter().enumerate() {
                let block = case.action.act(&g.inv(x), a);
                sigma.view_mut((i * d, i * d), (d, d)).copy_from(&block);
            }
            worst_sigma = worst_sigma.max(spectral(&(&sigma * &big_p - &big_p * &sigma)));
        }
    }
    outcome(
        worst_p <= 1e-12 && worst_lambda <= 1e-12 && worst_sigma <= 1e-12,
        format!("|P - I| {worst_p:.1e}, lambda {worst_lambda:.1e}, sigma {worst_sigma:.1e}"),
    )
}

// ---------------------------------------------------------------------------
// criterion 10

type Coefficients = BTreeMap<i64, Vec<Complex64>>;

/// `(f * g)(t) = sum_{s u = t} f(s) alpha(s)(g(u))` for `Z` translating `C(Z/m)`,
/// where `(alpha(s) b)(j) = b(j - s)`.
fn twisted_convolution(f: &Coefficients, g: &Coefficients, m: i64) -> Coefficients {
    let mut out = Coefficients::new();
    for (s, a) in f {
        for (u, b) in g {
            let e = out.entry(s + u).or_insert_with(|| vec![Complex64::new(0.0, 0.0); m as usize]);
            for j in 0..m {
                e[j as usize] += a[j as usize] * b[(j - s).rem_euclid(m) as usize];
            }
        }
    }
    out
}

fn random_coefficients(rng: &mut ChaCha8Rng, m: usize) -> Coefficients {
    let terms = rng.random_range(1..=4);
    (0..terms)
        .map(|_| {
            let s = rng.random_range(-3..=3);
            let v = (0..m)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            (s, v)
        })
        .collect()
}

fn as_element(f: &Coefficients) -> CrossedElement {
    let mut out = CrossedElement::new();
    for (s, v) in f {
        out.insert(
            GroupElement::new(&[*s]),
            CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(v)),
        );
    }
    out
}

fn convolution_oracle() -> Outcome {
    let z = Group::integers();
    let m = 2;
    let l = FiniteIndexSubgroup::new(&z, SubgroupSpec::Moduli(vec![m]), 10).unwrap();
    let act = bunce_deddens_instance(&l).unwrap();
    let window = Window::new((-12..=12).map(|i| GroupElement::new(&[i])).collect());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let trials = 50;
    let mut worst: f64 = 0.0;
    let mut blocks = 0;
    for _ in 0..trials {
        let f = random_coefficients(&mut rng, m as usize);
        let g = random_coefficients(&mut rng, m as usize);
        let fg = twisted_convolution(&f, &g, m);
        let (fe, ge) = (as_element(&f), as_element(&g));
        let cf = crossed_compression(&act, &fe, &window).unwrap();
        let cg = crossed_compression(&act, &ge, &window).unwrap();
        let cfg = crossed_compression(&act, &as_element(&fg), &window).unwrap();
        let prod = &cf.matrix * &cg.matrix;
        let d = m as usize;
        // rows x where every s x, s in supp f, and every u s x stay inside
        let mut support = fe.support();
        support.extend(as_element(&fg).support());
        for i in interior_points(&z, &support, &window) {
            let diff = prod.rows(i * d, d) - cfg.matrix.rows(i * d, d);
            worst = worst.max(diff.iter().map(|c| c.norm()).fold(0.0, f64::max));
            blocks += 1;
        }
    }
    outcome(
        worst <= 1e-10 && blocks > 0,
        format!("{trials} seeded pairs, {blocks} interior block rows, max deviation {worst:.1e}"),
    )
}

// ---------------------------------------------------------------------------

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "coset sums and variations exact", coset_identities()));

    let lambda = lambda_reports();
    results.push((2, "lambda commutator envelope", envelope(&lambda)));
    results.push((3, "window exactness", window_exactness(&lambda)));
    results.push((4, "projection laws", projection_laws(&lambda)));

    let bd = crossed_report(&Preset::Bd.config()).unwrap();
    let start = Instant::now();
    let rot = crossed_report(&Preset::Rotation.config()).unwrap();
    let rot_secs = start.elapsed().as_secs_f64();
    let pv = crossed_report(&Preset::Pv.config()).unwrap();
    let h3 = crossed_report(&config("heisenberg_bd.json")).unwrap();
    let tilted = four_over_n();
    let finite = finite_cases();
    let presets = [("bd", bd), ("rotation", rot), ("pv", pv), ("heisenberg-bd", h3)];
    let records = crossed_records(&presets, &tilted, &finite);
    results.push((5, "crossed block structure", block_structure(&records)));
    results.push((6, "crossed proof inequality", proof_inequality(&records, &tilted)));
    results.push((7, "periodic action gives zero commutators", periodic_nullity(&presets[0].1)));
    results.push((8, "golden rotation decay", rotation_decay(&presets[1].1, rot_secs)));
    results.push((9, "finite group oracle", finite_oracle(&finite)));
    results.push((10, "twisted convolution oracle", convolution_oracle()));

    let mut failed = 0;
    for (id, name, o) in &results {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} [{id:>2}] {name}: {}", o.detail);
        failed += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
