//! The `tile`, `qd-lambda` and `qd-crossed` subcommands.

use std::path::{Path, PathBuf};

use qd_core::crossed::{theorem7_commutator, Level};
use qd_core::folner::{boundary_ratio, TilingCertificate};
use qd_core::group::{GroupElement, SubgroupSpec};
use qd_core::linalg::{fraction_string, NormMethod};
use qd_core::projection::{
    build_phi, build_projection, commutator_window, enlarge_window, lambda_commutator_norm_on,
    lambda_envelope, ProjectionError,
};
use qd_core::tolerance;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{LevelConfig, RunConfig};
use crate::report::{cell, write_csv, write_json};
use crate::CliError;

/// What a finished run wrote and whether every check held.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn prepare(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
}

fn projection_err(e: ProjectionError) -> CliError {
    match e {
        ProjectionError::CosetSum { .. } => CliError::Math(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn levels(cfg: &RunConfig) -> Result<Vec<Level>, CliError> {
    cfg.levels.par_iter().map(|l| cfg.build_level(l)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub generator: GroupElement,
    pub ratio: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TileLevel {
    pub n: usize,
    pub folner_size: usize,
    pub subgroup: SubgroupSpec,
    pub index: usize,
    pub tile_size: usize,
    pub certificate: TilingCertificate,
    pub ratios: Vec<RatioRow>,
    pub tiling_file: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TileReport {
    pub command: &'static str,
    pub group: String,
    pub passed: bool,
    pub levels: Vec<TileLevel>,
}

pub fn tile_report(cfg: &RunConfig) -> Result<(TileReport, Vec<Level>), CliError> {
    let gens = cfg.generators()?;
    let mut lvls = levels(cfg)?;
    let ball = cfg.group.word_ball(2);
    let mut rows = Vec::new();
    for (i, (lc, lvl)) in cfg.levels.iter().zip(lvls.iter_mut()).enumerate() {
        let window_ok = lvl.tiling.certify_window(&ball).is_ok();
        let cert = *lvl.tiling.certificate();
        rows.push(TileLevel {
            n: lc.n,
            folner_size: lvl.folner.len(),
            subgroup: lvl.tiling.subgroup().spec().clone(),
            index: lvl.tiling.index(),
            tile_size: lvl.tiling.tile().len(),
            passed: window_ok && cert.is_valid(),
            certificate: cert,
            ratios: gens
                .iter()
                .map(|s| RatioRow {
                    generator: s.clone(),
                    ratio: boundary_ratio(&lvl.folner, s).to_string(),
                })
                .collect(),
            tiling_file: format!("tilings/level_{i}_n{}.json", lc.n),
        });
    }
    let report = TileReport {
        command: "tile",
        group: cfg.group.to_string(),
        passed: rows.iter().all(|r| r.passed),
        levels: rows,
    };
    Ok((report, lvls))
}

pub fn run_tile(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    prepare(out)?;
    let (report, lvls) = tile_report(cfg)?;
    let dir = out.join("tilings");
    prepare(&dir)?;
    let mut files = Vec::new();
    for (row, lvl) in report.levels.iter().zip(&lvls) {
        let path = out.join(&row.tiling_file);
        std::fs::write(&path, lvl.tiling.to_json() + "\n")
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        files.push(path);
    }
    let path = out.join("report.json");
    write_json(&path, &report)?;
    files.push(path);
    Ok(Outcome {
        passed: report.passed,
        summary: format!(
            "tile: {} level(s), certificates {}",
            report.levels.len(),
            if report.passed { "valid" } else { "FAILED" }
        ),
        files,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionLaws {
    pub rank: usize,
    pub trace: f64,
    pub gram_deviation: f64,
    pub idempotency_defect: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorRow {
    pub generator: GroupElement,
    pub ratio: String,
    pub max_variation: String,
    pub variation_ok: bool,
    pub norm: f64,
    pub envelope: f64,
    pub envelope_ok: bool,
    pub route: NormMethod,
    pub window: usize,
    pub enlarged_window: usize,
    pub enlarged_delta: f64,
    pub window_exact: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaLevel {
    pub n: usize,
    pub folner_size: usize,
    pub tile_size: usize,
    pub index: usize,
    pub subgroup: SubgroupSpec,
    pub coset_sums_exact: bool,
    pub support: usize,
    pub projection: ProjectionLaws,
    pub generators: Vec<GeneratorRow>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaReport {
    pub command: &'static str,
    pub group: String,
    pub passed: bool,
    pub levels: Vec<LambdaLevel>,
}

fn lambda_level(cfg: &RunConfig, lc: &LevelConfig, lvl: &Level, gens: &[GroupElement]) -> Result<LambdaLevel, CliError> {
    let g = &cfg.group;
    let phi = build_phi(&lvl.folner, &lvl.tiling).map_err(projection_err)?;
    let identities = phi.check_coset_identities(gens);
    let proj = build_projection(&phi).map_err(projection_err)?;
    let rank = proj.rank();
    let trace = proj.trace();
    let gram_deviation = proj.gram_deviation();
    let idempotency_defect = proj.idempotency_defect().map_err(projection_err)?;
    let laws = ProjectionLaws {
        rank,
        trace,
        gram_deviation,
        idempotency_defect,
        passed: idempotency_defect <= tolerance::STRUCTURE
            && gram_deviation <= tolerance::IDENTITY
            && (trace - lvl.tiling.index() as f64).abs() <= tolerance::INEQUALITY,
    };
    let extra = g.basis_generators().into_iter().next().unwrap_or_else(|| g.identity());
    let mut rows = Vec::new();
    for (s, rec) in gens.iter().zip(&identities.per_generator) {
        let w = commutator_window(&proj, s);
        let c = lambda_commutator_norm_on(&proj, s, &w, None).map_err(projection_err)?;
        let big = enlarge_window(g, &w, &extra);
        let c2 = lambda_commutator_norm_on(&proj, s, &big, Some(c.route)).map_err(projection_err)?;
        let envelope = lambda_envelope(rec.ratio.to_f64());
        let delta = (c.value - c2.value).abs();
        rows.push(GeneratorRow {
            generator: s.clone(),
            ratio: rec.ratio.to_string(),
            max_variation: fraction_string(&rec.max_variation),
            variation_ok: rec.holds,
            norm: c.value,
            envelope,
            envelope_ok: c.value <= envelope + tolerance::INEQUALITY,
            route: c.route,
            window: c.window_size,
            enlarged_window: big.len(),
            enlarged_delta: delta,
            window_exact: delta < tolerance::IDENTITY,
        });
    }
    let passed = identities.passed()
        && laws.passed
        && rows.iter().all(|r| r.envelope_ok && r.window_exact);
    Ok(LambdaLevel {
        n: lc.n,
        folner_size: lvl.folner.len(),
        tile_size: lvl.tiling.tile().len(),
        index: lvl.tiling.index(),
        subgroup: lvl.tiling.subgroup().spec().clone(),
        coset_sums_exact: identities.sums_ok,
        support: proj.window().len(),
        projection: laws,
        generators: rows,
        passed,
    })
}

pub fn lambda_report(cfg: &RunConfig) -> Result<LambdaReport, CliError> {
    let gens = cfg.generators()?;
    let lvls = levels(cfg)?;
    let rows: Vec<LambdaLevel> = cfg
        .levels
        .par_iter()
        .zip(lvls.par_iter())
        .map(|(lc, lvl)| lambda_level(cfg, lc, lvl, &gens))
        .collect::<Result<_, _>>()?;
    Ok(LambdaReport {
        command: "qd-lambda",
        group: cfg.group.to_string(),
        passed: rows.iter().all(|r| r.passed),
        levels: rows,
    })
}

pub const DECAY_HEADER: [&str; 8] = ["n", "|F|", "|K|", "index", "generator", "ratio", "norm", "envelope"];

pub fn run_qd_lambda(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    prepare(out)?;
    let report = lambda_report(cfg)?;
    let rows: Vec<Vec<String>> = report
        .levels
        .iter()
        .flat_map(|l| {
            l.generators.iter().map(move |r| {
                vec![
                    l.n.to_string(),
                    l.folner_size.to_string(),
                    l.tile_size.to_string(),
                    l.index.to_string(),
                    r.generator.to_string(),
                    r.ratio.clone(),
                    cell(r.norm),
                    cell(r.envelope),
                ]
            })
        })
        .collect();
    let json = out.join("report.json");
    let csv = out.join("decay.csv");
    write_json(&json, &report)?;
    write_csv(&csv, &DECAY_HEADER, &rows)?;
    Ok(Outcome {
        passed: report.passed,
        summary: format!(
            "qd-lambda: {} level(s), {}",
            report.levels.len(),
            if report.passed { "all checks passed" } else { "checks FAILED" }
        ),
        files: vec![json, csv],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossedRow {
    pub element: usize,
    pub defect: f64,
    pub norm: f64,
    pub route: NormMethod,
    pub max_block: f64,
    pub norm_gap: f64,
    pub orthogonality_residual: f64,
    pub orthogonality_pairs: u64,
    pub overlapping_pairs: u64,
    pub q_commutator_max: f64,
    pub bound: f64,
    pub per_coset_ok: bool,
    pub bound_ok: bool,
    /// `4/n`, for comparison only.
    pub four_over_n: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossedLevel {
    pub n: usize,
    pub folner_size: usize,
    pub tile_size: usize,
    pub index: usize,
    pub subgroup: SubgroupSpec,
    pub support: usize,
    pub defect_set_size: usize,
    pub elements: Vec<CrossedRow>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossedReport {
    pub command: &'static str,
    pub group: String,
    pub action: &'static str,
    pub algebra_blocks: Vec<usize>,
    pub test_elements: usize,
    pub note: &'static str,
    pub passed: bool,
    pub levels: Vec<CrossedLevel>,
}

const TEST_FAMILY_NOTE: &str =
    "estimates are certified for the configured finite family of self-adjoint test elements only";

pub fn crossed_report(cfg: &RunConfig) -> Result<CrossedReport, CliError> {
    let (action, q_default) = cfg.build_action()?;
    let lvls = levels(cfg)?;
    let rows: Vec<CrossedLevel> = cfg
        .levels
        .par_iter()
        .zip(lvls.par_iter())
        .map(|(lc, lvl)| {
            let q = match &lc.q {
                Some(m) => m.to_matrix()?,
                None => q_default.clone(),
            };
            let phi = build_phi(&lvl.folner, &lvl.tiling).map_err(projection_err)?;
            let proj = build_projection(&phi).map_err(projection_err)?;
            let mut elements = Vec::new();
            let mut set_size = 0;
            for (i, a) in action.test_elements().iter().enumerate() {
                let r = theorem7_commutator(&action, a, &q, &proj, &lvl.tiling, &lvl.folner)
                    .map_err(|e| CliError::Config(format!("level n={}: {e}", lc.n)))?;
                set_size = r.defect_set_size;
                elements.push(CrossedRow {
                    element: i,
                    defect: r.defect,
                    norm: r.full_norm,
                    route: r.full_route,
                    max_block: r.max_block,
                    norm_gap: r.norm_gap(),
                    orthogonality_residual: r.orthogonality_residual,
                    orthogonality_pairs: r.orthogonality_pairs,
                    overlapping_pairs: r.overlapping_pairs,
                    q_commutator_max: r.blocks.iter().map(|b| b.q_commutator).fold(0.0, f64::max),
                    bound: r.bound,
                    per_coset_ok: r.per_coset_ok(),
                    bound_ok: r.bound_ok(),
                    four_over_n: 4.0 / lc.n as f64,
                    passed: r.passed(),
                });
            }
            Ok(CrossedLevel {
                n: lc.n,
                folner_size: lvl.folner.len(),
                tile_size: lvl.tiling.tile().len(),
                index: lvl.tiling.index(),
                subgroup: lvl.tiling.subgroup().spec().clone(),
                support: proj.window().len(),
                defect_set_size: set_size,
                passed: elements.iter().all(|e| e.passed),
                elements,
            })
        })
        .collect::<Result<_, CliError>>()?;
    Ok(CrossedReport {
        command: "qd-crossed",
        group: cfg.group.to_string(),
        action: action.kind_name(),
        algebra_blocks: action.algebra().blocks().to_vec(),
        test_elements: action.test_elements().len(),
        note: TEST_FAMILY_NOTE,
        passed: rows.iter().all(|r| r.passed),
        levels: rows,
    })
}

pub const CROSSED_HEADER: [&str; 8] = ["n", "|F|", "|K|", "index", "element", "defect", "norm", "bound"];

pub fn run_qd_crossed(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    prepare(out)?;
    let report = crossed_report(cfg)?;
    let rows: Vec<Vec<String>> = report
        .levels
        .iter()
        .flat_map(|l| {
            l.elements.iter().map(move |r| {
                vec![
                    l.n.to_string(),
                    l.folner_size.to_string(),
                    l.tile_size.to_string(),
                    l.index.to_string(),
                    r.element.to_string(),
                    cell(r.defect),
                    cell(r.norm),
                    cell(r.bound),
                ]
            })
        })
        .collect();
    let json = out.join("report.json");
    let csv = out.join("crossed.csv");
    write_json(&json, &report)?;
    write_csv(&csv, &CROSSED_HEADER, &rows)?;
    Ok(Outcome {
        passed: report.passed,
        summary: format!(
            "qd-crossed: {} level(s) x {} test element(s), {}",
            report.levels.len(),
            report.test_elements,
            if report.passed { "all checks passed" } else { "checks FAILED" }
        ),
        files: vec![json, csv],
    })
}
