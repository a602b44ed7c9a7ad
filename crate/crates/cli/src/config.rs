//! Run configuration: group, levels, optional action section.

use std::path::Path;

use num_complex::Complex64;
use qd_core::crossed::{
    bunce_deddens_instance, golden_mean, rotation_instance, silver_mean, ActionInstance,
    FiniteDimAlgebra, Level,
};
use qd_core::folner::{complete_tile, folner_box, separating_subgroup, FolnerSet, Tiling};
use qd_core::group::{subgroup_family, FiniteIndexSubgroup, Group, GroupElement, SubgroupSpec};
use qd_core::linalg::ComplexMatrix;
use qd_core::tolerance::DEFAULT_INDEX_CAP;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::presets::Preset;
use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: Group,
    pub levels: Vec<LevelConfig>,
    /// Defaults to the symmetric generating set of the group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<GroupElement>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionConfig>,
    #[serde(default = "default_cap")]
    pub index_cap: u64,
}

fn default_cap() -> u64 {
    DEFAULT_INDEX_CAP
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelConfig {
    pub n: usize,
    /// Explicit Følner set; `box(n)` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub folner: Option<Vec<GroupElement>>,
    /// Explicit subgroup; otherwise the first separating member of the
    /// built-in family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<SubgroupSpec>,
    /// Explicit tile; otherwise `F` completed by shortest coset representatives.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tile: Option<Vec<GroupElement>>,
    /// Per-level `Q`, overriding the action's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<MatrixSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ActionConfig {
    Trivial {
        blocks: Vec<usize>,
        test_elements: Vec<MatrixSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<MatrixSpec>,
    },
    /// `M_d (+) ... (+) M_d` over `G / L_m`; with `block_size = 1` and no test
    /// elements this is the Bunce–Deddens level `C(G / L_m)`.
    Translation {
        subgroup: SubgroupSpec,
        #[serde(default = "one")]
        block_size: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        test_elements: Option<Vec<MatrixSpec>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<MatrixSpec>,
    },
    Inner {
        blocks: Vec<usize>,
        implementers: Vec<MatrixSpec>,
        test_elements: Vec<MatrixSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<MatrixSpec>,
    },
    /// `Z` on `M_2` by `Ad diag(1, e^{2 pi i theta})`.
    Rotation {
        theta: Theta,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<MatrixSpec>,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Theta {
    Value(f64),
    Named(NamedTheta),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedTheta {
    Golden,
    Silver,
}

impl Theta {
    pub fn value(self) -> f64 {
        match self {
            Theta::Value(v) => v,
            Theta::Named(NamedTheta::Golden) => golden_mean(),
            Theta::Named(NamedTheta::Silver) => silver_mean(),
        }
    }
}

/// Matrix as a list of rows; entries are reals or `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixSpec(pub Vec<Vec<Entry>>);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl MatrixSpec {
    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        let rows = self.0.len();
        let cols = self.0.first().map_or(0, Vec::len);
        if rows == 0 || self.0.iter().any(|r| r.len() != cols) {
            return Err(CliError::Config("matrix rows must be non-empty and of equal length".into()));
        }
        Ok(ComplexMatrix::from_fn(rows, cols, |i, j| match self.0[i][j] {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }))
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self(
            (0..m.nrows())
                .map(|i| {
                    (0..m.ncols())
                        .map(|j| {
                            let z = m[(i, j)];
                            if z.im == 0.0 {
                                Entry::Real(z.re)
                            } else {
                                Entry::Complex([z.re, z.im])
                            }
                        })
                        .collect()
                })
                .collect(),
        )
    }
}

impl RunConfig {
    /// Reads a config file, a preset, or both. With both, top-level keys of
    /// the file replace those of the preset.
    pub fn load(path: Option<&Path>, preset: Option<Preset>) -> Result<Self, CliError> {
        let mut value = match preset {
            Some(p) => serde_json::to_value(p.config()).expect("preset serializes"),
            None => Value::Object(Default::default()),
        };
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let file: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let Value::Object(over) = file else {
                return Err(CliError::Config("config must be a JSON object".into()));
            };
            let Value::Object(base) = &mut value else { unreachable!() };
            base.extend(over);
        } else if preset.is_none() {
            return Err(CliError::Config("either --config or --preset is required".into()));
        }
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self, CliError> {
        let cfg: Self =
            serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.group.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.levels.is_empty() {
            return Err(CliError::Config("at least one level is required".into()));
        }
        Ok(cfg)
    }

    pub fn generators(&self) -> Result<Vec<GroupElement>, CliError> {
        match &self.generators {
            None => Ok(self.group.generators()),
            Some(gens) => {
                for s in gens {
                    if !self.group.contains(s) {
                        return Err(CliError::Config(format!("{s} is not an element of {}", self.group)));
                    }
                }
                Ok(gens.clone())
            }
        }
    }

    /// Følner set, subgroup and tile for one level.
    pub fn build_level(&self, level: &LevelConfig) -> Result<Level, CliError> {
        let g = &self.group;
        let cfg = |e: &dyn std::fmt::Display| CliError::Config(format!("level n={}: {e}", level.n));
        let folner = match &level.folner {
            Some(els) => FolnerSet::new(g, level.n, els.clone()),
            None => folner_box(g, level.n),
        }
        .map_err(|e| cfg(&e))?;
        let subgroup = match &level.subgroup {
            Some(spec) => {
                FiniteIndexSubgroup::new(g, spec.clone(), self.index_cap).map_err(|e| cfg(&e))?
            }
            None => {
                let family = subgroup_family(g, self.index_cap).map_err(|e| cfg(&e))?;
                separating_subgroup(&folner, &family, self.index_cap).map_err(|e| cfg(&e))?
            }
        };
        let tiling = match &level.tile {
            Some(tile) => Tiling::from_parts(&subgroup, tile.clone(), Some(&folner)),
            None => complete_tile(&folner, &subgroup),
        }
        .map_err(|e| cfg(&e))?;
        Ok(Level { folner, tiling })
    }

    /// The action instance and its default `Q`.
    pub fn build_action(&self) -> Result<(ActionInstance, ComplexMatrix), CliError> {
        let Some(action) = &self.action else {
            return Err(CliError::Config("qd-crossed needs an action section".into()));
        };
        let cfg = |e: &dyn std::fmt::Display| CliError::Config(format!("action: {e}"));
        let mats = |list: &[MatrixSpec]| -> Result<Vec<ComplexMatrix>, CliError> {
            list.iter().map(MatrixSpec::to_matrix).collect()
        };
        let g = &self.group;
        let (inst, q) = match action {
            ActionConfig::Trivial {
                blocks,
                test_elements,
                q,
            } => {
                let alg = FiniteDimAlgebra::new(blocks.clone()).map_err(|e| cfg(&e))?;
                let inst = ActionInstance::trivial(g, alg, mats(test_elements)?).map_err(|e| cfg(&e))?;
                (inst, q)
            }
            ActionConfig::Translation {
                subgroup,
                block_size,
                test_elements,
                q,
            } => {
                let lm = FiniteIndexSubgroup::new(g, subgroup.clone(), self.index_cap)
                    .map_err(|e| cfg(&e))?;
                let inst = match test_elements {
                    None if *block_size == 1 => bunce_deddens_instance(&lm),
                    None => {
                        return Err(CliError::Config(
                            "translation actions with block_size > 1 need test_elements".into(),
                        ))
                    }
                    Some(t) => ActionInstance::translation(&lm, *block_size, mats(t)?),
                }
                .map_err(|e| cfg(&e))?;
                (inst, q)
            }
            ActionConfig::Inner {
                blocks,
                implementers,
                test_elements,
                q,
            } => {
                let alg = FiniteDimAlgebra::new(blocks.clone()).map_err(|e| cfg(&e))?;
                let inst = ActionInstance::inner(g, alg, mats(implementers)?, mats(test_elements)?)
                    .map_err(|e| cfg(&e))?;
                (inst, q)
            }
            ActionConfig::Rotation { theta, q } => {
                if g != &Group::integers() {
                    return Err(CliError::Config("rotation actions are defined on Z".into()));
                }
                (rotation_instance(theta.value()).map_err(|e| cfg(&e))?, q)
            }
        };
        let q = match q {
            Some(m) => m.to_matrix()?,
            None => inst.algebra().identity(),
        };
        Ok((inst, q))
    }
}
