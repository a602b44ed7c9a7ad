//! Built-in configurations selectable with `--preset`.

use qd_core::crossed::{convergent_denominators, golden_mean, silver_mean};
use qd_core::group::{Group, SubgroupSpec};
use qd_core::tolerance::DEFAULT_INDEX_CAP;

use crate::config::{ActionConfig, LevelConfig, NamedTheta, RunConfig, Theta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// `C(Z/2)` translated by `Z`, levels `N Z` with `N = 2, 4, ..., 32`.
    Bd,
    /// Golden-mean rotation on `M_2`, levels at the convergent denominators up to 21.
    Rotation,
    /// Silver-mean rotation on `M_2`, levels at the convergent denominators up to 29.
    Pv,
}

fn cyclic_levels(ns: impl IntoIterator<Item = u64>) -> Vec<LevelConfig> {
    ns.into_iter()
        .map(|n| LevelConfig {
            n: n as usize,
            folner: None,
            subgroup: Some(SubgroupSpec::Moduli(vec![n as i64])),
            tile: None,
            q: None,
        })
        .collect()
}

impl Preset {
    pub fn config(self) -> RunConfig {
        let (levels, action) = match self {
            Preset::Bd => (
                cyclic_levels([2, 4, 8, 16, 32]),
                ActionConfig::Translation {
                    subgroup: SubgroupSpec::Moduli(vec![2]),
                    block_size: 1,
                    test_elements: None,
                    q: None,
                },
            ),
            Preset::Rotation => (
                cyclic_levels(convergent_denominators(golden_mean(), 21)),
                ActionConfig::Rotation {
                    theta: Theta::Named(NamedTheta::Golden),
                    q: None,
                },
            ),
            Preset::Pv => (
                cyclic_levels(convergent_denominators(silver_mean(), 29)),
                ActionConfig::Rotation {
                    theta: Theta::Named(NamedTheta::Silver),
                    q: None,
                },
            ),
        };
        RunConfig {
            group: Group::integers(),
            levels,
            generators: None,
            action: Some(action),
            index_cap: DEFAULT_INDEX_CAP,
        }
    }
}
