use serde::{Deserialize, Serialize};

use super::{FolnerError, FolnerSet};
use crate::group::{FiniteIndexSubgroup, Group, GroupElement, QuotientMap, SubgroupSpec};

/// Above this tile size the pairwise `K^-1 K ∩ L` scan is skipped; injectivity
/// of the quotient map on `K` is the same statement and is always checked.
const PAIRWISE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TilingCertificate {
    /// `K ⊇ F` for the Følner set the tile was built from.
    pub contains_folner: bool,
    /// The quotient map is injective on `K`.
    pub injective: bool,
    /// `|K| = [G:L]`.
    pub full_transversal: bool,
    /// `K^-1 K ∩ L = {e}` checked over all pairs.
    pub pairwise_checked: bool,
    /// Number of window points with a verified unique factorization.
    pub window_points: u64,
}

impl TilingCertificate {
    pub fn is_valid(&self) -> bool {
        self.injective && self.full_transversal
    }
}

/// A tiling `G = K L`: `K` is a coset transversal of the normal subgroup `L`.
#[derive(Debug, Clone)]
pub struct Tiling {
    quotient: QuotientMap,
    /// `tile[i]` is the element of `K` in coset `i`.
    tile: Vec<GroupElement>,
    certificate: TilingCertificate,
}

/// Serialized form of a [`Tiling`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingDocument {
    pub group: Group,
    pub subgroup: SubgroupSpec,
    pub index: u64,
    pub tile: Vec<GroupElement>,
    pub certificate: TilingCertificate,
}

/// Unique factorizations `w = k l` over a finite window.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub entries: Vec<(GroupElement, GroupElement, GroupElement)>,
}

impl Factorization {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Tiling {
    /// Certifies an explicit tile against `L`. Fails unless the tile is a full
    /// coset transversal; `folner`, when given, must be contained in it.
    pub fn from_parts(
        subgroup: &FiniteIndexSubgroup,
        tile: Vec<GroupElement>,
        folner: Option<&FolnerSet>,
    ) -> Result<Self, FolnerError> {
        let quotient = QuotientMap::new(subgroup)?;
        let group = subgroup.group();
        if let Some(x) = tile.iter().find(|x| !group.contains(x)) {
            return Err(FolnerError::Certificate(format!("{x} is not in {group}")));
        }
        let mut slots: Vec<Option<GroupElement>> = vec![None; quotient.index()];
        for k in tile {
            let c = quotient.coset(&k);
            if let Some(prev) = &slots[c] {
                return Err(FolnerError::SharedCoset {
                    a: prev.to_string(),
                    b: k.to_string(),
                });
            }
            slots[c] = Some(k);
        }
        let filled = slots.iter().filter(|s| s.is_some()).count();
        if filled != quotient.index() {
            return Err(FolnerError::Certificate(format!(
                "tile has {filled} elements but the index is {}",
                quotient.index()
            )));
        }
        let tile: Vec<GroupElement> = slots.into_iter().map(Option::unwrap).collect();
        let mut t = Self {
            quotient,
            tile,
            certificate: TilingCertificate {
                injective: true,
                full_transversal: true,
                ..TilingCertificate::default()
            },
        };
        t.certificate.pairwise_checked = t.pairwise_check()?;
        if let Some(f) = folner {
            t.check_contains(f)?;
        }
        Ok(t)
    }

    fn pairwise_check(&self) -> Result<bool, FolnerError> {
        if self.tile.len() > PAIRWISE_LIMIT {
            return Ok(false);
        }
        let g = self.group();
        let l = self.subgroup();
        for (i, a) in self.tile.iter().enumerate() {
            let a_inv = g.inv(a);
            for b in &self.tile[i + 1..] {
                if l.contains(&g.mul(&a_inv, b)) {
                    return Err(FolnerError::SharedCoset {
                        a: a.to_string(),
                        b: b.to_string(),
                    });
                }
            }
        }
        Ok(true)
    }

    /// Records `K ⊇ F`, failing if some element of `F` is missing.
    pub fn check_contains(&mut self, f: &FolnerSet) -> Result<(), FolnerError> {
        if let Some(x) = f.elements().iter().find(|x| !self.contains(x)) {
            return Err(FolnerError::Certificate(format!("Følner element {x} missing from tile")));
        }
        self.certificate.contains_folner = true;
        Ok(())
    }

    pub fn group(&self) -> &Group {
        self.quotient.group()
    }

    pub fn subgroup(&self) -> &FiniteIndexSubgroup {
        self.quotient.subgroup()
    }

    pub fn quotient(&self) -> &QuotientMap {
        &self.quotient
    }

    pub fn index(&self) -> usize {
        self.quotient.index()
    }

    /// Tile elements ordered by coset index.
    pub fn tile(&self) -> &[GroupElement] {
        &self.tile
    }

    pub fn certificate(&self) -> &TilingCertificate {
        &self.certificate
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.tile[self.quotient.coset(x)] == *x
    }

    /// The tile element in the coset of `x`.
    pub fn tile_element_for(&self, x: &GroupElement) -> &GroupElement {
        &self.tile[self.quotient.coset(x)]
    }

    /// Finds every `(k, l)` in `K x L` with `w = k l` by scanning all of `K`,
    /// and requires exactly one per window point.
    pub fn verify_window(&self, window: &[GroupElement]) -> Result<Factorization, FolnerError> {
        let g = self.group();
        let l = self.subgroup();
        let inverses: Vec<GroupElement> = self.tile.iter().map(|k| g.inv(k)).collect();
        let mut entries = Vec::with_capacity(window.len());
        for w in window {
            let hits: Vec<usize> = inverses
                .iter()
                .enumerate()
                .filter(|(_, ki)| l.contains(&g.mul(ki, w)))
                .map(|(i, _)| i)
                .collect();
            if hits.len() != 1 {
                return Err(FolnerError::Factorization {
                    point: w.to_string(),
                    count: hits.len(),
                });
            }
            let k = self.tile[hits[0]].clone();
            let part = g.mul(&inverses[hits[0]], w);
            entries.push((w.clone(), k, part));
        }
        Ok(Factorization { entries })
    }

    /// Runs [`Tiling::verify_window`] and records the window size.
    pub fn certify_window(&mut self, window: &[GroupElement]) -> Result<Factorization, FolnerError> {
        let f = self.verify_window(window)?;
        self.certificate.window_points = f.len() as u64;
        Ok(f)
    }

    pub fn to_document(&self) -> TilingDocument {
        TilingDocument {
            group: self.group().clone(),
            subgroup: self.subgroup().spec().clone(),
            index: self.index() as u64,
            tile: self.tile.clone(),
            certificate: self.certificate,
        }
    }

    /// Rebuilds and re-certifies a tiling. Structural flags are recomputed;
    /// `contains_folner` and `window_points` are carried over.
    pub fn from_document(doc: &TilingDocument, cap: u64) -> Result<Self, FolnerError> {
        let l = FiniteIndexSubgroup::new(&doc.group, doc.subgroup.clone(), cap)?;
        if l.index() != doc.index {
            return Err(FolnerError::Document(format!(
                "declared index {} but the subgroup has index {}",
                doc.index,
                l.index()
            )));
        }
        let mut t = Self::from_parts(&l, doc.tile.clone(), None)?;
        if t.tile != doc.tile {
            return Err(FolnerError::Document("tile is not listed in coset order".into()));
        }
        t.certificate.contains_folner = doc.certificate.contains_folner;
        t.certificate.window_points = doc.certificate.window_points;
        if t.certificate != doc.certificate {
            return Err(FolnerError::Document("certificate flags do not match".into()));
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("tiling documents serialize")
    }

    pub fn from_json(s: &str, cap: u64) -> Result<Self, FolnerError> {
        let doc: TilingDocument =
            serde_json::from_str(s).map_err(|e| FolnerError::Document(e.to_string()))?;
        Self::from_document(&doc, cap)
    }
}

/// Extends `F` to a coset transversal of `L`.
///
/// Each coset missing from `F` receives its minimal element under
/// (word length, normal form) order.
pub fn complete_tile(f: &FolnerSet, subgroup: &FiniteIndexSubgroup) -> Result<Tiling, FolnerError> {
    let quotient = QuotientMap::new(subgroup)?;
    let mut slots: Vec<Option<GroupElement>> = vec![None; quotient.index()];
    for x in f.elements() {
        let c = quotient.coset(x);
        if let Some(prev) = &slots[c] {
            return Err(FolnerError::SharedCoset {
                a: prev.to_string(),
                b: x.to_string(),
            });
        }
        slots[c] = Some(x.clone());
    }
    let mut missing = slots.iter().filter(|s| s.is_none()).count();
    if missing > 0 {
        for layer in f.group().ball_layers() {
            for x in layer {
                let c = quotient.coset(&x);
                if slots[c].is_none() {
                    slots[c] = Some(x);
                    missing -= 1;
                }
            }
            if missing == 0 {
                break;
            }
        }
    }
    let tile: Vec<GroupElement> = slots.into_iter().flatten().collect();
    Tiling::from_parts(subgroup, tile, Some(f))
}
