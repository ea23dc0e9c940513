use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cellset::CellSet;
use super::lattice::{Coord, Lattice};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `[n]^d` with constant threshold `r`.
    Plain,
    /// `[n]^d × [2]^ℓ`: threshold `r` on the layer with all thickness
    /// coordinates equal to 1, `r + ℓ` elsewhere.
    Star,
    /// `[n]^d × [k]^ℓ`: threshold `r` plus one for every thickness coordinate
    /// that is neither 1 nor `k`.
    Slab,
}

/// Which bootstrap structure to run on.
///
/// Deserialization accepts a missing `ell` (plain) or `k` (plain, star) and
/// fills in the family default.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct StructureSpec {
    pub family: Family,
    pub n: usize,
    pub d: usize,
    pub ell: usize,
    pub k: usize,
    pub r: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    family: Family,
    n: usize,
    d: usize,
    #[serde(default)]
    ell: usize,
    k: Option<usize>,
    r: usize,
}

impl TryFrom<RawSpec> for StructureSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let k = match (raw.family, raw.k) {
            (Family::Plain, _) => 1,
            (Family::Star, None) => 2,
            (Family::Star, Some(k)) => k,
            (Family::Slab, Some(k)) => k,
            (Family::Slab, None) => return Err(Error::domain("slab structure needs field `k`")),
        };
        let spec = StructureSpec {
            family: raw.family,
            n: raw.n,
            d: raw.d,
            ell: raw.ell,
            k,
            r: raw.r,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl StructureSpec {
    pub fn plain(n: usize, d: usize, r: usize) -> Self {
        StructureSpec { family: Family::Plain, n, d, ell: 0, k: 1, r }
    }

    pub fn star(n: usize, d: usize, ell: usize, r: usize) -> Self {
        StructureSpec { family: Family::Star, n, d, ell, k: 2, r }
    }

    pub fn slab(n: usize, d: usize, ell: usize, k: usize, r: usize) -> Self {
        StructureSpec { family: Family::Slab, n, d, ell, k, r }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::domain("field `n` must be at least 1"));
        }
        if self.d < 1 {
            return Err(Error::domain("field `d` must be at least 1"));
        }
        if self.r < 1 {
            return Err(Error::domain("field `r` must be at least 1"));
        }
        match self.family {
            Family::Plain if self.ell != 0 => {
                Err(Error::domain("field `ell` must be 0 for a plain structure"))
            }
            Family::Star if self.k != 2 => {
                Err(Error::domain("field `k` must be 2 for a star structure"))
            }
            Family::Slab if self.k < 2 => {
                Err(Error::domain("field `k` must be at least 2 for a slab structure"))
            }
            _ => Ok(()),
        }
    }

    /// Side length of each thickness axis (1 when there are none).
    pub fn thickness_side(&self) -> usize {
        if self.ell == 0 {
            1
        } else {
            self.k
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.n; self.d];
        dims.extend(std::iter::repeat_n(self.k, self.ell));
        dims
    }

    /// Threshold of a vertex given only its thickness coordinates.
    pub fn threshold_for_thickness(&self, thickness: &[usize]) -> usize {
        match self.family {
            Family::Plain => self.r,
            Family::Star => {
                if thickness.iter().all(|&b| b == 1) {
                    self.r
                } else {
                    self.r + self.ell
                }
            }
            Family::Slab => {
                self.r + thickness.iter().filter(|&&b| b != 1 && b != self.k).count()
            }
        }
    }
}

/// A validated [`StructureSpec`] together with its lattices and the
/// per-vertex threshold table.
#[derive(Clone, Debug)]
pub struct Structure {
    spec: StructureSpec,
    lattice: Arc<Lattice>,
    horizontal: Arc<Lattice>,
    thresholds: Vec<u32>,
}

impl Structure {
    pub fn new(spec: StructureSpec) -> Result<Self> {
        spec.validate()?;
        let lattice = Arc::new(Lattice::new(spec.dims())?);
        let horizontal = Arc::new(Lattice::new(vec![spec.n; spec.d])?);
        let thresholds = (0..lattice.len())
            .map(|idx| {
                let c = lattice.coord_of(idx);
                spec.threshold_for_thickness(&c.0[spec.d..]) as u32
            })
            .collect();
        Ok(Structure { spec, lattice, horizontal, thresholds })
    }

    pub fn spec(&self) -> &StructureSpec {
        &self.spec
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    /// The horizontal lattice `[n]^d` that projections live on.
    pub fn horizontal(&self) -> &Arc<Lattice> {
        &self.horizontal
    }

    pub fn thresholds(&self) -> &[u32] {
        &self.thresholds
    }

    #[inline]
    pub fn threshold_at(&self, idx: usize) -> u32 {
        self.thresholds[idx]
    }

    /// Number of vertices sharing one horizontal position.
    pub fn column_len(&self) -> usize {
        self.lattice.len() / self.horizontal.len()
    }

    /// Horizontal index of `idx`. Thickness axes come last, so this is a
    /// plain division.
    #[inline]
    pub fn project_index(&self, idx: usize) -> usize {
        idx / self.column_len()
    }

    pub fn empty_set(&self) -> CellSet {
        CellSet::empty(&self.lattice)
    }

    pub fn full_set(&self) -> CellSet {
        CellSet::full(&self.lattice)
    }

    pub fn cells(&self, coords: &[Coord]) -> Result<CellSet> {
        CellSet::from_coords(&self.lattice, coords)
    }
}
