use serde::{Deserialize, Serialize};

use super::cellset::CellSet;
use super::lattice::Lattice;
use super::spec::Structure;
use crate::error::{Error, Result};

/// An axis-aligned box `[lo, hi]` in the horizontal coordinates, inclusive at
/// both ends. As a vertex set it always spans the full thickness.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRect")]
pub struct Rectangle {
    lo: Vec<usize>,
    hi: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRect {
    lo: Vec<usize>,
    hi: Vec<usize>,
}

impl TryFrom<RawRect> for Rectangle {
    type Error = Error;

    fn try_from(raw: RawRect) -> Result<Self> {
        Rectangle::new(raw.lo, raw.hi)
    }
}

impl Rectangle {
    pub fn new(lo: Vec<usize>, hi: Vec<usize>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::domain(format!(
                "rectangle corners {lo:?} and {hi:?} have mismatched dimension"
            )));
        }
        if lo.iter().zip(&hi).any(|(&a, &b)| a == 0 || a > b) {
            return Err(Error::domain(format!(
                "rectangle corners {lo:?}..{hi:?} must satisfy 1 <= lo <= hi"
            )));
        }
        Ok(Rectangle { lo, hi })
    }

    /// The 1 × … × 1 rectangle at `x`.
    pub fn point(x: Vec<usize>) -> Result<Self> {
        Rectangle::new(x.clone(), x)
    }

    pub fn lo(&self) -> &[usize] {
        &self.lo
    }

    pub fn hi(&self) -> &[usize] {
        &self.hi
    }

    pub fn rank(&self) -> usize {
        self.lo.len()
    }

    /// Side lengths `hi - lo + 1`.
    pub fn dims(&self) -> Vec<usize> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a + 1).collect()
    }

    /// Semi-perimeter: the sum of the side lengths.
    pub fn semi_perimeter(&self) -> usize {
        self.dims().iter().sum()
    }

    pub fn long(&self) -> usize {
        self.dims().into_iter().max().unwrap_or(0)
    }

    pub fn short(&self) -> usize {
        self.dims().into_iter().min().unwrap_or(0)
    }

    pub fn contains(&self, x: &[usize]) -> bool {
        x.len() == self.rank()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&v, (&a, &b))| a <= v && v <= b)
    }

    pub fn fits_in(&self, n: usize) -> bool {
        self.hi.iter().all(|&b| b <= n)
    }

    pub(crate) fn check_in(&self, s: &Structure) -> Result<()> {
        if self.rank() != s.spec().d || !self.fits_in(s.spec().n) {
            return Err(Error::domain(format!(
                "rectangle {:?}..{:?} does not fit in [{}]^{}",
                self.lo,
                self.hi,
                s.spec().n,
                s.spec().d
            )));
        }
        Ok(())
    }

    /// Smallest rectangle containing every member of `cells` (a set on a
    /// horizontal lattice). `None` for the empty set.
    pub fn bounding(cells: &CellSet) -> Option<Rectangle> {
        let lat = cells.lattice();
        let mut it = cells.iter();
        let first = lat.coord_of(it.next()?).0;
        let (mut lo, mut hi) = (first.clone(), first);
        for idx in it {
            for axis in 0..lat.rank() {
                let x = lat.axis_coord(idx, axis);
                lo[axis] = lo[axis].min(x);
                hi[axis] = hi[axis].max(x);
            }
        }
        Some(Rectangle { lo, hi })
    }

    /// Horizontal index ranges as 0-based half-open intervals.
    pub(crate) fn ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.lo.iter().zip(&self.hi).map(|(&a, &b)| a - 1..b)
    }

    /// Every horizontal cell of the rectangle, as indices of `horizontal`.
    pub(crate) fn horizontal_indices(&self, horizontal: &Lattice) -> Vec<usize> {
        let mut out = vec![0usize];
        for (axis, range) in self.ranges().enumerate() {
            let s = horizontal.stride(axis);
            out = out
                .iter()
                .flat_map(|&base| range.clone().map(move |x| base + x * s))
                .collect();
        }
        out
    }

    /// The rectangle as a full-thickness vertex set of `s`.
    pub fn to_cells(&self, s: &Structure) -> Result<CellSet> {
        self.check_in(s)?;
        let col = s.column_len();
        let mut out = s.empty_set();
        for h in self.horizontal_indices(s.horizontal()) {
            for t in 0..col {
                out.insert(h * col + t);
            }
        }
        Ok(out)
    }

    /// `cells ∩ R` for a full-thickness set on `s`.
    pub fn restrict(&self, s: &Structure, cells: &CellSet) -> CellSet {
        let mut out = s.empty_set();
        let hl = s.horizontal();
        for idx in cells.iter() {
            let h = s.project_index(idx);
            if (0..hl.rank()).all(|a| {
                let x = hl.axis_coord(h, a);
                self.lo[a] <= x && x <= self.hi[a]
            }) {
                out.insert(idx);
            }
        }
        out
    }
}
