use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice point with 1-based coordinates.
///
/// In a thickened structure the first `d` components are horizontal and the
/// remaining `ℓ` are thickness coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coord(pub Vec<usize>);

impl Coord {
    pub fn new(components: impl Into<Vec<usize>>) -> Self {
        Coord(components.into())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<usize>> for Coord {
    fn from(v: Vec<usize>) -> Self {
        Coord(v)
    }
}

impl<const N: usize> From<[usize; N]> for Coord {
    fn from(v: [usize; N]) -> Self {
        Coord(v.to_vec())
    }
}

/// The box `[a_1] × … × [a_m]` with nearest-neighbour adjacency.
///
/// Vertices are addressed by a dense linear index in which the first axis is
/// the most significant, so increasing index is the canonical
/// axis-lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    dims: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl Lattice {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::domain("lattice needs at least one axis"));
        }
        if let Some(axis) = dims.iter().position(|&a| a == 0) {
            return Err(Error::domain(format!("lattice axis {} has length 0", axis + 1)));
        }
        let mut strides = vec![1usize; dims.len()];
        for axis in (0..dims.len() - 1).rev() {
            strides[axis] = strides[axis + 1]
                .checked_mul(dims[axis + 1])
                .ok_or_else(|| Error::domain("lattice too large"))?;
        }
        let len = strides[0]
            .checked_mul(dims[0])
            .ok_or_else(|| Error::domain("lattice too large"))?;
        Ok(Lattice { dims, strides, len })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn index_of(&self, c: &[usize]) -> Option<usize> {
        if c.len() != self.dims.len() {
            return None;
        }
        let mut idx = 0;
        for ((&x, &a), &s) in c.iter().zip(&self.dims).zip(&self.strides) {
            if x == 0 || x > a {
                return None;
            }
            idx += (x - 1) * s;
        }
        Some(idx)
    }

    pub fn checked_index(&self, c: &Coord) -> Result<usize> {
        self.index_of(c.as_slice()).ok_or_else(|| {
            Error::domain(format!(
                "coordinate {:?} outside lattice {:?}",
                c.as_slice(),
                self.dims
            ))
        })
    }

    pub fn coord_of(&self, idx: usize) -> Coord {
        Coord((0..self.rank()).map(|a| self.axis_coord(idx, a)).collect())
    }

    /// 1-based coordinate of `idx` along `axis` (0-based axis number).
    #[inline]
    pub fn axis_coord(&self, idx: usize, axis: usize) -> usize {
        (idx / self.strides[axis]) % self.dims[axis] + 1
    }

    #[inline]
    pub fn for_each_neighbor(&self, idx: usize, mut f: impl FnMut(usize)) {
        for axis in 0..self.dims.len() {
            let s = self.strides[axis];
            let x = (idx / s) % self.dims[axis];
            if x > 0 {
                f(idx - s);
            }
            if x + 1 < self.dims[axis] {
                f(idx + s);
            }
        }
    }

    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * self.rank());
        self.for_each_neighbor(idx, |j| out.push(j));
        out
    }

    pub fn max_degree(&self) -> usize {
        2 * self.rank()
    }
}
