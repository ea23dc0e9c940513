use std::fmt;
use std::sync::Arc;

use super::lattice::{Coord, Lattice};
use crate::error::Result;

/// A set of vertices of a [`Lattice`], stored as a dense bitset.
///
/// Iteration always runs in canonical (axis-lexicographic) order.
#[derive(Clone, PartialEq, Eq)]
pub struct CellSet {
    lattice: Arc<Lattice>,
    words: Vec<u64>,
    count: usize,
}

impl CellSet {
    pub fn empty(lattice: &Arc<Lattice>) -> Self {
        CellSet {
            lattice: Arc::clone(lattice),
            words: vec![0; lattice.len().div_ceil(64)],
            count: 0,
        }
    }

    pub fn full(lattice: &Arc<Lattice>) -> Self {
        let mut s = Self::empty(lattice);
        let n = lattice.len();
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        if !n.is_multiple_of(64) {
            if let Some(last) = s.words.last_mut() {
                *last = (1u64 << (n % 64)) - 1;
            }
        }
        s.count = n;
        s
    }

    pub fn from_indices(lattice: &Arc<Lattice>, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(lattice);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn from_coords<'a>(
        lattice: &Arc<Lattice>,
        coords: impl IntoIterator<Item = &'a Coord>,
    ) -> Result<Self> {
        let mut s = Self::empty(lattice);
        for c in coords {
            s.insert(lattice.checked_index(c)?);
        }
        Ok(s)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn is_full(&self) -> bool {
        self.count == self.lattice.len()
    }

    #[inline]
    pub fn contains(&self, idx: usize) -> bool {
        idx < self.lattice.len() && self.words[idx >> 6] >> (idx & 63) & 1 == 1
    }

    pub fn contains_coord(&self, c: &Coord) -> Result<bool> {
        Ok(self.contains(self.lattice.checked_index(c)?))
    }

    /// Inserts `idx`; returns `true` if it was not already present.
    #[inline]
    pub fn insert(&mut self, idx: usize) -> bool {
        assert!(idx < self.lattice.len(), "cell index {idx} out of range");
        let w = &mut self.words[idx >> 6];
        let bit = 1u64 << (idx & 63);
        if *w & bit == 0 {
            *w |= bit;
            self.count += 1;
            true
        } else {
            false
        }
    }

    pub fn insert_coord(&mut self, c: &Coord) -> Result<bool> {
        let idx = self.lattice.checked_index(c)?;
        Ok(self.insert(idx))
    }

    pub fn remove(&mut self, idx: usize) -> bool {
        if !self.contains(idx) {
            return false;
        }
        self.words[idx >> 6] &= !(1u64 << (idx & 63));
        self.count -= 1;
        true
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        self.iter().map(|i| self.lattice.coord_of(i))
    }

    /// Least member in canonical order.
    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    fn check_same_lattice(&self, other: &CellSet) {
        assert!(
            Arc::ptr_eq(&self.lattice, &other.lattice) || self.lattice == other.lattice,
            "cell sets live on different lattices"
        );
    }

    pub fn union_with(&mut self, other: &CellSet) {
        self.check_same_lattice(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
        self.recount();
    }

    pub fn intersect_with(&mut self, other: &CellSet) {
        self.check_same_lattice(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
        self.recount();
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.check_same_lattice(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &CellSet) -> bool {
        self.check_same_lattice(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    fn recount(&mut self) {
        self.count = self.words.iter().map(|w| w.count_ones() as usize).sum();
    }
}

impl fmt::Debug for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.coords().map(|c| c.0))
            .finish()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word_idx * 64 + bit);
            }
            self.word_idx += 1;
            self.current = *self.words.get(self.word_idx)?;
        }
    }
}
