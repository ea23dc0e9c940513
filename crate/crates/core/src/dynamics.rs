//! Closures under the bootstrap rule and the predicates built on them.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::{CellSet, Family, Lattice, Rectangle, Structure};

#[derive(Clone, Copy)]
pub(crate) enum Thresholds<'a> {
    Uniform(u32),
    PerVertex(&'a [u32]),
}

impl Thresholds<'_> {
    #[inline]
    fn at(&self, idx: usize) -> u32 {
        match self {
            Thresholds::Uniform(t) => *t,
            Thresholds::PerVertex(t) => t[idx],
        }
    }
}

/// Counter-and-queue closure: each vertex keeps the number of infected
/// neighbours and joins the queue the moment it reaches its threshold.
/// Vertices outside `allowed` are never infected and never counted.
pub(crate) fn run_closure(
    thresholds: Thresholds<'_>,
    allowed: Option<&CellSet>,
    seed: &CellSet,
) -> CellSet {
    let lat = seed.lattice();
    let mut infected = seed.clone();
    let mut counts = vec![0u32; lat.len()];
    let mut queue: VecDeque<usize> = seed.iter().collect();
    while let Some(v) = queue.pop_front() {
        lat.for_each_neighbor(v, |w| {
            if infected.contains(w) || allowed.is_some_and(|m| !m.contains(w)) {
                return;
            }
            counts[w] += 1;
            if counts[w] >= thresholds.at(w) {
                infected.insert(w);
                queue.push_back(w);
            }
        });
    }
    infected
}

/// The final infected set `[A]` on `s`.
pub fn closure(s: &Structure, a: &CellSet) -> CellSet {
    run_closure(Thresholds::PerVertex(s.thresholds()), None, a)
}

/// Closure on a box where every vertex has threshold `t`.
pub fn closure_uniform(a: &CellSet, t: usize) -> Result<CellSet> {
    if t == 0 {
        return Err(Error::domain("uniform threshold must be at least 1"));
    }
    let t = u32::try_from(t).unwrap_or(u32::MAX);
    Ok(run_closure(Thresholds::Uniform(t), None, a))
}

pub fn percolates(s: &Structure, a: &CellSet) -> bool {
    closure(s, a).is_full()
}

/// `[A]` contains every vertex of minimal threshold. Star structures only.
pub fn semi_percolates(s: &Structure, a: &CellSet) -> Result<bool> {
    if s.spec().family != Family::Star {
        return Err(Error::domain("semi-percolation is defined for star structures only"));
    }
    let base = s.spec().r as u32;
    let fin = closure(s, a);
    Ok((0..s.lattice().len()).all(|v| s.threshold_at(v) != base || fin.contains(v)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// From smaller to larger coordinate.
    Forward,
    /// From larger to smaller coordinate.
    Backward,
}

/// Direction of travel across a rectangle: an axis (1-based) and a sense.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CrossDirection {
    pub axis: usize,
    pub orientation: Orientation,
}

impl CrossDirection {
    pub fn left_to_right() -> Self {
        CrossDirection { axis: 1, orientation: Orientation::Forward }
    }

    pub fn right_to_left() -> Self {
        CrossDirection { axis: 1, orientation: Orientation::Backward }
    }

    pub fn bottom_to_top() -> Self {
        CrossDirection { axis: 2, orientation: Orientation::Forward }
    }

    pub fn top_to_bottom() -> Self {
        CrossDirection { axis: 2, orientation: Orientation::Backward }
    }
}

/// A local copy of a full-thickness rectangle, optionally padded by one
/// layer on either side of one horizontal axis.
struct LocalBox {
    lattice: Arc<Lattice>,
    d: usize,
    axis: usize,
    pad_lo: usize,
    rect_dims: Vec<usize>,
}

impl LocalBox {
    fn new(s: &Structure, r: &Rectangle, axis: usize, pad_lo: bool, pad_hi: bool) -> Result<Self> {
        let spec = s.spec();
        let mut dims = r.dims();
        let rect_dims = dims.clone();
        dims[axis] += pad_lo as usize + pad_hi as usize;
        dims.extend(std::iter::repeat_n(spec.k, spec.ell));
        Ok(LocalBox {
            lattice: Arc::new(Lattice::new(dims)?),
            d: spec.d,
            axis,
            pad_lo: pad_lo as usize,
            rect_dims,
        })
    }

    /// Local index of the global vertex `c` (which must lie in R).
    fn local_index(&self, r: &Rectangle, c: &[usize]) -> usize {
        let mut local: Vec<usize> = c.to_vec();
        for a in 0..self.d {
            local[a] = c[a] - r.lo()[a] + 1;
        }
        local[self.axis] += self.pad_lo;
        self.lattice.index_of(&local).expect("cell of R maps into the local box")
    }

    /// Local coordinate along the padded axis, rebased so that R occupies
    /// `1..=rect_dims[axis]`; padding layers map to 0 and `rect_dims[axis] + 1`.
    fn along(&self, idx: usize) -> usize {
        self.lattice.axis_coord(idx, self.axis) - self.pad_lo
    }

    fn in_rect(&self, idx: usize) -> bool {
        let x = self.along(idx);
        x >= 1 && x <= self.rect_dims[self.axis]
    }

    fn thresholds(&self, s: &Structure) -> Vec<u32> {
        (0..self.lattice.len())
            .map(|i| {
                let c = self.lattice.coord_of(i);
                s.spec().threshold_for_thickness(&c.0[self.d..]) as u32
            })
            .collect()
    }

    fn copy_in(&self, s: &Structure, r: &Rectangle, a: &CellSet) -> CellSet {
        let mut out = CellSet::empty(&self.lattice);
        let lat = s.lattice();
        for idx in r.restrict(s, a).iter() {
            out.insert(self.local_index(r, lat.coord_of(idx).as_slice()));
        }
        out
    }
}

/// Whether `A ∩ R` crosses `R` in direction `dir`, given a fully infected
/// plane just outside the entry face. Slab structures only.
pub fn is_crossed(s: &Structure, r: &Rectangle, a: &CellSet, dir: CrossDirection) -> Result<bool> {
    if s.spec().family != Family::Slab {
        return Err(Error::domain("crossing is defined for slab structures only"));
    }
    r.check_in(s)?;
    if dir.axis == 0 || dir.axis > s.spec().d {
        return Err(Error::domain(format!("crossing axis {} out of range", dir.axis)));
    }
    let axis = dir.axis - 1;
    let forward = dir.orientation == Orientation::Forward;
    let lb = LocalBox::new(s, r, axis, forward, !forward)?;
    let len = lb.rect_dims[axis];
    let (ghost, entry, exit) = if forward { (0, 1, len) } else { (len + 1, len, 1) };

    let mut seed = lb.copy_in(s, r, a);
    for i in 0..lb.lattice.len() {
        if lb.along(i) == ghost {
            seed.insert(i);
        }
    }
    let thr = lb.thresholds(s);
    let fin = run_closure(Thresholds::PerVertex(&thr), None, &seed);

    // Breadth-first search over infected cells of R from the entry face.
    let mut seen = CellSet::empty(&lb.lattice);
    let mut queue = VecDeque::new();
    for i in fin.iter() {
        if lb.along(i) == entry {
            seen.insert(i);
            queue.push_back(i);
        }
    }
    while let Some(v) = queue.pop_front() {
        if lb.along(v) == exit {
            return Ok(true);
        }
        lb.lattice.for_each_neighbor(v, |w| {
            if lb.in_rect(w) && fin.contains(w) && seen.insert(w) {
                queue.push_back(w);
            }
        });
    }
    Ok(false)
}

/// Whether `R` is semi-crossed from left to right along `axis` (1-based):
/// with the threshold-`r` cells just left of `R` infected, together with `A`
/// on `R` and on the threshold-`r` cells just right of it, every
/// threshold-`r` vertex of `R` becomes infected. Star structures only.
pub fn is_semi_crossed(s: &Structure, r: &Rectangle, a: &CellSet, axis: usize) -> Result<bool> {
    if s.spec().family != Family::Star {
        return Err(Error::domain("semi-crossing is defined for star structures only"));
    }
    r.check_in(s)?;
    if axis == 0 || axis > s.spec().d {
        return Err(Error::domain(format!("semi-crossing axis {axis} out of range")));
    }
    let t = axis - 1;
    let pad_lo = r.lo()[t] > 1;
    let pad_hi = r.hi()[t] < s.spec().n;
    let lb = LocalBox::new(s, r, t, pad_lo, pad_hi)?;
    let thr = lb.thresholds(s);
    let base = s.spec().r as u32;

    let mut allowed = CellSet::empty(&lb.lattice);
    let mut seed = lb.copy_in(s, r, a);
    for i in 0..lb.lattice.len() {
        if lb.in_rect(i) {
            allowed.insert(i);
        } else if thr[i] == base {
            allowed.insert(i);
            if lb.along(i) == 0 {
                seed.insert(i);
            }
        }
    }
    if pad_hi {
        // A on the right fringe R_t^+.
        let lat = s.lattice();
        for idx in a.iter() {
            let c = lat.coord_of(idx);
            let x = c.0[t];
            if x != r.hi()[t] + 1 || s.threshold_at(idx) != base {
                continue;
            }
            let mut shifted = c.0.clone();
            shifted[t] -= 1;
            if r.contains(&shifted[..s.spec().d]) {
                let li = lb.local_index(r, &shifted) + lb.lattice.stride(t);
                seed.insert(li);
            }
        }
    }
    let fin = run_closure(Thresholds::PerVertex(&thr), Some(&allowed), &seed);
    Ok((0..lb.lattice.len())
        .filter(|&i| lb.in_rect(i) && thr[i] == base)
        .all(|i| fin.contains(i)))
}

/// Whether some axis in `axes` (1-based) has two adjacent slabs of the box
/// `a.lattice()` containing no member of `a`; slabs 0 and `a_i + 1` lie
/// outside the box and count as empty, so an empty face is a double gap.
pub fn has_double_gap(a: &CellSet, axes: &[usize]) -> bool {
    let lat = a.lattice();
    axes.iter().any(|&axis| {
        let len = lat.dims()[axis - 1];
        let mut occupied = vec![false; len + 2];
        for idx in a.iter() {
            occupied[lat.axis_coord(idx, axis - 1)] = true;
        }
        occupied.windows(2).any(|w| !w[0] && !w[1])
    })
}

/// Double gap of `A ∩ R` along the horizontal axes of a full-thickness
/// rectangle.
pub fn rectangle_has_double_gap(s: &Structure, r: &Rectangle, a: &CellSet) -> bool {
    let lat = s.lattice();
    let d = s.spec().d;
    let inside = r.restrict(s, a);
    (0..d).any(|axis| {
        let len = r.dims()[axis];
        let mut occupied = vec![false; len + 2];
        for idx in inside.iter() {
            occupied[lat.axis_coord(idx, axis) - r.lo()[axis] + 1] = true;
        }
        occupied.windows(2).any(|w| !w[0] && !w[1])
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::structures::{Coord, StructureSpec};
    use proptest::prelude::*;

    fn c(v: &[usize]) -> Coord {
        Coord(v.to_vec())
    }

    /// Synchronous round-by-round iteration straight from the update rule.
    pub(crate) fn naive_closure(thr: impl Fn(usize) -> u32, a: &CellSet) -> CellSet {
        let lat = a.lattice();
        let mut cur = a.clone();
        loop {
            let mut next = cur.clone();
            for v in 0..lat.len() {
                if cur.contains(v) {
                    continue;
                }
                let k = lat.neighbors(v).into_iter().filter(|&w| cur.contains(w)).count() as u32;
                if k >= thr(v) {
                    next.insert(v);
                }
            }
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    fn plain(n: usize, d: usize, r: usize) -> Structure {
        Structure::new(StructureSpec::plain(n, d, r)).unwrap()
    }

    #[test]
    fn closure_examples() {
        let s = plain(5, 2, 2);
        let a = s.cells(&[c(&[1, 1]), c(&[2, 2])]).unwrap();
        let want = s.cells(&[c(&[1, 1]), c(&[1, 2]), c(&[2, 1]), c(&[2, 2])]).unwrap();
        assert_eq!(naive_closure(|v| s.threshold_at(v), &a), want);
        assert_eq!(closure(&s, &a), want);

        let s = plain(4, 3, 3);
        let a = s.cells(&[c(&[2, 2, 2])]).unwrap();
        assert_eq!(closure(&s, &a), a);
        assert!(closure(&s, &s.full_set()).is_full());
    }

    #[test]
    fn closure_uniform_examples() {
        let l = Arc::new(Lattice::new(vec![3, 3]).unwrap());
        let diag = CellSet::from_coords(&l, &[c(&[1, 1]), c(&[2, 2]), c(&[3, 3])]).unwrap();
        assert_eq!(naive_closure(|_| 2, &diag), CellSet::full(&l));
        assert!(closure_uniform(&diag, 2).unwrap().is_full());
        assert_eq!(closure_uniform(&diag, 5).unwrap(), diag);
        let one = CellSet::from_coords(&l, &[c(&[2, 3])]).unwrap();
        assert!(closure_uniform(&one, 1).unwrap().is_full());
        assert!(closure_uniform(&one, 0).is_err());
    }

    #[test]
    fn percolation_examples() {
        let s = plain(2, 2, 2);
        assert!(percolates(&s, &s.cells(&[c(&[1, 1]), c(&[2, 2])]).unwrap()));
        assert!(!percolates(&s, &s.cells(&[c(&[1, 1]), c(&[1, 2])]).unwrap()));
        assert!(!percolates(&s, &s.empty_set()));
    }

    #[test]
    fn semi_percolation_examples() {
        let s = Structure::new(StructureSpec::star(2, 2, 1, 2)).unwrap();
        assert!(semi_percolates(&s, &s.cells(&[c(&[1, 1, 1]), c(&[2, 2, 1])]).unwrap()).unwrap());
        assert!(!semi_percolates(&s, &s.empty_set()).unwrap());
        let layer: Vec<Coord> = (1..=2)
            .flat_map(|x| (1..=2).map(move |y| c(&[x, y, 1])))
            .collect();
        assert!(semi_percolates(&s, &s.cells(&layer).unwrap()).unwrap());
        assert!(semi_percolates(&plain(2, 2, 2), &s.empty_set()).is_err());
    }

    #[test]
    fn crossing_examples() {
        let s = Structure::new(StructureSpec::slab(6, 2, 1, 4, 2)).unwrap();
        let r = Rectangle::new(vec![2, 2], vec![5, 4]).unwrap();
        for dir in [
            CrossDirection::left_to_right(),
            CrossDirection::right_to_left(),
            CrossDirection::bottom_to_top(),
            CrossDirection::top_to_bottom(),
        ] {
            assert!(is_crossed(&s, &r, &r.to_cells(&s).unwrap(), dir).unwrap());
            assert!(!is_crossed(&s, &r, &s.empty_set(), dir).unwrap());
        }
        let line: Vec<Coord> = (2..=5).map(|x| c(&[x, 3, 1])).collect();
        let a = s.cells(&line).unwrap();
        assert!(is_crossed(&s, &r, &a, CrossDirection::left_to_right()).unwrap());
        assert!(is_crossed(&s, &r, &a, CrossDirection::right_to_left()).unwrap());

        let plain_s = plain(6, 2, 2);
        assert!(is_crossed(&plain_s, &r, &plain_s.empty_set(), CrossDirection::left_to_right()).is_err());
    }

    #[test]
    fn crossing_at_lattice_edge_uses_virtual_ghost() {
        let s = Structure::new(StructureSpec::slab(4, 2, 1, 2, 2)).unwrap();
        let r = Rectangle::new(vec![1, 1], vec![4, 4]).unwrap();
        // Single occupied top-layer row: the ghost plane plus the row gives a path.
        let row: Vec<Coord> = (1..=4).map(|x| c(&[x, 2, 1])).collect();
        assert!(is_crossed(&s, &r, &s.cells(&row).unwrap(), CrossDirection::left_to_right()).unwrap());
        // A column parallel to the ghost plane does not cross bottom-to-top alone.
        let col: Vec<Coord> = (1..=4).map(|y| c(&[3, y, 1])).collect();
        assert!(is_crossed(&s, &r, &s.cells(&col).unwrap(), CrossDirection::bottom_to_top()).unwrap());
        assert!(!is_crossed(&s, &r, &s.cells(&row[..1]).unwrap(), CrossDirection::bottom_to_top()).unwrap());
    }

    #[test]
    fn degenerate_crossing() {
        let s = Structure::new(StructureSpec::slab(5, 2, 1, 2, 2)).unwrap();
        let r = Rectangle::new(vec![3, 1], vec![3, 5]).unwrap();
        assert!(!is_crossed(&s, &r, &s.empty_set(), CrossDirection::left_to_right()).unwrap());
        let a = s.cells(&[c(&[3, 2, 1])]).unwrap();
        assert!(is_crossed(&s, &r, &a, CrossDirection::left_to_right()).unwrap());
    }

    #[test]
    fn semi_crossing_examples() {
        let s = Structure::new(StructureSpec::star(8, 2, 1, 2)).unwrap();
        let r = Rectangle::new(vec![3, 3], vec![5, 5]).unwrap();
        let top: Vec<Coord> = (3..=5)
            .flat_map(|x| (3..=5).map(move |y| c(&[x, y, 1])))
            .collect();
        assert!(is_semi_crossed(&s, &r, &s.cells(&top).unwrap(), 1).unwrap());
        assert!(!is_semi_crossed(&s, &r, &s.empty_set(), 1).unwrap());
        assert!(!is_semi_crossed(&s, &r, &s.empty_set(), 2).unwrap());
        // One occupied cell per column, on the top layer: U_i holds for every i.
        let per_column: Vec<Coord> = (3..=5).map(|x| c(&[x, 3 + (x % 3), 1])).collect();
        assert!(is_semi_crossed(&s, &r, &s.cells(&per_column).unwrap(), 1).unwrap());
        assert!(is_semi_crossed(&plain(8, 2, 2), &r, &s.empty_set(), 1).is_err());
    }

    #[test]
    fn semi_crossing_right_fringe_counts() {
        let s = Structure::new(StructureSpec::star(8, 2, 1, 2)).unwrap();
        let r = Rectangle::new(vec![3, 3], vec![4, 3]).unwrap();
        // Column x=3 holds a seed; x=4 is empty, but the fringe cell at x=5
        // gives (4,3,1) its second neighbour.
        let a = s.cells(&[c(&[3, 3, 1]), c(&[5, 3, 1])]).unwrap();
        assert!(is_semi_crossed(&s, &r, &a, 1).unwrap());
        let a = s.cells(&[c(&[3, 3, 1])]).unwrap();
        assert!(!is_semi_crossed(&s, &r, &a, 1).unwrap());
    }

    #[test]
    fn double_gap_examples() {
        let l = Arc::new(Lattice::new(vec![4, 4]).unwrap());
        assert!(has_double_gap(&CellSet::empty(&l), &[1, 2]));
        assert!(!has_double_gap(&CellSet::full(&l), &[1, 2]));
        let a = CellSet::from_coords(&l, &[c(&[1, 1]), c(&[2, 2]), c(&[4, 1])]).unwrap();
        assert!(has_double_gap(&a, &[1, 2]));
        assert!(has_double_gap(&a, &[2]));
        assert!(!has_double_gap(&a, &[1]));
    }

    fn arb_instance() -> impl Strategy<Value = (StructureSpec, Vec<bool>)> {
        prop_oneof![
            Just(StructureSpec::plain(6, 2, 2)),
            Just(StructureSpec::plain(4, 3, 3)),
            Just(StructureSpec::plain(5, 3, 2)),
            Just(StructureSpec::star(5, 2, 1, 2)),
            Just(StructureSpec::slab(5, 2, 1, 3, 2)),
            Just(StructureSpec::slab(3, 2, 2, 3, 2)),
        ]
        .prop_flat_map(|spec| {
            let len = spec.dims().iter().product::<usize>();
            (Just(spec), proptest::collection::vec(proptest::bool::weighted(0.15), len))
        })
    }

    fn to_set(s: &Structure, mask: &[bool]) -> CellSet {
        CellSet::from_indices(s.lattice(), mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
    }

    proptest! {
        #[test]
        fn closure_agrees_with_naive((spec, mask) in arb_instance()) {
            let s = Structure::new(spec).unwrap();
            let a = to_set(&s, &mask);
            let fast = closure(&s, &a);
            prop_assert_eq!(&fast, &naive_closure(|v| s.threshold_at(v), &a));
            prop_assert!(a.is_subset(&fast));
            prop_assert_eq!(closure(&s, &fast), fast);
        }

        #[test]
        fn closure_is_monotone((spec, mask) in arb_instance(), extra in proptest::collection::vec(0usize..75, 0..10)) {
            let s = Structure::new(spec).unwrap();
            let a = to_set(&s, &mask);
            let mut b = a.clone();
            for e in extra {
                b.insert(e % s.lattice().len());
            }
            prop_assert!(closure(&s, &a).is_subset(&closure(&s, &b)));
        }

        #[test]
        fn double_slab_blocks_growth((spec, mask) in arb_instance(), axis in 0usize..2, j in 1usize..4) {
            let s = Structure::new(spec).unwrap();
            prop_assume!(s.spec().r >= 2);
            let lat = s.lattice().clone();
            let n = s.spec().n;
            let mut a = to_set(&s, &mask);
            for v in 0..lat.len() {
                let x = lat.axis_coord(v, axis);
                if x == j || x == j + 1 {
                    a.remove(v);
                }
            }
            let r = Rectangle::new(vec![1; s.spec().d], vec![n; s.spec().d]).unwrap();
            prop_assert!(j + 1 > n || rectangle_has_double_gap(&s, &r, &a));
            let fin = closure(&s, &a);
            for v in fin.iter() {
                let x = lat.axis_coord(v, axis);
                prop_assert!(x != j && x != j + 1);
            }
        }
    }
}
