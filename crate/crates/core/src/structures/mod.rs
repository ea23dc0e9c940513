//! Lattices, bootstrap structures, cell sets and rectangle geometry.

mod cellset;
mod lattice;
mod rect;
mod spec;

pub use cellset::{CellSet, Iter as CellIter};
pub use lattice::{Coord, Lattice};
pub use rect::Rectangle;
pub use spec::{Family, Structure, StructureSpec};

use crate::error::Result;

/// Infection threshold of `v`.
pub fn threshold(s: &Structure, v: &Coord) -> Result<usize> {
    let idx = s.lattice().checked_index(v)?;
    Ok(s.threshold_at(idx) as usize)
}

/// All in-bounds vertices at L1 distance 1 from `v`.
pub fn neighbors(s: &Structure, v: &Coord) -> Result<Vec<Coord>> {
    let lat = s.lattice();
    let idx = lat.checked_index(v)?;
    Ok(lat.neighbors(idx).into_iter().map(|j| lat.coord_of(j)).collect())
}

/// The horizontal shadow `Π(S)` of a set on `s`, as a set on `[n]^d`.
pub fn projection(s: &Structure, cells: &CellSet) -> CellSet {
    let mut out = CellSet::empty(s.horizontal());
    let col = s.column_len();
    for idx in cells.iter() {
        out.insert(idx / col);
    }
    out
}

/// Nearest-neighbour connected components as lists of indices, ordered by
/// least member; members of each list are in canonical order.
pub(crate) fn component_indices(cells: &CellSet) -> Vec<Vec<usize>> {
    let lat = cells.lattice();
    let mut seen = CellSet::empty(lat);
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in cells.iter() {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = vec![start];
        stack.push(start);
        while let Some(v) = stack.pop() {
            lat.for_each_neighbor(v, |w| {
                if cells.contains(w) && seen.insert(w) {
                    comp.push(w);
                    stack.push(w);
                }
            });
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Partition of `cells` into connected components on its own lattice.
pub fn components(cells: &CellSet) -> Vec<CellSet> {
    component_indices(cells)
        .into_iter()
        .map(|c| CellSet::from_indices(cells.lattice(), c))
        .collect()
}

/// Longest side of the bounding box of a set of indices.
pub(crate) fn extent(lat: &Lattice, members: &[usize]) -> usize {
    (0..lat.rank())
        .map(|axis| {
            let (lo, hi) = members.iter().fold((usize::MAX, 0), |(lo, hi), &i| {
                let x = lat.axis_coord(i, axis);
                (lo.min(x), hi.max(x))
            });
            if hi == 0 {
                0
            } else {
                hi - lo + 1
            }
        })
        .max()
        .unwrap_or(0)
}

/// `max ‖x − y‖∞ + 1` over pairs in a common component; 0 for the empty set.
pub fn diameter(cells: &CellSet) -> usize {
    component_indices(cells)
        .iter()
        .map(|c| extent(cells.lattice(), c))
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use proptest::prelude::*;

    fn c(v: &[usize]) -> Coord {
        Coord(v.to_vec())
    }

    #[test]
    fn star_thresholds() {
        let s = Structure::new(StructureSpec::star(4, 2, 1, 2)).unwrap();
        assert_eq!(threshold(&s, &c(&[3, 1, 1])).unwrap(), 2);
        assert_eq!(threshold(&s, &c(&[3, 1, 2])).unwrap(), 3);
        assert!(threshold(&s, &c(&[5, 1, 1])).is_err());
    }

    #[test]
    fn slab_thresholds() {
        let s = Structure::new(StructureSpec::slab(5, 2, 1, 4, 2)).unwrap();
        assert_eq!(threshold(&s, &c(&[2, 2, 3])).unwrap(), 3);
        assert_eq!(threshold(&s, &c(&[2, 2, 1])).unwrap(), 2);
        assert_eq!(threshold(&s, &c(&[2, 2, 4])).unwrap(), 2);
        let s = Structure::new(StructureSpec::slab(3, 1, 2, 3, 2)).unwrap();
        assert_eq!(threshold(&s, &c(&[1, 2, 2])).unwrap(), 4);
        assert_eq!(threshold(&s, &c(&[1, 2, 3])).unwrap(), 3);
    }

    #[test]
    fn neighbor_counts() {
        let p = Structure::new(StructureSpec::plain(3, 2, 2)).unwrap();
        let mut corner = neighbors(&p, &c(&[1, 1])).unwrap();
        corner.sort();
        assert_eq!(corner, vec![c(&[1, 2]), c(&[2, 1])]);
        assert_eq!(neighbors(&p, &c(&[2, 2])).unwrap().len(), 4);
        let s = Structure::new(StructureSpec::slab(3, 2, 1, 3, 2)).unwrap();
        assert_eq!(neighbors(&s, &c(&[2, 2, 2])).unwrap().len(), 6);
        assert!(neighbors(&s, &c(&[2, 2, 4])).is_err());
    }

    #[test]
    fn projection_examples() {
        let s = Structure::new(StructureSpec::slab(5, 2, 1, 3, 2)).unwrap();
        assert!(projection(&s, &s.empty_set()).is_empty());
        let a = s.cells(&[c(&[2, 2, 1]), c(&[2, 2, 3])]).unwrap();
        let pa: Vec<_> = projection(&s, &a).coords().collect();
        assert_eq!(pa, vec![c(&[2, 2])]);
        let a = s.cells(&[c(&[1, 2, 2]), c(&[4, 4, 1])]).unwrap();
        let pa: Vec<_> = projection(&s, &a).coords().collect();
        assert_eq!(pa, vec![c(&[1, 2]), c(&[4, 4])]);
    }

    #[test]
    fn projection_of_rectangle_is_its_box() {
        let s = Structure::new(StructureSpec::slab(6, 2, 1, 3, 2)).unwrap();
        let r = Rectangle::new(vec![2, 3], vec![4, 6]).unwrap();
        let p = projection(&s, &r.to_cells(&s).unwrap());
        assert_eq!(Rectangle::bounding(&p), Some(r.clone()));
        assert_eq!(p.len(), 3 * 4);
    }

    #[test]
    fn component_examples() {
        let l = Arc::new(Lattice::new(vec![3, 3]).unwrap());
        let one = CellSet::from_coords(&l, &[c(&[1, 1]), c(&[1, 2])]).unwrap();
        assert_eq!(components(&one).len(), 1);
        let two = CellSet::from_coords(&l, &[c(&[3, 3]), c(&[1, 1])]).unwrap();
        let parts = components(&two);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].first(), Some(0));
        assert!(components(&CellSet::empty(&l)).is_empty());
    }

    #[test]
    fn diameter_examples() {
        let s = Structure::new(StructureSpec::slab(8, 2, 1, 2, 2)).unwrap();
        let r = Rectangle::new(vec![1, 2], vec![3, 6]).unwrap();
        assert_eq!(diameter(&r.to_cells(&s).unwrap()), 5);
        let l = Arc::new(Lattice::new(vec![9, 9]).unwrap());
        let single = CellSet::from_coords(&l, &[c(&[4, 4])]).unwrap();
        assert_eq!(diameter(&single), 1);
        let apart = CellSet::from_coords(&l, &[c(&[1, 1]), c(&[9, 9])]).unwrap();
        assert_eq!(diameter(&apart), 1);
        assert_eq!(diameter(&CellSet::empty(&l)), 0);
    }

    #[test]
    fn rectangle_diameter_includes_thickness() {
        let s = Structure::new(StructureSpec::slab(8, 2, 1, 5, 2)).unwrap();
        let r = Rectangle::new(vec![1, 1], vec![2, 3]).unwrap();
        assert_eq!(diameter(&r.to_cells(&s).unwrap()), 5);
        let p = Structure::new(StructureSpec::plain(8, 2, 2)).unwrap();
        assert_eq!(diameter(&r.to_cells(&p).unwrap()), 3);
    }

    #[test]
    fn spec_json_defaults_and_errors() {
        let s: StructureSpec =
            serde_json::from_str(r#"{"family":"plain","n":5,"d":2,"r":2}"#).unwrap();
        assert_eq!(s, StructureSpec::plain(5, 2, 2));
        let s: StructureSpec =
            serde_json::from_str(r#"{"family":"star","n":5,"d":2,"ell":1,"r":2}"#).unwrap();
        assert_eq!(s.k, 2);
        let round: StructureSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(round, s);
        assert!(serde_json::from_str::<StructureSpec>(r#"{"family":"plain","n":5,"d":2,"ell":1,"r":2}"#).is_err());
        assert!(serde_json::from_str::<StructureSpec>(r#"{"family":"star","n":5,"d":2,"ell":1,"k":3,"r":2}"#).is_err());
        assert!(serde_json::from_str::<StructureSpec>(r#"{"family":"slab","n":5,"d":2,"ell":1,"r":2}"#).is_err());
        assert!(serde_json::from_str::<StructureSpec>(r#"{"family":"slab","n":0,"d":2,"ell":1,"k":3,"r":2}"#).is_err());
    }

    fn arb_spec() -> impl Strategy<Value = StructureSpec> {
        prop_oneof![
            (1usize..6, 1usize..4, 1usize..4).prop_map(|(n, d, r)| StructureSpec::plain(n, d, r)),
            (1usize..5, 1usize..3, 0usize..3, 1usize..4)
                .prop_map(|(n, d, l, r)| StructureSpec::star(n, d, l, r)),
            (1usize..5, 1usize..3, 0usize..3, 2usize..5, 1usize..4)
                .prop_map(|(n, d, l, k, r)| StructureSpec::slab(n, d, l, k, r)),
        ]
    }

    proptest! {
        #[test]
        fn adjacency_symmetric_and_thresholds_bounded(spec in arb_spec()) {
            let s = Structure::new(spec.clone()).unwrap();
            let lat = s.lattice();
            for v in 0..lat.len() {
                let t = s.threshold_at(v) as usize;
                prop_assert!(spec.r <= t && t <= spec.r + spec.ell);
                let nv = lat.neighbors(v);
                prop_assert!(nv.len() <= 2 * lat.rank());
                for w in nv {
                    prop_assert!(lat.neighbors(w).contains(&v));
                }
            }
        }

        #[test]
        fn diameter_matches_pairwise_brute_force(cells in proptest::collection::vec(0usize..36, 0..12)) {
            let l = Arc::new(Lattice::new(vec![6, 6]).unwrap());
            let set = CellSet::from_indices(&l, cells);
            for comp in components(&set) {
                let members: Vec<Vec<usize>> = comp.coords().map(|c| c.0).collect();
                let mut brute = 0;
                for x in &members {
                    for y in &members {
                        let linf = x.iter().zip(y).map(|(a, b)| a.abs_diff(*b)).max().unwrap();
                        brute = brute.max(linf + 1);
                    }
                }
                prop_assert_eq!(diameter(&comp), brute);
            }
        }
    }
}
