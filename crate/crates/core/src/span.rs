//! The span `⟨A⟩`: bounding rectangles of the connected components of the
//! projected closure, and witnesses built from the merge history.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dynamics::{closure, run_closure, Thresholds};
use crate::error::{Error, Result};
use crate::structures::{self, CellSet, Rectangle, Structure};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanResult {
    /// Sorted; one entry per component of `Π([A])`.
    pub rectangles: Vec<Rectangle>,
    /// Every rectangle formed by the merge algorithm, in creation order.
    /// Empty for [`span_direct`].
    pub creation_log: Vec<Rectangle>,
}

fn shadow_rectangles(s: &Structure, closed: &CellSet) -> Vec<Rectangle> {
    let shadow = structures::projection(s, closed);
    let mut rects: Vec<Rectangle> = structures::components(&shadow)
        .iter()
        .filter_map(Rectangle::bounding)
        .collect();
    rects.sort();
    rects
}

/// `⟨A⟩` straight from the definition.
pub fn span_direct(s: &Structure, a: &CellSet) -> SpanResult {
    SpanResult {
        rectangles: shadow_rectangles(s, &closure(s, a)),
        creation_log: Vec::new(),
    }
}

/// How operation (b) of the merge algorithm looks for a triggering subset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SubsetSearch {
    /// Derive candidate subsets from the vertices that border two or more
    /// pieces. Exact once no pair of pieces touches.
    #[default]
    Proximity,
    /// Try every `t`-subset in lexicographic order, recomputing the joint
    /// closure each time. Exponential; for cross-checking on small inputs.
    Exhaustive,
}

struct Piece {
    closed: CellSet,
    shadow: CellSet,
    /// `shadow` plus its horizontal neighbours.
    halo: CellSet,
}

impl Piece {
    fn new(s: &Structure, closed: CellSet) -> Self {
        let shadow = structures::projection(s, &closed);
        let hl = s.horizontal();
        let mut halo = shadow.clone();
        for h in shadow.iter() {
            hl.for_each_neighbor(h, |w| {
                halo.insert(w);
            });
        }
        Piece { closed, shadow, halo }
    }

    fn rectangle(&self) -> Rectangle {
        Rectangle::bounding(&self.shadow).expect("pieces are nonempty")
    }

    fn touches(&self, other: &Piece) -> bool {
        !self.halo.is_disjoint(&other.shadow)
    }
}

fn merge(s: &Structure, pieces: &mut Vec<Piece>, chosen: &[usize]) -> Rectangle {
    let mut seed = pieces[chosen[0]].closed.clone();
    for &j in &chosen[1..] {
        seed.union_with(&pieces[j].closed);
    }
    let merged = Piece::new(s, closure(s, &seed));
    let rect = merged.rectangle();
    for &j in chosen[1..].iter().rev() {
        pieces.remove(j);
    }
    pieces[chosen[0]] = merged;
    rect
}

fn find_touching_pair(pieces: &[Piece]) -> Option<[usize; 2]> {
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            if pieces[i].touches(&pieces[j]) {
                return Some([i, j]);
            }
        }
    }
    None
}

/// Smallest triggering subset, lexicographically least among those of
/// minimal size. Assumes pairwise non-touching pieces, so closures are
/// disjoint and a vertex bordering a closure lies in no other closure.
fn find_trigger_proximity(s: &Structure, pieces: &[Piece], max_t: usize) -> Option<Vec<usize>> {
    const NONE: u32 = u32::MAX;
    let lat = s.lattice();
    let mut owner = vec![NONE; lat.len()];
    for (i, p) in pieces.iter().enumerate() {
        for v in p.closed.iter() {
            owner[v] = i as u32;
        }
    }
    let mut best: Option<Vec<usize>> = None;
    let mut contrib: Vec<(usize, u32)> = Vec::with_capacity(lat.max_degree());
    let mut visited = CellSet::empty(lat);
    for p in pieces {
        for v in p.closed.iter() {
            lat.for_each_neighbor(v, |w| {
                if owner[w] != NONE || !visited.insert(w) {
                    return;
                }
                contrib.clear();
                lat.for_each_neighbor(w, |u| {
                    let o = owner[u];
                    if o == NONE {
                        return;
                    }
                    match contrib.iter_mut().find(|(pi, _)| *pi == o as usize) {
                        Some(e) => e.1 += 1,
                        None => contrib.push((o as usize, 1)),
                    }
                });
                consider_vertex(&mut best, &mut contrib, s.threshold_at(w), max_t);
            });
        }
    }
    best
}

fn consider_vertex(best: &mut Option<Vec<usize>>, contrib: &mut [(usize, u32)], need: u32, max_t: usize) {
    if contrib.len() < 2 {
        return;
    }
    contrib.sort_unstable();
    let m = contrib.len();
    let limit = best.as_ref().map_or(max_t, |b| b.len()).min(m);
    for t in 2..=limit {
        // Subsets of size t in lexicographic order of piece index.
        let mut idx: Vec<usize> = (0..t).collect();
        loop {
            let sum: u32 = idx.iter().map(|&i| contrib[i].1).sum();
            if sum >= need {
                let cand: Vec<usize> = idx.iter().map(|&i| contrib[i].0).collect();
                let better = match best {
                    None => true,
                    Some(b) => cand.len() < b.len() || (cand.len() == b.len() && cand < *b),
                };
                if better {
                    *best = Some(cand);
                }
                return;
            }
            if !next_combination(&mut idx, m) {
                break;
            }
        }
    }
}

fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let t = idx.len();
    let mut i = t;
    while i > 0 {
        i -= 1;
        if idx[i] < m - t + i {
            idx[i] += 1;
            for j in i + 1..t {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn find_trigger_exhaustive(s: &Structure, pieces: &[Piece], max_t: usize) -> Option<Vec<usize>> {
    let m = pieces.len();
    for t in 2..=max_t.min(m) {
        let mut idx: Vec<usize> = (0..t).collect();
        loop {
            let mut union = pieces[idx[0]].closed.clone();
            for &j in &idx[1..] {
                union.union_with(&pieces[j].closed);
            }
            let joint = run_closure(Thresholds::PerVertex(s.thresholds()), None, &union);
            if joint.len() > union.len() {
                return Some(idx);
            }
            if !next_combination(&mut idx, m) {
                break;
            }
        }
    }
    None
}

/// `⟨A⟩` by iterative merging, starting from the singletons of `A`.
///
/// Each round merges the first pair of pieces whose projected closures
/// touch; failing that, the smallest group of `2 ≤ t ≤ r + ℓ` pieces whose
/// joint closure is larger than the union of their closures. The log records
/// every rectangle formed, singletons included.
pub fn span_main_algorithm(s: &Structure, a: &CellSet) -> SpanResult {
    span_main_algorithm_with(s, a, SubsetSearch::default())
}

pub fn span_main_algorithm_with(s: &Structure, a: &CellSet, search: SubsetSearch) -> SpanResult {
    let max_t = s.spec().r + s.spec().ell;
    let mut log = Vec::new();
    let mut pieces: Vec<Piece> = a
        .iter()
        .map(|v| {
            let p = Piece::new(s, closure(s, &CellSet::from_indices(s.lattice(), [v])));
            log.push(p.rectangle());
            p
        })
        .collect();
    while pieces.len() > 1 {
        let chosen = match find_touching_pair(&pieces) {
            Some(pair) => pair.to_vec(),
            None => {
                let found = match search {
                    SubsetSearch::Proximity => find_trigger_proximity(s, &pieces, max_t),
                    SubsetSearch::Exhaustive => find_trigger_exhaustive(s, &pieces, max_t),
                };
                match found {
                    Some(c) => c,
                    None => break,
                }
            }
        };
        log.push(merge(s, &mut pieces, &chosen));
    }
    let mut rectangles: Vec<Rectangle> = pieces.iter().map(Piece::rectangle).collect();
    rectangles.sort();
    SpanResult { rectangles, creation_log: log }
}

/// `R ∈ ⟨A ∩ R⟩`.
pub fn internally_spans(s: &Structure, r: &Rectangle, a: &CellSet) -> Result<bool> {
    r.check_in(s)?;
    let inside = r.restrict(s, a);
    if inside.is_empty() {
        return Ok(false);
    }
    Ok(span_direct(s, &inside).rectangles.contains(r))
}

/// An internally spanned rectangle with `L ≤ long(R) ≤ 2L`, taken from the
/// merge algorithm's creation log. One exists whenever the projected
/// closure has a component of width at least `L`.
pub fn find_spanned_rectangle(s: &Structure, a: &CellSet, l: usize) -> Result<Option<Rectangle>> {
    if l == 0 {
        return Err(Error::domain("L must be at least 1"));
    }
    for r in span_main_algorithm(s, a).creation_log {
        if (l..=2 * l).contains(&r.long()) && internally_spans(s, &r, a)? {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Disjoint sets with a running bounding box per root.
struct BoxedDsu {
    parent: Vec<u32>,
    lo: Vec<Vec<usize>>,
    hi: Vec<Vec<usize>>,
}

impl BoxedDsu {
    fn new(len: usize) -> Self {
        BoxedDsu {
            parent: (0..len as u32).collect(),
            lo: vec![Vec::new(); len],
            hi: vec![Vec::new(); len],
        }
    }

    fn make(&mut self, v: usize, coord: Vec<usize>) {
        self.parent[v] = v as u32;
        self.lo[v] = coord.clone();
        self.hi[v] = coord;
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] as usize != v {
            let p = self.parent[v] as usize;
            self.parent[v] = self.parent[p];
            v = p;
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[drop] = keep as u32;
        let (lo, hi) = (std::mem::take(&mut self.lo[drop]), std::mem::take(&mut self.hi[drop]));
        for i in 0..lo.len() {
            self.lo[keep][i] = self.lo[keep][i].min(lo[i]);
            self.hi[keep][i] = self.hi[keep][i].max(hi[i]);
        }
        keep
    }

    fn extent(&mut self, v: usize) -> usize {
        let r = self.find(v);
        self.lo[r].iter().zip(&self.hi[r]).map(|(a, b)| b - a + 1).max().unwrap_or(0)
    }
}

/// Grows `start` one cell at a time until the closure of `start ∪ seeds`
/// is reached: the next cell is always the least (canonical order) member
/// of `seeds` not yet present or uninfected cell with enough infected
/// neighbours. Returns the first component to reach diameter in `[L, 2L]`.
fn grow_until_witness(s: &Structure, start: &CellSet, seeds: &CellSet, l: usize) -> Option<CellSet> {
    let lat = s.lattice();
    let mut current = start.clone();
    let mut dsu = BoxedDsu::new(lat.len());
    let mut counts = vec![0u32; lat.len()];
    let mut eligible: BTreeSet<usize> = seeds.iter().filter(|&v| !current.contains(v)).collect();
    for v in current.iter() {
        dsu.make(v, lat.coord_of(v).0);
    }
    for v in current.iter() {
        lat.for_each_neighbor(v, |w| {
            if current.contains(w) {
                dsu.union(v, w);
            } else {
                counts[w] += 1;
                if counts[w] >= s.threshold_at(w) {
                    eligible.insert(w);
                }
            }
        });
    }
    while let Some(x) = eligible.pop_first() {
        current.insert(x);
        dsu.make(x, lat.coord_of(x).0);
        lat.for_each_neighbor(x, |w| {
            if current.contains(w) {
                dsu.union(x, w);
            } else {
                counts[w] += 1;
                if counts[w] >= s.threshold_at(w) {
                    eligible.insert(w);
                }
            }
        });
        if (l..=2 * l).contains(&dsu.extent(x)) {
            return Some(component_of(&current, x));
        }
    }
    None
}

fn component_of(cells: &CellSet, start: usize) -> CellSet {
    let lat = cells.lattice();
    let mut comp = CellSet::from_indices(lat, [start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        lat.for_each_neighbor(v, |w| {
            if cells.contains(w) && comp.insert(w) {
                stack.push(w);
            }
        });
    }
    comp
}

/// `X ⊆ [A ∩ X]`.
pub fn is_internally_filled(s: &Structure, x: &CellSet, a: &CellSet) -> bool {
    let mut inside = a.clone();
    inside.intersect_with(x);
    x.is_subset(&closure(s, &inside))
}

/// A connected, internally filled set `X` with `L ≤ diam(X) ≤ 2L`.
///
/// Components of `A` itself are tried first, then the closure is replayed
/// one infection at a time from `A`. If `A` already holds a component wider
/// than `2L`, the replay restarts from the empty set with the cells of `A`
/// added in as they come up in canonical order, which always yields a
/// witness when `diam([A]) ≥ L`.
pub fn find_spanned_component(s: &Structure, a: &CellSet, l: usize) -> Result<Option<CellSet>> {
    if l == 0 {
        return Err(Error::domain("L must be at least 1"));
    }
    let verified = |x: CellSet| {
        debug_assert!(structures::components(&x).len() == 1);
        is_internally_filled(s, &x, a).then_some(x)
    };
    for comp in structures::components(a) {
        if (l..=2 * l).contains(&structures::diameter(&comp)) {
            return Ok(verified(comp));
        }
    }
    if let Some(x) = grow_until_witness(s, a, &s.empty_set(), l) {
        return Ok(verified(x));
    }
    Ok(grow_until_witness(s, &s.empty_set(), a, l).and_then(verified))
}
