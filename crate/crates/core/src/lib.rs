//! Bootstrap percolation on the grid `[n]^d` and on the thickened structures
//! `[n]^d × [k]^ℓ` whose per-vertex thresholds depend on the thickness layer.
//!
//! The crate is organised bottom-up:
//!
//! * [`structures`]: lattices, thresholds, cell sets, rectangles, components.
//! * [`dynamics`]: closures and the percolation / crossing / double-gap predicates.
//! * [`span`]: the span of a set, computed directly and by iterative merging,
//!   plus witnesses for internally spanned rectangles and filled components.
//! * [`analytic`]: the growth root `β_k`, `g_k`, the constants `λ(d, r)` and the
//!   exact no-L-gap recurrence.
//! * [`montecarlo`]: seeded, order-independent Monte Carlo estimation and sweeps.
//! * [`grid`]: the JSON file format shared with the command line front end.

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod montecarlo;
pub mod span;
pub mod structures;

pub use error::{Error, Result};
