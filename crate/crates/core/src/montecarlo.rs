//! Seeded Monte Carlo estimation.
//!
//! Trial `i` of a run with master seed `s` draws from ChaCha8 keyed by `s`
//! on stream `i`, so every trial is a pure function of `(s, i)` and results
//! do not depend on how trials are scheduled across threads. Configurations
//! are sampled with one uniform per vertex in canonical order, which couples
//! runs at different `p` that share a seed: each trial's occupied set only
//! grows with `p`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, CrossDirection, Orientation};
use crate::error::{Error, Result};
use crate::span;
use crate::structures::{CellSet, Family, Rectangle, Structure, StructureSpec};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Includes each member of `region` independently with probability `p`,
/// drawing one uniform per member in canonical order.
pub fn sample_bin(region: &CellSet, p: f64, rng: &mut impl Rng) -> Result<CellSet> {
    check_probability(p)?;
    let mut out = CellSet::empty(region.lattice());
    for v in region.iter() {
        if rng.gen::<f64>() < p {
            out.insert(v);
        }
    }
    Ok(out)
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability must lie in [0, 1], got {p}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventKind {
    Percolates,
    SemiPercolates,
    /// `R ∈ ⟨A⟩`.
    Spans { rect: Rectangle },
    Crossed { rect: Rectangle, direction: CrossDirection },
    SemiCrossed { rect: Rectangle, axis: usize },
    /// Some rectangle of `⟨A⟩` has a side of at least `length`.
    LongSpanAtLeast { length: usize },
}

fn rect_label(r: &Rectangle) -> String {
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-");
    format!("{}..{}", join(r.lo()), join(r.hi()))
}

impl EventKind {
    /// Short comma-free label used in CSV output.
    pub fn label(&self) -> String {
        match self {
            EventKind::Percolates => "percolates".into(),
            EventKind::SemiPercolates => "semi_percolates".into(),
            EventKind::Spans { rect } => format!("spans[{}]", rect_label(rect)),
            EventKind::Crossed { rect, direction } => {
                let sign = match direction.orientation {
                    Orientation::Forward => '+',
                    Orientation::Backward => '-',
                };
                format!("crossed[{};axis{}{}]", rect_label(rect), direction.axis, sign)
            }
            EventKind::SemiCrossed { rect, axis } => {
                format!("semi_crossed[{};axis{}]", rect_label(rect), axis)
            }
            EventKind::LongSpanAtLeast { length } => format!("long_span_at_least[{length}]"),
        }
    }

    /// Parses the short command-line forms `percolates`, `semi-percolates`
    /// and `long-span=N`, or a JSON object.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('{') {
            return serde_json::from_str(t).map_err(|e| Error::Parse(format!("event: {e}")));
        }
        match t.replace('-', "_").as_str() {
            "percolates" => Ok(EventKind::Percolates),
            "semi_percolates" => Ok(EventKind::SemiPercolates),
            other => match other.strip_prefix("long_span=") {
                Some(n) => n
                    .parse()
                    .map(|length| EventKind::LongSpanAtLeast { length })
                    .map_err(|_| Error::Parse(format!("event: bad length in `{t}`"))),
                None => Err(Error::Parse(format!(
                    "event: unknown kind `{t}` (expected percolates, semi-percolates, long-span=N or JSON)"
                ))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    pub kind: EventKind,
    pub structure: StructureSpec,
}

/// An [`EventSpec`] checked against its structure.
#[derive(Clone, Debug)]
pub struct Event {
    kind: EventKind,
    structure: Structure,
}

impl Event {
    pub fn new(spec: &EventSpec) -> Result<Self> {
        let structure = Structure::new(spec.structure.clone())?;
        let family = structure.spec().family;
        let d = structure.spec().d;
        let need = |want: Family, what: &str| {
            if family == want {
                Ok(())
            } else {
                Err(Error::domain(format!("{what} requires a {want:?} structure, got {family:?}")))
            }
        };
        match &spec.kind {
            EventKind::Percolates => {}
            EventKind::SemiPercolates => need(Family::Star, "semi_percolates")?,
            EventKind::Spans { rect } => rect.check_in(&structure)?,
            EventKind::Crossed { rect, direction } => {
                need(Family::Slab, "crossed")?;
                rect.check_in(&structure)?;
                if direction.axis == 0 || direction.axis > d {
                    return Err(Error::domain(format!("crossing axis {} out of range", direction.axis)));
                }
            }
            EventKind::SemiCrossed { rect, axis } => {
                need(Family::Star, "semi_crossed")?;
                rect.check_in(&structure)?;
                if *axis == 0 || *axis > d {
                    return Err(Error::domain(format!("semi-crossing axis {axis} out of range")));
                }
            }
            EventKind::LongSpanAtLeast { .. } => {}
        }
        Ok(Event { kind: spec.kind.clone(), structure })
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn occurs(&self, a: &CellSet) -> bool {
        let s = &self.structure;
        match &self.kind {
            EventKind::Percolates => dynamics::percolates(s, a),
            EventKind::SemiPercolates => dynamics::semi_percolates(s, a).expect("checked family"),
            EventKind::Spans { rect } => span::span_direct(s, a).rectangles.contains(rect),
            EventKind::Crossed { rect, direction } => {
                dynamics::is_crossed(s, rect, a, *direction).expect("checked event")
            }
            EventKind::SemiCrossed { rect, axis } => {
                dynamics::is_semi_crossed(s, rect, a, *axis).expect("checked event")
            }
            EventKind::LongSpanAtLeast { length } => span::span_direct(s, a)
                .rectangles
                .iter()
                .any(|r| r.long() >= *length),
        }
    }

    /// Outcome of trial `trial` at density `p`.
    pub fn trial(&self, p: f64, master_seed: u64, trial: u64) -> Result<bool> {
        let mut rng = trial_rng(master_seed, trial);
        let a = sample_bin(&self.structure.full_set(), p, &mut rng)?;
        Ok(self.occurs(&a))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub p_hat: f64,
    pub trials: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub master_seed: u64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64, master_seed: u64) -> Self {
        let p_hat = successes as f64 / trials as f64;
        let (lo, hi) = wilson_interval(successes, trials, Z_95);
        Estimate {
            p_hat,
            trials,
            ci_low: lo.min(p_hat),
            ci_high: hi.max(p_hat),
            master_seed,
        }
    }

    /// Standard error under a hypothesised success probability.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

fn count_parallel(trials: u64, f: impl Fn(u64) -> Result<bool> + Sync) -> Result<u64> {
    (0..trials)
        .into_par_iter()
        .map(|i| f(i).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

pub fn estimate_event_prob(event: &EventSpec, p: f64, trials: u64, master_seed: u64) -> Result<Estimate> {
    estimate_compiled(&Event::new(event)?, p, trials, master_seed)
}

pub fn estimate_compiled(event: &Event, p: f64, trials: u64, master_seed: u64) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    check_probability(p)?;
    let hits = count_parallel(trials, |i| event.trial(p, master_seed, i))?;
    Ok(Estimate::from_counts(hits, trials, master_seed))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PAlphaEstimate {
    /// Midpoint of the final bracket.
    pub p: f64,
    pub bracket_low: f64,
    pub bracket_high: f64,
    pub alpha: f64,
    pub trials_per_eval: u64,
    pub master_seed: u64,
    /// `(p, pHat)` at every bisection midpoint, in evaluation order.
    pub evaluations: Vec<(f64, f64)>,
}

/// Stochastic bisection for `inf{p : P(event) ≥ α}`.
///
/// Every evaluation reuses `master_seed`, so the estimated curve is itself
/// monotone in `p` and the bisection is consistent. The result is the
/// empirical crossing point of that curve, not a guaranteed bound on the
/// true one.
pub fn estimate_p_alpha(
    event: &EventSpec,
    alpha: f64,
    trials_per_eval: u64,
    master_seed: u64,
    p_tol: f64,
) -> Result<PAlphaEstimate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(p_tol > 0.0) {
        return Err(Error::domain(format!("ptol must be positive, got {p_tol}")));
    }
    let compiled = Event::new(event)?;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut evaluations = Vec::new();
    while hi - lo >= p_tol {
        let mid = 0.5 * (lo + hi);
        let est = estimate_compiled(&compiled, mid, trials_per_eval, master_seed)?;
        evaluations.push((mid, est.p_hat));
        if est.p_hat >= alpha {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(PAlphaEstimate {
        p: 0.5 * (lo + hi),
        bracket_low: lo,
        bracket_high: hi,
        alpha,
        trials_per_eval,
        master_seed,
        evaluations,
    })
}

/// Direct simulation of the no-L-gap event: `U_1..U_{m+1}` and, for each
/// slot `i ≤ m`, side events `V_i^{(1..ℓ)}`, all present independently with
/// probability `u`. Slot `i` is an L-gap when `U_i`, `U_{i+1}` and every
/// `V_i^{(j)}` are absent.
pub fn estimate_lgap(ell: u32, m: u32, u: f64, trials: u64, master_seed: u64) -> Result<Estimate> {
    check_probability(u)?;
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let (m, ell) = (m as usize, ell as usize);
    let hits = count_parallel(trials, |i| {
        let mut rng = trial_rng(master_seed, i);
        let big: Vec<bool> = (0..=m).map(|_| rng.gen::<f64>() < u).collect();
        let mut ok = true;
        for slot in 0..m {
            let side = (0..ell).fold(false, |acc, _| rng.gen::<f64>() < u || acc);
            if !big[slot] && !big[slot + 1] && !side {
                ok = false;
            }
        }
        Ok(ok)
    })?;
    Ok(Estimate::from_counts(hits, trials, master_seed))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub structure: StructureSpec,
    pub event: EventKind,
    pub p: Vec<f64>,
    pub trials: u64,
}

/// A batch of estimates. Every grid point uses `master_seed`, so rows that
/// differ only in `p` are coupled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<std::path::PathBuf>,
    pub grid: Vec<SweepBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: Family,
    pub n: usize,
    pub d: usize,
    pub ell: usize,
    pub k: usize,
    pub r: usize,
    pub event: String,
    pub p: f64,
    pub trials: u64,
    #[serde(rename = "pHat")]
    pub p_hat: f64,
    #[serde(rename = "ciLow")]
    pub ci_low: f64,
    #[serde(rename = "ciHigh")]
    pub ci_high: f64,
    pub seed: u64,
}

pub const SWEEP_COLUMNS: [&str; 13] = [
    "family", "n", "d", "ell", "k", "r", "event", "p", "trials", "pHat", "ciLow", "ciHigh", "seed",
];

/// Evaluates every grid point in order and streams one CSV row per point.
pub fn run_sweep<W: Write>(config: &SweepConfig, out: W) -> Result<Vec<SweepRow>> {
    if config.grid.iter().all(|b| b.p.is_empty()) {
        return Err(Error::domain("sweep grid is empty"));
    }
    let mut writer = csv::Writer::from_writer(out);
    let mut rows = Vec::new();
    let mut index = 0;
    for block in &config.grid {
        let spec = EventSpec { kind: block.event.clone(), structure: block.structure.clone() };
        let label = block.event.label();
        let context = |index: usize, p: f64, e: Error| Error::GridPoint {
            index,
            label: format!("{label} at p={p}"),
            source: Box::new(e),
        };
        let compiled = Event::new(&spec).map_err(|e| context(index, block.p[0], e))?;
        for &p in &block.p {
            let est = estimate_compiled(&compiled, p, block.trials, config.master_seed)
                .map_err(|e| context(index, p, e))?;
            let s = &block.structure;
            let row = SweepRow {
                family: s.family,
                n: s.n,
                d: s.d,
                ell: s.ell,
                k: s.k,
                r: s.r,
                event: label.clone(),
                p,
                trials: est.trials,
                p_hat: est.p_hat,
                ci_low: est.ci_low,
                ci_high: est.ci_high,
                seed: config.master_seed,
            };
            writer.serialize(&row).map_err(|e| context(index, p, csv_error(e)))?;
            writer.flush().map_err(|e| context(index, p, Error::io("sweep output", e)))?;
            rows.push(row);
            index += 1;
        }
    }
    Ok(rows)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("sweep output", io),
        other => Error::Parse(format!("{other:?}")),
    }
}
