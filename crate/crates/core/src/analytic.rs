//! Exact and numerical evaluation of the growth root `β_k`, `g_k`, the
//! threshold constants `λ(d, r)` and the no-L-gap recurrence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// Bound on the total absolute error of a `λ` evaluation.
    pub abs_tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_depth: u32,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { abs_tol: 1e-8, max_depth: 60 }
    }
}

impl QuadratureSettings {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadratureSettings { abs_tol, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::domain(format!("absTol must be positive, got {}", self.abs_tol)));
        }
        Ok(())
    }
}

/// Positive root of `x² = b·x + c`, written to avoid cancellation.
fn positive_root(b: f64, c: f64) -> f64 {
    0.5 * (b + (b * b + 4.0 * c).sqrt())
}

/// `β_k(u)`: the root in `[0, 1]` of `β² = (1 − (1−u)^k)·β + u(1−u)^k`.
pub fn beta(k: u32, u: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("beta needs k >= 1"));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::domain(format!("beta needs u in [0, 1], got {u}")));
    }
    // (1 - u)^k without losing digits for small u.
    let tail = (k as f64 * (-u).ln_1p()).exp();
    let b = -(k as f64 * (-u).ln_1p()).exp_m1();
    Ok(positive_root(b, u * tail).clamp(0.0, 1.0))
}

/// `g_k(z) = −log β_k(1 − e^{−z})`, accurate for both tiny and huge `z`.
pub(crate) fn g_unchecked(k: u32, z: f64) -> f64 {
    let kz = k as f64 * z;
    let e = (-kz).exp(); // (1 - u)^k
    let u = -(-z).exp_m1();
    let b = -(-kz).exp_m1();
    let c = u * e;
    let root = positive_root(b, c);
    if root < 0.5 {
        return -root.ln();
    }
    // β − 1 = ((1−e)·x/(1+√(1+x)) − 2e)/2 with x = 4c/(1−e)².
    let x = 4.0 * c / (b * b);
    let s = (1.0 + x).sqrt();
    let beta_minus_one = 0.5 * (b * x / (1.0 + s) - 2.0 * e);
    (-beta_minus_one.ln_1p()).max(0.0)
}

pub fn g(k: u32, z: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("g needs k >= 1"));
    }
    if !(z > 0.0) {
        return Err(Error::domain(format!("g needs z > 0, got {z}")));
    }
    Ok(g_unchecked(k, z))
}

/// `q = −log(1 − p)`.
pub fn q_of_p(p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::domain(format!("q needs p in [0, 1), got {p}")));
    }
    Ok(-(-p).ln_1p())
}

/// Probability that a run of `m` L-gap slots (with `ℓ` side events per slot,
/// every event independently present with probability `u`) has no L-gap.
pub fn l_exact(ell: u32, m: i64, u: f64) -> Result<f64> {
    if m < -1 {
        return Err(Error::domain(format!("l_exact needs m >= -1, got {m}")));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::domain(format!("l_exact needs u in [0, 1], got {u}")));
    }
    let miss_all = ((ell + 1) as f64 * (-u).ln_1p()).exp();
    let (b, c) = (1.0 - miss_all, u * miss_all);
    let (mut prev, mut cur) = (1.0, 1.0);
    for _ in 0..m.max(0) {
        let next = b * cur + c * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

// 15-point Kronrod extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate and |Kronrod − Gauss| on one panel.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Recursive bisection until each panel's error estimate is within its
/// share of `tol`.
pub(crate) fn adaptive_gk(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64> {
    fn go(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32, whole: (f64, f64)) -> Result<f64> {
        let (val, err) = whole;
        if !val.is_finite() {
            return Err(Error::Numeric(format!("non-finite integrand on [{a}, {b}]")));
        }
        if err <= tol {
            return Ok(val);
        }
        if depth == 0 {
            return Err(Error::Numeric(format!(
                "quadrature did not converge on [{a}, {b}]: error estimate {err:e} > {tol:e}"
            )));
        }
        let m = 0.5 * (a + b);
        let left = gk15(f, a, m);
        let right = gk15(f, m, b);
        Ok(go(f, a, m, 0.5 * tol, depth - 1, left)? + go(f, m, b, 0.5 * tol, depth - 1, right)?)
    }
    go(f, a, b, tol, max_depth, gk15(f, a, b))
}

/// `λ(d, r) = ∫_0^∞ g_{r−1}(z^{d−r+1}) dz` for `2 ≤ r ≤ d`.
///
/// The range is split at `z = 1`. On `(0, 1]` the substitution `z = e^{−s}`
/// turns the logarithmic singularity into an exponentially damped linear
/// growth; beyond 1 the integrand is below `2e^{−(r−1)z^{d−r+1}}`. Both
/// infinite tails are cut where these bounds guarantee a remainder under
/// `absTol/4`, and each finite piece gets another `absTol/4`.
pub fn lambda(d: u32, r: u32, settings: &QuadratureSettings) -> Result<f64> {
    settings.validate()?;
    if r < 2 || r > d {
        return Err(Error::domain(format!("lambda needs 2 <= r <= d, got d={d}, r={r}")));
    }
    let k = r - 1;
    let m = (d - r + 1) as f64;
    let kf = k as f64;
    let quarter = settings.abs_tol / 4.0;

    // On (0, 1]: g ≤ m·s/2 + (1 + k)/2 in the s variable, so the tail past S
    // is at most e^{−S}·(m(S + 1)/2 + (1 + k)/2).
    let mut s_max = 1.0f64;
    while (-s_max).exp() * (m * (s_max + 1.0) / 2.0 + (1.0 + kf) / 2.0) > quarter {
        s_max += 1.0;
    }
    let near = |s: f64| g_unchecked(k, (-m * s).exp()) * (-s).exp();
    let inner = adaptive_gk(&near, 0.0, s_max, quarter, settings.max_depth)?;

    // On [1, ∞): g ≤ 2e^{−k·z^m}, whose tail past Z is below
    // 2e^{−k·Z^m} / (k·Z^{m−1}).
    let mut z_max = 1.0f64;
    while 2.0 * (-kf * z_max.powf(m)).exp() / (kf * z_max.powf(m - 1.0)) > quarter {
        z_max += 0.25;
    }
    let far = |z: f64| g_unchecked(k, z.powf(m));
    let outer = adaptive_gk(&far, 1.0, z_max, quarter, settings.max_depth)?;
    Ok(inner + outer)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaEntry {
    pub d: u32,
    pub r: u32,
    pub lambda: f64,
}

/// `λ(d, r)` for every `2 ≤ r ≤ d ≤ d_max`, ordered by `d` then `r`.
pub fn lambda_table(d_max: u32, settings: &QuadratureSettings) -> Result<Vec<LambdaEntry>> {
    if d_max < 2 {
        return Err(Error::domain(format!("lambda table needs dmax >= 2, got {d_max}")));
    }
    let mut out = Vec::new();
    for d in 2..=d_max {
        for r in 2..=d {
            out.push(LambdaEntry { d, r, lambda: lambda(d, r, settings)? });
        }
    }
    Ok(out)
}
