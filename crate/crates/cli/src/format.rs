/// `x` with `sig` significant digits in positional notation.
pub fn significant(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (sig as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Number of decimals that resolves a tolerance: 1e-8 → 8.
pub fn decimals_for_tol(tol: f64) -> usize {
    (-tol.log10()).ceil().clamp(1.0, 15.0) as usize
}
