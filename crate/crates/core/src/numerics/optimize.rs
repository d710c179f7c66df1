use crate::{Error, Result};

const SCAN_POINTS: usize = 11;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` on `[lo, hi]`. An 11-point scan picks the bracket around
/// the best sample, then golden-section search narrows it below `tol`.
/// Returns `(argmax, max)`.
pub fn maximize_scalar(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    try_maximize_scalar(|x| Ok(f(x)), lo, hi, tol)
}

/// As [`maximize_scalar`] for objectives that can fail.
pub fn try_maximize_scalar(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    if !(lo < hi) {
        return Err(Error::Domain(format!("empty search interval [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let spacing = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut best = (0, f64::NEG_INFINITY);
    for k in 0..SCAN_POINTS {
        let value = f(lo + spacing * k as f64)?;
        if value > best.1 {
            best = (k, value);
        }
    }
    let mut a = lo + spacing * best.0.saturating_sub(1) as f64;
    let mut b = (lo + spacing * (best.0 + 1) as f64).min(hi);

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x)?;
    let scan_x = lo + spacing * best.0 as f64;
    if best.1 > fx {
        // Endpoint maxima: the scan sample beats the interior point.
        Ok((scan_x, best.1))
    } else {
        Ok((x, fx))
    }
}
