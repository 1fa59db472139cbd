//! Bracketed bisection for the transcendental equations of the bound
//! formulas. Derivative-free, so tangent poles near the bracket ends are
//! harmless as long as the bracket itself avoids them.

use crate::error::{Error, Result};

/// Iteration cap; 200 halvings shrink any bracket far below `f64` spacing.
pub const MAX_BISECTIONS: usize = 200;

/// Finds a root of `f` in `[lo, hi]`, which must bracket a sign change.
/// Stops once the bracket is narrower than `xtol` or `f` vanishes exactly.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo.is_finite() && f_hi.is_finite()) {
        return Err(Error::Numerical(format!(
            "non-finite value at bracket ends [{lo}, {hi}]"
        )));
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Numerical(format!(
            "no sign change on [{lo}, {hi}] (f = {f_lo:e}, {f_hi:e})"
        )));
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scans `[lo, hi]` in `steps` equal cells and bisects the first cell whose
/// ends differ in sign.
pub fn first_root_in<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    steps: usize,
    xtol: f64,
) -> Result<f64> {
    let h = (hi - lo) / steps as f64;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=steps {
        let b = if i == steps { hi } else { lo + h * i as f64 };
        let fb = f(b);
        if fa == 0.0 {
            return Ok(a);
        }
        if fa.is_finite() && fb.is_finite() && fa.signum() != fb.signum() {
            return bisect(&f, a, b, xtol);
        }
        a = b;
        fa = fb;
    }
    Err(Error::Numerical(format!("no root found on [{lo}, {hi}]")))
}
