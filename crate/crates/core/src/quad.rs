//! Simpson quadrature: adaptive with explicit failure reporting, and a
//! fixed-grid composite rule for deterministic outer integrals.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute
/// tolerance `tol`, with Richardson extrapolation on accepted panels.
///
/// Fails explicitly if the recursion cannot reach the tolerance or the
/// integrand produces a non-finite value.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "quadrature tolerance must be positive (got {tol})"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let value = recurse(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(format!("integral over [{a}, {b}]")))
    }
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let lm = 0.5 * (a + mid);
    let rm = 0.5 * (mid + b);
    let flm = f(lm);
    let frm = f(rm);
    if !flm.is_finite() || !frm.is_finite() {
        return Err(Error::NonFinite(format!("integrand at {lm} or {rm}")));
    }
    let left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureFailure(format!(
            "panel [{a}, {b}] still has error estimate {:.3e} above tolerance {:.3e} \
             at maximum recursion depth",
            delta.abs() / 15.0,
            tol
        )));
    }
    let lv = recurse(f, a, mid, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let rv = recurse(f, mid, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(lv + rv)
}

/// Composite Simpson rule on a fixed grid of `points` samples (odd, >= 3).
///
/// Deterministic by construction: the same grid is evaluated every time.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, points: usize) -> Result<f64> {
    if points < 3 || points % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "composite Simpson needs an odd number of points >= 3 (got {points})"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    let h = (b - a) / (points - 1) as f64;
    let mut sum = 0.0;
    for i in 0..points {
        let x = a + h * i as f64;
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("integrand at {x}")));
        }
        let weight = if i == 0 || i == points - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += weight * v;
    }
    Ok(sum * h / 3.0)
}
