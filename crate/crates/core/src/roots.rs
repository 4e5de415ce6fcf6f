//! One-dimensional bracketed root finding.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 1e-300, max_iter: 200 }
    }
}

/// Finds a root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` differ in sign.
///
/// Secant steps through the bracket endpoints are taken when they shrink the
/// bracket by at least half; otherwise the step falls back to bisection.
/// Evaluation errors from `f` propagate unchanged.
pub fn find_root(mut f: impl FnMut(f64) -> Result<f64>, lo: f64, hi: f64, opts: RootOptions) -> Result<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::numeric(format!("no sign change on [{a}, {b}]: f = {fa:e}, {fb:e}")));
    }

    let mut use_secant = true;
    for _ in 0..opts.max_iter {
        let width = b - a;
        let scale = a.abs().max(b.abs());
        if width <= opts.rel_tol * scale + opts.abs_tol {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
        let mid = a + 0.5 * width;
        let mut x = mid;
        if use_secant {
            let s = b - fb * (b - a) / (fb - fa);
            if s.is_finite() && s > a && s < b {
                x = s;
            }
        }
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        let before = b - a;
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // Alternate to bisection whenever a secant step stalls on one side.
        use_secant = (b - a) <= 0.5 * before || !use_secant;
    }
    let width = b - a;
    if width <= 1e3 * opts.rel_tol * a.abs().max(b.abs()) + opts.abs_tol {
        return Ok(0.5 * (a + b));
    }
    Err(Error::numeric(format!("root finder exceeded {} iterations, bracket [{a}, {b}]", opts.max_iter)))
}

/// Expands `start` geometrically away from `anchor` until `pred` holds,
/// returning the first point where it does.
pub fn expand_until(
    anchor: f64,
    start: f64,
    max_steps: usize,
    mut pred: impl FnMut(f64) -> Result<bool>,
) -> Result<f64> {
    let mut offset = start - anchor;
    for _ in 0..max_steps {
        let x = anchor + offset;
        if pred(x)? {
            return Ok(x);
        }
        offset *= 2.0;
    }
    Err(Error::numeric(format!("no bracket found expanding from {start} away from {anchor}")))
}
