//! Bracketed root finding: bisection to shrink the bracket, secant to finish.

use crate::error::{Error, Result};

/// Find a root of `f` in `[lo, hi]` given a sign change.
///
/// Bisects until the bracket is below `1e-3` of its initial width, then
/// switches to secant steps that are kept inside the bracket (falling back to
/// bisection when a step escapes). Stops when the bracket or step is below
/// `x_tol`.
pub fn bisect_secant<F>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot { lo, hi });
    }
    let coarse = (hi - lo) * 1e-3;
    while b - a > coarse.max(x_tol) {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let mut x0 = a;
    let mut f0 = fa;
    let mut x1 = b;
    let mut f1 = f(b)?;
    for _ in 0..200 {
        if b - a <= x_tol {
            break;
        }
        let mut x2 = if f1 != f0 {
            x1 - f1 * (x1 - x0) / (f1 - f0)
        } else {
            0.5 * (a + b)
        };
        if !(x2 > a && x2 < b) {
            x2 = 0.5 * (a + b);
        }
        let f2 = f(x2)?;
        if f2 == 0.0 {
            return Ok(x2);
        }
        if f2.signum() == fa.signum() {
            a = x2;
            fa = f2;
        } else {
            b = x2;
        }
        let step = (x2 - x1).abs();
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if step <= x_tol {
            break;
        }
    }
    Ok(x1)
}

/// Find the smallest `x` in `[lo, hi]` with `g(x) >= target` for a
/// nondecreasing `g`; plain bisection to absolute tolerance `x_tol`.
pub fn invert_monotone<G: Fn(f64) -> f64>(g: G, target: f64, lo: f64, hi: f64, x_tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    while b - a > x_tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if g(m) >= target {
            b = m;
        } else {
            a = m;
        }
    }
    b
}
