//! The smoothing transform `g^(s) = int_{-inf}^s e^{-(s-x)} g(x) dx`.

use alloc::vec::Vec;
use libm::{exp, expm1};

use super::grid::{GridFn, GridKind};
use crate::error::{Error, Result};

/// Cell weights for a linear interpolant on `[0, h]`:
/// `int_0^h e^{-(h-t)} (1 - t/h) dt` and `int_0^h e^{-(h-t)} (t/h) dt`.
fn step_weights(h: f64) -> (f64, f64, f64) {
    let decay = exp(-h);
    let one_minus = -expm1(-h);
    let w1 = (h - one_minus) / h;
    let w0 = one_minus - w1;
    (decay, w0, w1)
}

/// Smoothing transform of a pointwise grid function, taken as piecewise
/// linear on its grid and zero outside. Exact at the nodes via
/// `g^(s + h) = e^{-h} g^(s) + int_s^{s+h} e^{-(s+h-x)} g(x) dx`.
pub fn smooth_transform(g: &GridFn) -> Result<GridFn> {
    if g.kind != GridKind::Pointwise {
        return Err(Error::InvalidParameter("smoothing needs a pointwise grid"));
    }
    let (decay, w0, w1) = step_weights(g.h);
    let mut out = Vec::with_capacity(g.len());
    let mut acc = 0.0;
    out.push(acc);
    for w in g.values.windows(2) {
        acc = decay * acc + w0 * w[0] + w1 * w[1];
        out.push(acc);
    }
    Ok(GridFn {
        values: out,
        ..g.clone()
    })
}

/// `int g^` over the whole line, given `g` and its transform on the same grid.
///
/// Each cell is integrated exactly for the linear interpolant of `g`, and
/// the exponential tail past the last node contributes `g^(x_last)`.
pub fn smooth_integral(g: &GridFn, ghat: &GridFn) -> f64 {
    let h = g.h;
    let one_minus = -expm1(-h);
    // int_0^h (1 - e^{-(h - t)}) (t/h) dt and the complementary weight
    let v_total = h - one_minus;
    let w1 = (h - one_minus) / h;
    let v1 = 0.5 * h - w1;
    let v0 = v_total - v1;
    let mut total = 0.0;
    for i in 0..g.len().saturating_sub(1) {
        total += ghat.values[i] * one_minus + v0 * g.values[i] + v1 * g.values[i + 1];
    }
    total + ghat.values.last().copied().unwrap_or(0.0)
}
