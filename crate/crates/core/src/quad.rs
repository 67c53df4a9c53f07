//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 7/15-point Gauss–Kronrod pair with global adaptive bisection, plus
//! helpers for half-infinite ranges that split the range into dyadic
//! pieces and stop once the tail pieces no longer move the sum.

use alloc::vec::Vec;

// Kronrod nodes (positive half, descending) and weights for K15.
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
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the G7 nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub converged: bool,
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn with_abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self
    }

    pub fn with_rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Quadrature {
    if a == b {
        return Quadrature {
            value: 0.0,
            abs_error: 0.0,
            converged: true,
        };
    }
    let (v, e) = gk15(&f, a, b);
    let mut pieces: Vec<(f64, f64, f64, f64)> = alloc::vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= tol || !total.is_finite() {
            break;
        }
        if pieces.len() >= opts.max_intervals {
            return Quadrature {
                value: total,
                abs_error: err,
                converged: false,
            };
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (lo, hi, pv, pe) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval no longer splittable in floating point
            pieces.push((lo, hi, pv, 0.0));
            err -= pe;
            continue;
        }
        let (lv, le) = gk15(&f, lo, mid);
        let (rv, re) = gk15(&f, mid, hi);
        total += lv + rv - pv;
        err += le + re - pe;
        pieces.push((lo, mid, lv, le));
        pieces.push((mid, hi, rv, re));
    }
    // recompute from pieces to shed accumulated cancellation error
    let value: f64 = pieces.iter().map(|p| p.2).sum();
    let abs_error: f64 = pieces.iter().map(|p| p.3).sum();
    Quadrature {
        value,
        abs_error,
        converged: value.is_finite(),
    }
}

/// Integrate over a list of consecutive breakpoints.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], opts: QuadOptions) -> Quadrature {
    let mut out = Quadrature {
        value: 0.0,
        abs_error: 0.0,
        converged: true,
    };
    for w in breaks.windows(2) {
        let q = integrate(&f, w[0], w[1], opts);
        out.value += q.value;
        out.abs_error += q.abs_error;
        out.converged &= q.converged;
    }
    out
}

/// Integrate `f` over `[a, upper]` where `upper` may be infinite, using dyadic
/// pieces `[a, a+1], [a+1, a+2], [a+2, a+4], ...`.
///
/// The tail is considered exhausted once three consecutive pieces each
/// contribute less than `opts.rel_tol * |sum|` (and less than `opts.abs_tol`).
pub fn integrate_dyadic<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    upper: f64,
    opts: QuadOptions,
) -> Quadrature {
    let mut out = Quadrature {
        value: 0.0,
        abs_error: 0.0,
        converged: true,
    };
    let mut lo = a;
    let mut width = 1.0;
    let mut quiet = 0;
    let piece_opts = QuadOptions {
        abs_tol: opts.abs_tol * 0.01,
        ..opts
    };
    for _ in 0..2000 {
        if lo >= upper {
            return out;
        }
        let hi = (lo + width).min(upper);
        let q = integrate(&f, lo, hi, piece_opts);
        out.value += q.value;
        out.abs_error += q.abs_error;
        out.converged &= q.converged;
        if !out.value.is_finite() {
            out.converged = false;
            return out;
        }
        let small = q.value.abs() <= opts.abs_tol * 0.01
            || q.value.abs() <= opts.rel_tol * out.value.abs();
        if small {
            quiet += 1;
            if quiet >= 3 && upper.is_infinite() {
                return out;
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        if lo - a >= 1.0 {
            width = lo - a;
        }
        if lo > 1e300 {
            break;
        }
    }
    out.converged = false;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::{exp, pow, sin};

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| x * x * x - 2.0 * x, 0.0, 3.0, QuadOptions::default());
        assert!((q.value - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
        assert!(q.converged);
    }

    #[test]
    fn oscillatory_and_singular() {
        let q = integrate(|x| sin(10.0 * x), 0.0, core::f64::consts::PI, QuadOptions::default());
        assert!(q.value.abs() < 1e-10);
        // integrable endpoint singularity
        let q = integrate(|x| pow(x, -0.5), 0.0, 1.0, QuadOptions::default());
        assert!((q.value - 2.0).abs() < 1e-8, "{}", q.value);
    }

    #[test]
    fn dyadic_heavy_tail() {
        // int_0^inf 0.7 (1+y)^{-1.7} dy = 1
        let q = integrate_dyadic(|y| 0.7 * pow(1.0 + y, -1.7), 0.0, f64::INFINITY, QuadOptions::default());
        assert!((q.value - 1.0).abs() < 1e-9, "{}", q.value);
        let q = integrate_dyadic(|y| exp(-y), 0.0, f64::INFINITY, QuadOptions::default());
        assert!((q.value - 1.0).abs() < 1e-12);
    }
}
