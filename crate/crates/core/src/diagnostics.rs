//! Numerical checks of the tail hypotheses: the Doney integral condition,
//! local subexponentiality, the window growth condition and slowly varying
//! normalizations of simulated tails.
//!
//! Limits cannot be certified numerically; each check evaluates a finite
//! ladder and summarizes the trend as a [`Verdict`].

use alloc::vec::Vec;
use libm::{log, log10, pow, sqrt};

use crate::error::{Error, Result};
use crate::model::{Df, TailSpec, TiltedLaw};
use crate::quad::{integrate_pieces, QuadOptions};
use crate::sampler::TailEstimate;
use crate::stats::{slope, weighted_line};

/// Ladders spanning fewer decades than this are always inconclusive.
pub const MIN_DECADES: f64 = 2.0;

/// Default delta ladder for the Doney functional.
pub const DONEY_DELTAS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

/// Default x ladder for the sweeps: `10^2 .. 10^5`.
pub const X_LADDER: [f64; 4] = [1e2, 1e3, 1e4, 1e5];

/// Largest deviation from one accepted at the top of a subexponential ladder.
pub const SUBEXP_TOL: f64 = 0.05;

/// Largest log-log slope of the normalized tail counted as flat.
pub const SLOPE_TOL: f64 = 0.1;

/// Thresholds with fewer exceedances are left out of tail fits.
pub const MIN_EXCEEDANCES: u64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Inconsistent => "inconsistent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// One evaluated ladder point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepRow {
    pub x: f64,
    /// Secondary parameter (`delta`, probe shift or window width); NaN if unused.
    pub param: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepReport {
    pub check: &'static str,
    pub rows: Vec<SweepRow>,
    pub last_value: f64,
    /// Fitted slope of the summary trend (meaning depends on the check).
    pub slope: f64,
    pub verdict: Verdict,
}

fn decades(xs: &[f64]) -> f64 {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo > 0.0 && hi > lo {
        log10(hi / lo)
    } else {
        0.0
    }
}

/// `x H(x) int_1^{delta x} h(x - y) / (y H(y)^2) dy`, with `H` the survival
/// function and `h` the density of `spec`.
pub fn doney_functional(spec: &TailSpec, x: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidParameter("delta must lie in (0, 1/2)"));
    }
    if !(x > 2.0) {
        return Err(Error::InvalidParameter("x must exceed 2"));
    }
    let top = delta * x;
    if top <= 1.0 {
        return Ok(0.0);
    }
    if let Some(&(location, _)) = spec.atoms().iter().find(|(l, _)| *l > x - top && *l < x - 1.0) {
        return Err(Error::NoDensity { location });
    }
    let integrand = |y: f64| {
        let s = spec.sf(y);
        spec.density(x - y) / (y * s * s)
    };
    // geometric breaks: the 1/y factor varies over many scales
    let mut breaks = alloc::vec![1.0];
    let mut b = 2.0;
    while b < top {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(top);
    let q = integrate_pieces(integrand, &breaks, QuadOptions::default().with_abs_tol(0.0).with_rel_tol(1e-10));
    Ok(x * spec.sf(x) * q.value)
}

/// Doney functional over an `x` ladder and a `delta` ladder.
///
/// `slope` is the fitted exponent of the value in `delta` at the largest `x`.
/// Consistent when the value falls as `delta` shrinks at every `x` and, for
/// the smallest `delta`, at most doubles over the last step of the `x` ladder.
pub fn doney_sweep(spec: &TailSpec, xs: &[f64], deltas: &[f64]) -> Result<SweepReport> {
    if xs.is_empty() || deltas.len() < 2 {
        return Err(Error::InvalidParameter("need at least one x and two deltas"));
    }
    let mut rows = Vec::with_capacity(xs.len() * deltas.len());
    for &x in xs {
        for &d in deltas {
            rows.push(SweepRow {
                x,
                param: d,
                value: doney_functional(spec, x, d)?,
            });
        }
    }
    let nd = deltas.len();
    let top = &rows[rows.len() - nd..];
    let (ld, lv): (Vec<f64>, Vec<f64>) = top
        .iter()
        .filter(|r| r.value > 0.0)
        .map(|r| (log(r.param), log(r.value)))
        .unzip();
    let exponent = if ld.len() >= 2 { slope(&ld, &lv) } else { f64::NAN };
    let dmin = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let dmax = deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let falls = xs.iter().enumerate().all(|(i, _)| {
        let block = &rows[i * nd..(i + 1) * nd];
        let at = |d: f64| block.iter().find(|r| r.param == d).map_or(f64::NAN, |r| r.value);
        at(dmin) < at(dmax)
    });
    let small: Vec<f64> = rows.iter().filter(|r| r.param == dmin).map(|r| r.value).collect();
    let bounded = small.len() < 2 || small[small.len() - 1] <= 2.0 * small[small.len() - 2];
    let verdict = if decades(xs) < MIN_DECADES {
        Verdict::Inconclusive
    } else if falls && exponent > 0.0 && bounded {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    Ok(SweepReport {
        check: "doney",
        last_value: top[nd - 1].value,
        rows,
        slope: exponent,
        verdict,
    })
}

/// `(H * H)(x, x + t]` by quadrature against `H(dy)`.
fn self_convolution_window(spec: &TailSpec, x: f64, t: f64, scale: f64) -> f64 {
    let opts = QuadOptions::default().with_abs_tol(1e-12 * scale).with_rel_tol(1e-11);
    let phi = |y: f64| spec.window(x - y, t);
    let cuts = [f64::NEG_INFINITY, 0.0, 0.5 * x, x, x + t, f64::INFINITY];
    cuts.windows(2)
        .map(|w| spec.expect_in(phi, w[0], w[1], opts).value)
        .sum()
}

/// Probe shifts for the window-shift ratio.
const SHIFT_PROBES: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

/// Local subexponentiality along an `x` ladder with window `(x, x + t]`:
/// `r1 = (H * H)(x + D) / (2 H(x + D))` and `r2(s) = H(x + s + D) / H(x + D)`.
///
/// Rows carry `r1` (param NaN) and `r2` at each probe shift. `slope` is the
/// log-log slope of the deviation `max(|r1 - 1|, sup |r2 - 1|)`.
pub fn delta_subexp_check(spec: &TailSpec, t: f64, xs: &[f64]) -> Result<SweepReport> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("window width must be positive"));
    }
    if xs.is_empty() {
        return Err(Error::InvalidParameter("empty ladder"));
    }
    let mut rows = Vec::new();
    let mut devs = Vec::with_capacity(xs.len());
    let mut degenerate = false;
    for &x in xs {
        let w = spec.window(x, t);
        if !(w > 0.0) {
            degenerate = true;
            rows.push(SweepRow {
                x,
                param: f64::NAN,
                value: f64::NAN,
            });
            devs.push(f64::INFINITY);
            continue;
        }
        let r1 = self_convolution_window(spec, x, t, w) / (2.0 * w);
        rows.push(SweepRow {
            x,
            param: f64::NAN,
            value: r1,
        });
        let mut dev = (r1 - 1.0).abs();
        for s in SHIFT_PROBES {
            let r2 = spec.window(x + s, t) / w;
            dev = dev.max((r2 - 1.0).abs());
            rows.push(SweepRow { x, param: s, value: r2 });
        }
        devs.push(dev);
    }
    let last = devs[devs.len() - 1];
    let trend = if degenerate || devs.iter().any(|d| !(*d > 0.0)) {
        f64::NAN
    } else {
        let lx: Vec<f64> = xs.iter().map(|x| log(*x)).collect();
        let ly: Vec<f64> = devs.iter().map(|d| log(*d)).collect();
        slope(&lx, &ly)
    };
    let verdict = if degenerate {
        Verdict::Inconsistent
    } else if decades(xs) < MIN_DECADES {
        Verdict::Inconclusive
    } else if trend < 0.0 && last < SUBEXP_TOL {
        Verdict::Consistent
    } else if trend >= 0.0 && last >= SUBEXP_TOL {
        Verdict::Inconsistent
    } else {
        Verdict::Inconclusive
    };
    Ok(SweepReport {
        check: "delta_subexp",
        rows,
        last_value: last,
        slope: trend,
        verdict,
    })
}

/// Growth condition `sup_{y > x} H(y + D) = O(H(x + D))` along an `x` ladder.
///
/// The supremum runs over `y = x + k t / 8` up to `x + 64 t` and a geometric
/// grid up to `10 x`. Rows carry the ratio; `slope` is its log-log slope.
/// Consistent when every ratio is finite and the slope is at most 0.05.
pub fn growth_check<D: Df + ?Sized>(spec: &D, t: f64, xs: &[f64]) -> Result<SweepReport> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("window width must be positive"));
    }
    if xs.is_empty() {
        return Err(Error::InvalidParameter("empty ladder"));
    }
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        let base = spec.window(x, t);
        let mut sup: f64 = 0.0;
        for k in 1..=512 {
            sup = sup.max(spec.window(x + k as f64 * t / 8.0, t));
        }
        let mut y = x + 64.0 * t;
        while y < 10.0 * x.abs().max(1.0) {
            y *= 1.05;
            sup = sup.max(spec.window(y, t));
        }
        let ratio = if base > 0.0 {
            sup / base
        } else if sup > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        rows.push(SweepRow { x, param: t, value: ratio });
    }
    let finite = rows.iter().all(|r| r.value.is_finite());
    let positive: Vec<&SweepRow> = rows.iter().filter(|r| r.value > 0.0).collect();
    let trend = if finite && positive.len() >= 2 {
        let lx: Vec<f64> = positive.iter().map(|r| log(r.x)).collect();
        let ly: Vec<f64> = positive.iter().map(|r| log(r.value)).collect();
        slope(&lx, &ly)
    } else if finite {
        0.0
    } else {
        f64::INFINITY
    };
    let verdict = if decades(xs) < MIN_DECADES {
        Verdict::Inconclusive
    } else if finite && trend <= 0.05 {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    Ok(SweepReport {
        check: "growth",
        last_value: rows[rows.len() - 1].value,
        rows,
        slope: trend,
        verdict,
    })
}

/// Synthetic law with atoms at the squares `k^2`, `k >= 1`, carrying masses
/// proportional to `2^{-k}` for even `k` and `4^{-k}` for odd `k`. The gaps
/// leave most windows empty, so the growth condition fails for every width.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OscillatingToy;

impl OscillatingToy {
    /// Normalizing constant: the raw masses sum to `1/3 + 4/15 = 3/5`.
    const C: f64 = 5.0 / 3.0;

    /// Mass of the atom at `k^2`.
    pub fn mass(k: i64) -> f64 {
        if k < 1 {
            0.0
        } else if k % 2 == 0 {
            Self::C * pow(2.0, -(k as f64))
        } else {
            Self::C * pow(4.0, -(k as f64))
        }
    }

    /// Smallest `k >= 1` with `k^2 > x`.
    fn first_above(x: f64) -> i64 {
        let mut k = if x > 0.0 { sqrt(x) as i64 } else { 0 };
        while k < 1 || ((k * k) as f64) <= x {
            k += 1;
        }
        k
    }
}

impl Df for OscillatingToy {
    fn cdf(&self, x: f64) -> f64 {
        1.0 - self.sf(x)
    }

    fn sf(&self, x: f64) -> f64 {
        let k = Self::first_above(x);
        let even = if k % 2 == 0 { k } else { k + 1 };
        let odd = if k % 2 == 1 { k } else { k + 1 };
        Self::C * (pow(2.0, -(even as f64)) / 0.75 + pow(4.0, -(odd as f64)) / (15.0 / 16.0))
    }

    fn window(&self, x: f64, t: f64) -> f64 {
        let mut k = Self::first_above(x);
        let mut total = 0.0;
        while ((k * k) as f64) <= x + t {
            total += Self::mass(k);
            k += 1;
        }
        total
    }
}

/// Which normalization a tail fit applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FitMode {
    /// `m(log x) x^kappa P{X > x}`.
    CaseI,
    /// `x^kappa P{X > x} / g(log x)`.
    CaseII,
    /// `x^kappa P{X > x}`.
    Classical,
}

impl FitMode {
    /// Normalizing factor at threshold `x`.
    pub fn factor(&self, law: &TiltedLaw, x: f64) -> f64 {
        let t = log(x);
        let p = pow(x, law.kappa);
        match self {
            FitMode::CaseI => law.fkappa.truncated_mean(t) * p,
            FitMode::CaseII => p / law.fkappa.window(t, 1.0),
            FitMode::Classical => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SlowvaryFit {
    /// Rows `(threshold, NaN, normalized)` over the thresholds used in the fit.
    pub sweep: SweepReport,
    pub plateau: f64,
    pub plateau_ci: f64,
    pub plateau_x: f64,
}

/// Normalize an empirical tail and fit its log-log slope (target 0).
///
/// Fills `est.normalized` and `est.normalized_ci` at every threshold. The fit
/// uses thresholds above one with at least [`MIN_EXCEEDANCES`] exceedances,
/// weighted by inverse relative variance. The plateau is the normalized value
/// at the largest such threshold.
pub fn slowvary_fit(est: &mut TailEstimate, law: &TiltedLaw, mode: FitMode) -> Result<SlowvaryFit> {
    est.normalized.clear();
    est.normalized_ci.clear();
    for (i, &x) in est.thresholds.iter().enumerate() {
        let f = if x > 1.0 { mode.factor(law, x) } else { f64::NAN };
        est.normalized.push(f * est.survival[i]);
        est.normalized_ci.push(f * est.ci_halfwidth[i]);
    }
    let used: Vec<usize> = (0..est.thresholds.len())
        .filter(|&i| {
            est.thresholds[i] > 1.0 && est.exceedances[i] >= MIN_EXCEEDANCES && est.normalized[i].is_finite()
        })
        .collect();
    let xs: Vec<f64> = used.iter().map(|&i| est.thresholds[i]).collect();
    let span = decades(&xs);
    if used.len() < 5 || span < 1.5 {
        return Err(Error::InsufficientRange {
            thresholds: used.len(),
            decades: span,
        });
    }
    let lx: Vec<f64> = xs.iter().map(|x| log(*x)).collect();
    let ly: Vec<f64> = used.iter().map(|&i| log(est.normalized[i])).collect();
    let w: Vec<f64> = used
        .iter()
        .map(|&i| {
            let rel = est.normalized_ci[i] / est.normalized[i];
            1.0 / (rel * rel).max(1e-300)
        })
        .collect();
    let (_, s) = weighted_line(&lx, &ly, &w);
    let top = used[used.len() - 1];
    let rows = used
        .iter()
        .map(|&i| SweepRow {
            x: est.thresholds[i],
            param: f64::NAN,
            value: est.normalized[i],
        })
        .collect();
    let verdict = if span < MIN_DECADES {
        Verdict::Inconclusive
    } else if s.abs() < SLOPE_TOL {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    Ok(SlowvaryFit {
        sweep: SweepReport {
            check: "slowvary",
            rows,
            last_value: est.normalized[top],
            slope: s,
            verdict,
        },
        plateau: est.normalized[top],
        plateau_ci: est.normalized_ci[top],
        plateau_x: est.thresholds[top],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_masses_sum_to_one() {
        let total: f64 = (1..200).map(OscillatingToy::mass).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert!((OscillatingToy.sf(0.0) - 1.0).abs() < 1e-14);
        // atoms at 1, 4, 9: sf(4) leaves out the first two
        assert!((OscillatingToy.sf(4.0) - (3..200).map(OscillatingToy::mass).sum::<f64>()).abs() < 1e-15);
        assert_eq!(OscillatingToy.window(4.0, 4.9), 0.0);
        assert_eq!(OscillatingToy.window(4.0, 5.0), OscillatingToy::mass(3));
    }

    #[test]
    fn empty_doney_range_is_zero() {
        let spec = crate::model::catalog::pure_pareto(0.4);
        assert_eq!(doney_functional(&spec, 10.0, 0.05).unwrap(), 0.0);
    }
}
