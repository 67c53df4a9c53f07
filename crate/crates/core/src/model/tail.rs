//! Parametric laws of `log A` under the tilted measure.
//!
//! A [`TailSpec`] is a two-component mixture: an optional left component on
//! `(-inf, 0]` with an exponentially decaying tail, and a main (right)
//! component that carries the heavy right tail. Left weight `w`, right
//! weight `1 - w`.

use alloc::vec::Vec;
use libm::{exp, expm1, log, pow};

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_dyadic, QuadOptions, Quadrature};
use crate::roots::invert_monotone;
use crate::special::{norm_cdf, norm_pdf, norm_quantile, norm_sf};

/// Distribution function interface shared by [`TailSpec`] and synthetic test laws.
pub trait Df {
    fn cdf(&self, x: f64) -> f64;

    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// Mass of the window `(x, x + t]`, computed without cancellation in the tails.
    fn window(&self, x: f64, t: f64) -> f64 {
        if x >= 0.0 {
            (self.sf(x) - self.sf(x + t)).max(0.0)
        } else {
            (self.cdf(x + t) - self.cdf(x)).max(0.0)
        }
    }
}

/// Left component of `F_kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields))]
pub enum LeftKind {
    None,
    /// Density `weight * rate * e^{rate y}` on `y < 0`.
    ReflectedExp { rate: f64, weight: f64 },
    /// Atom of mass `weight` at `location <= 0`.
    PointMass { location: f64, weight: f64 },
}

/// Main component of `F_kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields))]
pub enum RightKind {
    /// Survival `min(1, scale * (onset + x)^{-alpha})` on `x >= 0`; any
    /// deficit at `x = 0` is an atom at zero.
    Pareto { alpha: f64, scale: f64, onset: f64 },
    /// `log Y ~ N(mu, sigma^2)`; `mu = 0, sigma = 1` gives `F(x) = Phi(log x)`.
    Lognormal { mu: f64, sigma: f64 },
    /// Survival `exp(-x^beta)`.
    Weibull { beta: f64 },
    Exponential { rate: f64 },
    PointMass { location: f64 },
    /// Full Gaussian law; used for classical light-tailed baselines.
    Gaussian { mean: f64, sd: f64 },
}

impl RightKind {
    /// Pareto right part with survival `(1 + x / onset)^{-alpha}`.
    pub fn lomax(alpha: f64, onset: f64) -> Self {
        RightKind::Pareto {
            alpha,
            scale: pow(onset, alpha),
            onset,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            RightKind::Pareto {
                alpha,
                scale,
                onset,
            } => alpha > 0.0 && scale > 0.0 && onset >= 0.0 && alpha.is_finite(),
            RightKind::Lognormal { mu, sigma } => mu.is_finite() && sigma > 0.0,
            RightKind::Weibull { beta } => beta > 0.0 && beta.is_finite(),
            RightKind::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            RightKind::PointMass { location } => location.is_finite(),
            RightKind::Gaussian { mean, sd } => mean.is_finite() && sd > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("right component parameters"))
        }
    }

    /// Smallest point of the continuous support.
    fn support_start(&self) -> f64 {
        match *self {
            RightKind::Pareto {
                alpha,
                scale,
                onset,
            } => (pow(scale, 1.0 / alpha) - onset).max(0.0),
            RightKind::Gaussian { .. } => f64::NEG_INFINITY,
            RightKind::PointMass { location } => location,
            _ => 0.0,
        }
    }

    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            RightKind::Pareto {
                alpha,
                scale,
                onset,
            } => {
                if x < 0.0 {
                    1.0
                } else {
                    (scale * pow(onset + x, -alpha)).min(1.0)
                }
            }
            RightKind::Lognormal { mu, sigma } => {
                if x <= 0.0 {
                    1.0
                } else {
                    norm_sf((log(x) - mu) / sigma)
                }
            }
            RightKind::Weibull { beta } => {
                if x <= 0.0 {
                    1.0
                } else {
                    exp(-pow(x, beta))
                }
            }
            RightKind::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    exp(-rate * x)
                }
            }
            RightKind::PointMass { location } => {
                if x < location {
                    1.0
                } else {
                    0.0
                }
            }
            RightKind::Gaussian { mean, sd } => norm_sf((x - mean) / sd),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            RightKind::Lognormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    norm_cdf((log(x) - mu) / sigma)
                }
            }
            RightKind::Weibull { beta } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -expm1(-pow(x, beta))
                }
            }
            RightKind::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -expm1(-rate * x)
                }
            }
            RightKind::Gaussian { mean, sd } => norm_cdf((x - mean) / sd),
            _ => 1.0 - self.sf(x),
        }
    }

    /// Density of the continuous part (zero at atoms).
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            RightKind::Pareto {
                alpha,
                scale,
                onset,
            } => {
                if x < self.support_start() || x < 0.0 {
                    0.0
                } else {
                    alpha * scale * pow(onset + x, -alpha - 1.0)
                }
            }
            RightKind::Lognormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    norm_pdf((log(x) - mu) / sigma) / (sigma * x)
                }
            }
            RightKind::Weibull { beta } => {
                if x <= 0.0 {
                    0.0
                } else {
                    beta * pow(x, beta - 1.0) * exp(-pow(x, beta))
                }
            }
            RightKind::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * exp(-rate * x)
                }
            }
            RightKind::PointMass { .. } => 0.0,
            RightKind::Gaussian { mean, sd } => norm_pdf((x - mean) / sd) / sd,
        }
    }

    /// Atom of the component, if any.
    pub fn atom(&self) -> Option<(f64, f64)> {
        match *self {
            RightKind::Pareto {
                alpha,
                scale,
                onset,
            } => {
                if onset > 0.0 {
                    let s0 = scale * pow(onset, -alpha);
                    if s0 < 1.0 {
                        return Some((0.0, 1.0 - s0));
                    }
                }
                None
            }
            RightKind::PointMass { location } => Some((location, 1.0)),
            _ => None,
        }
    }

    /// Inverse survival function: the smallest `x` with `sf(x) <= s`.
    pub fn inv_sf(&self, s: f64) -> f64 {
        match *self {
            RightKind::Pareto {
                alpha,
                scale,
                onset,
            } => {
                if s >= (scale * pow(onset, -alpha)).min(1.0) {
                    // atom at zero (or start of support when onset = 0)
                    self.support_start()
                } else {
                    pow(scale / s, 1.0 / alpha) - onset
                }
            }
            RightKind::Lognormal { mu, sigma } => exp(mu - sigma * norm_quantile(s)),
            RightKind::Weibull { beta } => pow(-log(s), 1.0 / beta),
            RightKind::Exponential { rate } => -log(s) / rate,
            RightKind::PointMass { location } => location,
            RightKind::Gaussian { mean, sd } => mean - sd * norm_quantile(s),
        }
    }

    /// Whether the right tail is heavy (all exponential moments infinite).
    pub fn is_heavy(&self) -> bool {
        matches!(
            self,
            RightKind::Pareto { .. } | RightKind::Lognormal { .. } | RightKind::Weibull { .. }
        )
    }

    /// `integral phi dRight` over `y in (lo, hi]`.
    pub fn expect_in<P: Fn(f64) -> f64>(&self, phi: &P, lo: f64, hi: f64, opts: QuadOptions) -> Quadrature {
        let mut acc = Quadrature {
            value: 0.0,
            abs_error: 0.0,
            converged: true,
        };
        if let Some((loc, mass)) = self.atom() {
            if loc > lo && loc <= hi {
                acc.value += mass * phi(loc);
            }
            if matches!(self, RightKind::PointMass { .. }) {
                return acc;
            }
        }
        let add = |acc: &mut Quadrature, q: Quadrature| {
            acc.value += q.value;
            acc.abs_error += q.abs_error;
            acc.converged &= q.converged;
        };
        match *self {
            RightKind::Pareto {
                alpha,
                scale,
                onset,
            } => {
                let a = lo.max(self.support_start());
                if a < hi {
                    let f = |y: f64| phi(y) * alpha * scale * pow(onset + y, -alpha - 1.0);
                    add(&mut acc, integrate_dyadic(f, a, hi, opts));
                }
            }
            RightKind::Lognormal { mu, sigma } => {
                // integrate over z = (log y - mu) / sigma
                let zlo = if lo <= 0.0 {
                    -40.0
                } else {
                    ((log(lo) - mu) / sigma).max(-40.0)
                };
                let zhi = if hi.is_infinite() {
                    40.0
                } else if hi <= 0.0 {
                    -40.0
                } else {
                    ((log(hi) - mu) / sigma).min(40.0)
                };
                if zlo < zhi {
                    let f = |z: f64| phi(exp(mu + sigma * z)) * norm_pdf(z);
                    add(&mut acc, integrate_split(f, zlo, zhi, 1.0, opts));
                }
            }
            RightKind::Weibull { beta } => {
                // v = y^beta, dF = e^{-v} dv
                let vlo = if lo <= 0.0 { 0.0 } else { pow(lo, beta) };
                let vhi = if hi.is_infinite() {
                    f64::INFINITY
                } else if hi <= 0.0 {
                    0.0
                } else {
                    pow(hi, beta)
                };
                if vlo < vhi {
                    let f = |v: f64| phi(pow(v, 1.0 / beta)) * exp(-v);
                    add(&mut acc, integrate_dyadic(f, vlo, vhi.min(800.0), opts));
                }
            }
            RightKind::Exponential { rate } => {
                let a = lo.max(0.0);
                if a < hi {
                    let f = |y: f64| phi(y) * rate * exp(-rate * y);
                    add(&mut acc, integrate_dyadic(f, a, hi, opts));
                }
            }
            RightKind::Gaussian { mean, sd } => {
                let zlo = ((lo - mean) / sd).max(-40.0);
                let zhi = ((hi - mean) / sd).min(40.0);
                if zlo < zhi {
                    let f = |z: f64| phi(mean + sd * z) * norm_pdf(z);
                    add(&mut acc, integrate_split(f, zlo, zhi, 1.0, opts));
                }
            }
            RightKind::PointMass { .. } => {}
        }
        acc
    }
}

/// Integrate on `[a, b]` split into pieces of width `w`.
fn integrate_split<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, w: f64, opts: QuadOptions) -> Quadrature {
    let mut acc = Quadrature {
        value: 0.0,
        abs_error: 0.0,
        converged: true,
    };
    let mut lo = a;
    while lo < b {
        let hi = (lo + w).min(b);
        let q = integrate(&f, lo, hi, QuadOptions {
            abs_tol: opts.abs_tol * 0.01,
            ..opts
        });
        acc.value += q.value;
        acc.abs_error += q.abs_error;
        acc.converged &= q.converged;
        lo = hi;
    }
    acc
}

/// Law of `log A` under the tilted measure.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct TailSpec {
    pub left: LeftKind,
    pub right: RightKind,
}

impl TailSpec {
    pub fn new(left: LeftKind, right: RightKind) -> Result<Self> {
        let spec = TailSpec { left, right };
        spec.validate()?;
        Ok(spec)
    }

    /// Right component only.
    pub fn pure(right: RightKind) -> Result<Self> {
        Self::new(LeftKind::None, right)
    }

    pub fn point_mass(location: f64) -> Self {
        TailSpec {
            left: LeftKind::None,
            right: RightKind::PointMass { location },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.right.validate()?;
        match self.left {
            LeftKind::None => Ok(()),
            LeftKind::ReflectedExp { rate, weight } => {
                if rate > 0.0 && rate.is_finite() && (0.0..=1.0).contains(&weight) {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("reflected exponential rate/weight"))
                }
            }
            LeftKind::PointMass { location, weight } => {
                if location <= 0.0 && (0.0..=1.0).contains(&weight) {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("left point mass must sit at a nonpositive location"))
                }
            }
        }
    }

    pub fn left_weight(&self) -> f64 {
        match self.left {
            LeftKind::None => 0.0,
            LeftKind::ReflectedExp { weight, .. } | LeftKind::PointMass { weight, .. } => weight,
        }
    }

    pub fn right_weight(&self) -> f64 {
        1.0 - self.left_weight()
    }

    fn left_cdf(&self, x: f64) -> f64 {
        match self.left {
            LeftKind::None => 0.0,
            LeftKind::ReflectedExp { rate, weight } => {
                if x < 0.0 {
                    weight * exp(rate * x)
                } else {
                    weight
                }
            }
            LeftKind::PointMass { location, weight } => {
                if x >= location {
                    weight
                } else {
                    0.0
                }
            }
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        let left = match self.left {
            LeftKind::ReflectedExp { rate, weight } if x < 0.0 => weight * rate * exp(rate * x),
            _ => 0.0,
        };
        left + self.right_weight() * self.right.density(x)
    }

    /// All atoms with their masses.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        if let LeftKind::PointMass { location, weight } = self.left {
            if weight > 0.0 {
                out.push((location, weight));
            }
        }
        if let Some((loc, m)) = self.right.atom() {
            let m = m * self.right_weight();
            if m > 0.0 {
                out.push((loc, m));
            }
        }
        out
    }

    /// Total atom mass in `(lo, hi]`.
    pub fn atom_mass_in(&self, lo: f64, hi: f64) -> f64 {
        self.atoms()
            .iter()
            .filter(|(l, _)| *l > lo && *l <= hi)
            .map(|(_, m)| m)
            .sum()
    }

    /// Left and right components occupy ordered half-lines.
    fn components_ordered(&self) -> bool {
        match self.left {
            LeftKind::None => true,
            _ => match self.right {
                RightKind::Gaussian { .. } => false,
                RightKind::PointMass { location } => location >= 0.0,
                _ => true,
            },
        }
    }

    /// Inverse survival: smallest `x` with `sf(x) <= s`, for `s` in (0, 1).
    pub fn inv_sf(&self, s: f64) -> f64 {
        if self.components_ordered() {
            let wr = self.right_weight();
            if s <= wr {
                return self.right.inv_sf(s / wr);
            }
            // left part: cdf(x) = 1 - s <= w
            let c = 1.0 - s;
            match self.left {
                LeftKind::ReflectedExp { rate, weight } => log(c / weight) / rate,
                LeftKind::PointMass { location, .. } => location,
                LeftKind::None => self.right.inv_sf(s),
            }
        } else {
            self.quantile_numeric(1.0 - s)
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        self.inv_sf(1.0 - u)
    }

    fn quantile_numeric(&self, u: f64) -> f64 {
        let mut lo = -1.0;
        let mut hi = 1.0;
        while self.cdf(lo) >= u && lo > -1e300 {
            lo *= 2.0;
        }
        while self.cdf(hi) < u && hi < 1e300 {
            hi *= 2.0;
        }
        invert_monotone(|x| self.cdf(x), u, lo, hi, 1e-12 * (1.0 + hi.abs().max(lo.abs())))
    }

    /// Draw `log A` under the tilted measure by inverse transform.
    pub fn sample<R: rand_core::RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = crate::rng::uniform(rng);
        self.inv_sf(u)
    }

    /// `integral phi dF_kappa` over `(lo, hi]`.
    pub fn expect_in<P: Fn(f64) -> f64>(&self, phi: P, lo: f64, hi: f64, opts: QuadOptions) -> Quadrature {
        let mut acc = self.right.expect_in(&phi, lo, hi, opts);
        acc.value *= self.right_weight();
        acc.abs_error *= self.right_weight();
        match self.left {
            LeftKind::None => {}
            LeftKind::PointMass { location, weight } => {
                if location > lo && location <= hi {
                    acc.value += weight * phi(location);
                }
            }
            LeftKind::ReflectedExp { rate, weight } => {
                // s = -y in [max(0, -hi), -lo)
                let slo = (-hi).max(0.0);
                let shi = -lo;
                if slo < shi {
                    let f = |s: f64| phi(-s) * weight * rate * exp(-rate * s);
                    let q = integrate_dyadic(f, slo, shi, opts);
                    acc.value += q.value;
                    acc.abs_error += q.abs_error;
                    acc.converged &= q.converged;
                }
            }
        }
        acc
    }

    /// `integral phi dF_kappa` over the whole line.
    pub fn expect<P: Fn(f64) -> f64>(&self, phi: P) -> Quadrature {
        self.expect_in(phi, f64::NEG_INFINITY, f64::INFINITY, QuadOptions::default())
    }

    /// `integral e^{-kappa y} F_kappa(dy)`; closed forms where available.
    pub fn tilt_integral(&self, kappa: f64) -> Result<f64> {
        let left = match self.left {
            LeftKind::None => 0.0,
            LeftKind::ReflectedExp { rate, weight } => {
                if weight == 0.0 {
                    0.0
                } else if rate <= kappa {
                    f64::INFINITY
                } else {
                    weight * rate / (rate - kappa)
                }
            }
            LeftKind::PointMass { location, weight } => weight * exp(-kappa * location),
        };
        let right = match self.right {
            RightKind::Exponential { rate } => rate / (rate + kappa),
            RightKind::PointMass { location } => exp(-kappa * location),
            RightKind::Gaussian { mean, sd } => exp(-kappa * mean + 0.5 * kappa * kappa * sd * sd),
            _ => {
                let q = self.right.expect_in(
                    &|y: f64| exp(-kappa * y),
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    QuadOptions::default().with_abs_tol(1e-13),
                );
                if !q.converged {
                    return Err(Error::DivergedMoment { t: 0.0 });
                }
                q.value
            }
        };
        Ok(left + self.right_weight() * right)
    }

    /// Truncated mean `m(x) = int_0^x [F(-u) + (1 - F(u))] du`.
    ///
    /// Closed form for the reflected-exponential and point-mass left parts
    /// and for the Pareto/exponential/point-mass right parts; quadrature
    /// otherwise.
    pub fn truncated_mean(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let left = match self.left {
            LeftKind::None => 0.0,
            LeftKind::ReflectedExp { rate, weight } => weight * (-expm1(-rate * x)) / rate,
            LeftKind::PointMass { location, weight } => weight * x.min(-location),
        };
        let wr = self.right_weight();
        let right = match self.right {
            RightKind::Pareto {
                alpha,
                scale,
                onset,
            } => {
                let start = self.right.support_start();
                let flat = x.min(start);
                let rest = if x > start {
                    let a = onset + start;
                    let b = onset + x;
                    if (alpha - 1.0).abs() < 1e-14 {
                        scale * log(b / a)
                    } else {
                        scale * (pow(b, 1.0 - alpha) - pow(a, 1.0 - alpha)) / (1.0 - alpha)
                    }
                } else {
                    0.0
                };
                flat + rest
            }
            RightKind::Exponential { rate } => -expm1(-rate * x) / rate,
            RightKind::PointMass { location } => {
                if location >= 0.0 {
                    x.min(location)
                } else {
                    x.min(-location)
                }
            }
            _ => {
                let f = |u: f64| self.right.sf(u) + self.right.cdf(-u);
                crate::quad::integrate_dyadic(f, 0.0, x, QuadOptions::default()).value
            }
        };
        // Right point masses below zero contribute through F(-u), handled above;
        // Gaussian right parts contribute on both sides via the quadrature branch.
        left + wr * right
    }
}

impl Df for TailSpec {
    fn cdf(&self, x: f64) -> f64 {
        self.left_cdf(x) + self.right_weight() * self.right.cdf(x)
    }

    fn sf(&self, x: f64) -> f64 {
        let left_sf = self.left_weight() - self.left_cdf(x);
        left_sf.max(0.0) + self.right_weight() * self.right.sf(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixture() -> TailSpec {
        TailSpec::new(
            LeftKind::ReflectedExp {
                rate: 2.0,
                weight: 0.4,
            },
            RightKind::lomax(0.7, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn pareto_survival_matches_formula() {
        let s = TailSpec::pure(RightKind::Pareto {
            alpha: 0.7,
            scale: 2.0,
            onset: 3.0,
        })
        .unwrap();
        for &x in &[0.0, 0.5, 10.0, 1e4] {
            let want = (2.0 * pow(3.0 + x, -0.7)).min(1.0);
            assert!((s.sf(x) - want).abs() < 1e-15);
        }
        // atom at zero of mass 1 - 2 * 3^{-0.7}
        let atom = s.atoms()[0];
        assert!((atom.1 - (1.0 - 2.0 * pow(3.0, -0.7))).abs() < 1e-15);
    }

    #[test]
    fn total_mass_is_one() {
        let specs = [
            mixture(),
            TailSpec::pure(RightKind::Lognormal { mu: 0.0, sigma: 1.0 }).unwrap(),
            TailSpec::new(
                LeftKind::PointMass {
                    location: -1.0,
                    weight: 0.3,
                },
                RightKind::Weibull { beta: 0.5 },
            )
            .unwrap(),
            TailSpec::pure(RightKind::Gaussian { mean: 1.0, sd: 2.0 }).unwrap(),
        ];
        for s in &specs {
            let q = s.expect(|_| 1.0);
            assert!((q.value - 1.0).abs() < 1e-10, "{s:?}: {}", q.value);
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let s = mixture();
        for &u in &[1e-6, 0.1, 0.39, 0.41, 0.5, 0.9, 0.999_999] {
            let x = s.quantile(u);
            assert!((s.cdf(x) - u).abs() < 1e-12, "u = {u}, x = {x}");
        }
    }

    #[test]
    fn truncated_mean_closed_form_matches_quadrature() {
        let s = mixture();
        for &x in &[0.5, 3.0, 100.0] {
            let f = |u: f64| s.cdf(-u) + s.sf(u);
            let q = integrate_dyadic(f, 0.0, x, QuadOptions::default()).value;
            assert!((s.truncated_mean(x) - q).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn left_bound_exponential() {
        // F(-x) <= e^{-kappa x} for kappa <= rate
        let s = mixture();
        for i in 1..100 {
            let x = i as f64 * 0.3;
            assert!(s.cdf(-x) <= exp(-1.0 * x));
        }
    }
}
