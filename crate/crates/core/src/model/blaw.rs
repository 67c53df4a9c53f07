//! Laws of the additive term `B`.

use libm::{exp, fabs, log, pow};

use crate::error::{Error, Result};
use crate::rng::uniform;
use crate::special::gamma;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields))]
pub enum BKind {
    Constant { b: f64 },
    /// `b1` with probability `p`, else `b2`.
    TwoPoint { b1: f64, p: f64, b2: f64 },
    ExponentialPos { rate: f64 },
    UniformSigned { lo: f64, hi: f64 },
    /// `B = x0 (1 - A)`, so that `A x0 + B = x0` and the solution is `X = x0`.
    FixedPoint { x0: f64 },
}

/// Law of `B` together with the moment order it is declared to have.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct BLaw {
    pub kind: BKind,
    pub nu: f64,
}

impl BLaw {
    pub fn new(kind: BKind, nu: f64) -> Result<Self> {
        let law = BLaw { kind, nu };
        law.validate()?;
        Ok(law)
    }

    pub fn constant(b: f64) -> Self {
        BLaw {
            kind: BKind::Constant { b },
            nu: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidParameter("nu must be positive"));
        }
        let ok = match self.kind {
            BKind::Constant { b } => b.is_finite(),
            BKind::TwoPoint { b1, p, b2 } => b1.is_finite() && b2.is_finite() && (0.0..=1.0).contains(&p),
            BKind::ExponentialPos { rate } => rate > 0.0 && rate.is_finite(),
            BKind::UniformSigned { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            BKind::FixedPoint { x0 } => x0.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("B law parameters"))
        }
    }

    /// Draw `B` given the multiplier `a` of the same pair.
    #[inline]
    pub fn sample<R: rand_core::RngCore + ?Sized>(&self, a: f64, rng: &mut R) -> f64 {
        match self.kind {
            BKind::Constant { b } => b,
            BKind::TwoPoint { b1, p, b2 } => {
                if uniform(rng) < p {
                    b1
                } else {
                    b2
                }
            }
            BKind::ExponentialPos { rate } => -log(uniform(rng)) / rate,
            BKind::UniformSigned { lo, hi } => lo + (hi - lo) * uniform(rng),
            BKind::FixedPoint { x0 } => x0 * (1.0 - a),
        }
    }

    /// Whether `B` depends on `A`.
    pub fn depends_on_a(&self) -> bool {
        matches!(self.kind, BKind::FixedPoint { .. })
    }

    /// `E|B|^s` in closed form; `None` when `B` depends on `A`.
    pub fn abs_moment(&self, s: f64) -> Option<f64> {
        Some(match self.kind {
            BKind::Constant { b } => pow(fabs(b), s),
            BKind::TwoPoint { b1, p, b2 } => p * pow(fabs(b1), s) + (1.0 - p) * pow(fabs(b2), s),
            BKind::ExponentialPos { rate } => gamma(s + 1.0) / pow(rate, s),
            BKind::UniformSigned { lo, hi } => {
                let up = |x: f64| pow(fabs(x), s + 1.0) / (s + 1.0);
                let total = if lo >= 0.0 || hi <= 0.0 {
                    fabs(up(hi) - up(lo))
                } else {
                    up(lo) + up(hi)
                };
                total / (hi - lo)
            }
            BKind::FixedPoint { .. } => return None,
        })
    }

    /// `E phi(B)` for laws independent of `A`, by closed form or quadrature.
    pub fn expect<P: Fn(f64) -> f64>(&self, phi: P) -> Option<f64> {
        use crate::quad::{integrate_dyadic, integrate_pieces, QuadOptions};
        Some(match self.kind {
            BKind::Constant { b } => phi(b),
            BKind::TwoPoint { b1, p, b2 } => p * phi(b1) + (1.0 - p) * phi(b2),
            BKind::ExponentialPos { rate } => {
                let q = integrate_dyadic(|x| phi(x) * rate * exp(-rate * x), 0.0, f64::INFINITY, QuadOptions::default());
                if !q.converged {
                    return Some(f64::INFINITY);
                }
                q.value
            }
            BKind::UniformSigned { lo, hi } => {
                let mut breaks = alloc::vec![lo];
                if lo < 0.0 && hi > 0.0 {
                    breaks.push(0.0);
                }
                breaks.push(hi);
                let q = integrate_pieces(&phi, &breaks, QuadOptions::default());
                q.value / (hi - lo)
            }
            BKind::FixedPoint { .. } => return None,
        })
    }

    /// Whether `B >= 0` almost surely. `FixedPoint` only qualifies with
    /// `x0 = 0` since `A <= 1` is not guaranteed.
    pub fn is_nonnegative(&self) -> bool {
        match self.kind {
            BKind::Constant { b } => b >= 0.0,
            BKind::TwoPoint { b1, p, b2 } => (p == 0.0 || b1 >= 0.0) && (p == 1.0 || b2 >= 0.0),
            BKind::ExponentialPos { .. } => true,
            BKind::UniformSigned { lo, .. } => lo >= 0.0,
            BKind::FixedPoint { x0 } => x0 == 0.0,
        }
    }

    /// Whether `B` is almost surely zero.
    pub fn is_zero(&self) -> bool {
        match self.kind {
            BKind::Constant { b } => b == 0.0,
            BKind::TwoPoint { b1, p, b2 } => (p == 0.0 || b1 == 0.0) && (p == 1.0 || b2 == 0.0),
            BKind::FixedPoint { x0 } => x0 == 0.0,
            _ => false,
        }
    }
}
