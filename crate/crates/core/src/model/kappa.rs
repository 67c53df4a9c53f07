//! Solving `E A^kappa = 1` for a law of `log A` given under `P`.

use alloc::vec::Vec;
use libm::{exp, log};

use super::tail::TailSpec;
use crate::error::{Error, Result};
use crate::quad::QuadOptions;
use crate::roots::bisect_secant;

/// Law of `log A` under `P`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case", deny_unknown_fields))]
pub enum BaseFamily {
    Normal { mu: f64, var: f64 },
    /// Finitely many `(location, probability)` pairs.
    Discrete { points: Vec<(f64, f64)> },
    /// Any parametric law, interpreted under `P`.
    Spec { spec: TailSpec },
}

impl BaseFamily {
    /// `log E A^t`.
    pub fn log_moment(&self, t: f64) -> Result<f64> {
        match self {
            BaseFamily::Normal { mu, var } => Ok(t * mu + 0.5 * t * t * var),
            BaseFamily::Discrete { points } => {
                // log-sum-exp for stability at large t
                let m = points
                    .iter()
                    .filter(|(_, p)| *p > 0.0)
                    .map(|(y, _)| t * y)
                    .fold(f64::NEG_INFINITY, f64::max);
                let s: f64 = points.iter().map(|(y, p)| p * exp(t * y - m)).sum();
                Ok(m + log(s))
            }
            BaseFamily::Spec { spec } => {
                let q = spec.expect_in(
                    |y| exp(t * y),
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    QuadOptions::default().with_abs_tol(1e-14),
                );
                if !q.converged || !q.value.is_finite() {
                    return Err(Error::DivergedMoment { t });
                }
                Ok(log(q.value))
            }
        }
    }

    pub fn moment(&self, t: f64) -> Result<f64> {
        Ok(exp(self.log_moment(t)?))
    }
}

/// Default search bracket for `kappa`.
pub const KAPPA_BRACKET: (f64, f64) = (1e-6, 50.0);

/// Positive root of `t -> log E A^t` inside `bracket`, to `1e-12` in `t`.
pub fn solve_kappa(base: &BaseFamily, bracket: (f64, f64)) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter("bracket must satisfy 0 < lo < hi"));
    }
    bisect_secant(|t| base.log_moment(t), lo, hi, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lognormal_root() {
        let k = solve_kappa(&BaseFamily::Normal { mu: -1.0, var: 2.0 }, KAPPA_BRACKET).unwrap();
        assert!((k - 1.0).abs() < 1e-10);
    }

    #[test]
    fn two_point_root() {
        let b = BaseFamily::Discrete {
            points: alloc::vec![(1.0, 0.2), (-1.0, 0.8)],
        };
        let k = solve_kappa(&b, KAPPA_BRACKET).unwrap();
        // 0.2 e^k + 0.8 e^{-k} = 1  =>  e^k = 4
        assert!((k - 4f64.ln()).abs() < 1e-10);
        assert!((b.moment(k).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn subcritical_has_no_root() {
        let b = BaseFamily::Discrete {
            points: alloc::vec![(0.5f64.ln(), 1.0)],
        };
        assert!(matches!(solve_kappa(&b, KAPPA_BRACKET), Err(Error::NoRoot { .. })));
    }
}
