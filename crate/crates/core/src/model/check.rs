//! Moment diagnostics and case classification reports.

use libm::{exp, fabs, log, pow};

use super::blaw::{BKind, BLaw};
use super::tilted::{CaseTag, TiltedLaw};
use crate::quad::QuadOptions;

/// Relative increment of a partial integral between `T` and `2T` above which
/// the integral is flagged as divergent. A heuristic, not a proof.
pub const CAUCHY_TOL: f64 = 1e-3;

/// Truncation used by [`check_case`] for `E A^kappa log+ A`.
pub const CHECK_TRUNCATION: f64 = 1e6;

/// Truncation of `log A` for the joint `(A, B)` moments; keeps `e^{2T}` finite.
const JOINT_TRUNCATION: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentValue {
    pub value: f64,
    pub diverged: bool,
}

fn cauchy(partial: impl Fn(f64) -> f64, t_max: f64) -> MomentValue {
    let a = partial(t_max);
    let b = partial(2.0 * t_max);
    let diverged = !a.is_finite() || !b.is_finite() || fabs(b - a) > CAUCHY_TOL * fabs(b);
    MomentValue { value: a, diverged }
}

/// `int_{-T}^{T} e^{t y} F(dy)` under the base measure, with a divergence flag.
pub fn moments(law: &TiltedLaw, t: f64, truncation: f64) -> MomentValue {
    let opts = QuadOptions::default().with_abs_tol(1e-13);
    cauchy(
        |tt| law.base_expect_in(|y| exp(t * y), -tt, tt, opts).value,
        truncation,
    )
}

/// Moment flags for the alternative conditions on `B`; `None` means infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BMomentFlags {
    /// `E|B|^kappa (log+ |B|)^{max(1, kappa)}`.
    pub b_log_b: Option<f64>,
    /// `E|B|^kappa log+ A`.
    pub b_log_a: Option<f64>,
    /// `E|B| A^{kappa - 1} log+ A`.
    pub b_a_log_a: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseReport {
    pub case: CaseTag,
    /// `E A^kappa log+ A`; `None` when infinite.
    pub tilted_log_moment: Option<f64>,
    pub b_flags: Option<BMomentFlags>,
}

fn finite(m: MomentValue) -> Option<f64> {
    if m.diverged {
        None
    } else {
        Some(m.value)
    }
}

fn logp(x: f64) -> f64 {
    if x > 1.0 {
        log(x)
    } else {
        0.0
    }
}

/// `E[phi1(B) phi2(A)]` truncated to `log A in [-T, T]`.
fn joint(law: &TiltedLaw, b: &BLaw, phi1: &dyn Fn(f64) -> f64, phi2: &dyn Fn(f64) -> f64, t_max: f64) -> MomentValue {
    let opts = QuadOptions::default().with_abs_tol(1e-13);
    match b.kind {
        BKind::FixedPoint { x0 } => cauchy(
            |tt| {
                law.base_expect_in(
                    |y| {
                        let a = exp(y);
                        phi1(x0 * (1.0 - a)) * phi2(a)
                    },
                    -tt,
                    tt,
                    opts,
                )
                .value
            },
            t_max,
        ),
        _ => {
            let eb = b.expect(phi1).unwrap_or(f64::INFINITY);
            let ea = cauchy(|tt| law.base_expect_in(|y| phi2(exp(y)), -tt, tt, opts).value, t_max);
            MomentValue {
                value: eb * ea.value,
                diverged: ea.diverged || !eb.is_finite(),
            }
        }
    }
}

/// Classify a law and report whether `E A^kappa log+ A` is finite, plus the
/// alternative `B` moment conditions when a `B` law is given.
pub fn check_case(law: &TiltedLaw, b: Option<&BLaw>) -> CaseReport {
    let opts = QuadOptions::default();
    let tilted = cauchy(
        |tt| law.fkappa.expect_in(|y| y.max(0.0), 0.0, tt, opts).value,
        CHECK_TRUNCATION,
    );
    let k = law.kappa;
    let b_flags = b.map(|b| {
        let m = if k > 1.0 { k } else { 1.0 };
        let f1 = |x: f64| pow(fabs(x), k) * pow(logp(fabs(x)), m);
        let f2 = |x: f64| pow(fabs(x), k);
        let f3 = |x: f64| fabs(x);
        BMomentFlags {
            b_log_b: finite(joint(law, b, &f1, &|_| 1.0, JOINT_TRUNCATION)),
            b_log_a: finite(joint(law, b, &f2, &logp, JOINT_TRUNCATION)),
            b_a_log_a: finite(joint(law, b, &f3, &|a| pow(a, k - 1.0) * logp(a), JOINT_TRUNCATION)),
        }
    });
    CaseReport {
        case: law.case,
        tilted_log_moment: finite(tilted),
        b_flags,
    }
}
