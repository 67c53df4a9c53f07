//! Ready-made models used by tests, examples and the command line.

use libm::{log, sqrt};

use super::blaw::BLaw;
use super::tail::{LeftKind, RightKind, TailSpec};
use super::tilted::{base_from_tilted, tune_theta, ALaw, TiltedLaw};
use crate::error::{Error, Result};

/// Rate of the reflected-exponential left part in the mixture models.
pub const LEFT_RATE: f64 = 2.0;

/// `log A ~ N(-1, 2)`: `kappa = 1` and `F_kappa = N(1, 2)`.
pub fn lognormal_classical() -> TiltedLaw {
    let spec = TailSpec::pure(RightKind::Gaussian {
        mean: 1.0,
        sd: sqrt(2.0),
    })
    .expect("valid gaussian");
    base_from_tilted(spec, 1.0).expect("gaussian tilt")
}

/// `log A = +1` w.p. 0.2 and `-1` w.p. 0.8; lattice, used only as an oracle.
pub fn two_point_lattice() -> TiltedLaw {
    let spec = TailSpec::new(
        LeftKind::PointMass {
            location: -1.0,
            weight: 0.2,
        },
        RightKind::PointMass { location: 1.0 },
    )
    .expect("valid two-point law");
    base_from_tilted(spec, log(4.0)).expect("two-point tilt")
}

/// Reflected-exponential left part plus the given right part, with the left
/// weight tuned so that `E A^kappa = theta`.
pub fn mixture(right: RightKind, kappa: f64, theta: f64) -> Result<TiltedLaw> {
    let q = tune_theta(LEFT_RATE, &right, kappa, theta)?;
    let spec = TailSpec::new(
        LeftKind::ReflectedExp {
            rate: LEFT_RATE,
            weight: q,
        },
        right,
    )?;
    base_from_tilted(spec, kappa)
}

/// Case (i): Pareto right tail `(1 + x)^{-0.7}`, `kappa = 1`, `theta = 1`.
pub fn case_i_mixture() -> TiltedLaw {
    mixture(RightKind::lomax(0.7, 1.0), 1.0, 1.0).expect("case i mixture")
}

/// Case (i) variant with survival `(1 + 2x)^{-0.7}` used for the local
/// renewal check; the earlier onset shortens the pre-asymptotic range.
pub fn case_i_srt() -> TiltedLaw {
    mixture(RightKind::lomax(0.7, 0.5), 1.0, 1.0).expect("case i srt mixture")
}

/// Case (ii): Pareto right tail `(1 + x)^{-1.5}`, `kappa = 1`, `theta = 0.6`.
pub fn case_ii_pareto() -> TiltedLaw {
    mixture(RightKind::lomax(1.5, 1.0), 1.0, 0.6).expect("case ii pareto")
}

/// Case (ii): `F_kappa(x) = Phi(log x)` on the right, `theta = 0.6`.
pub fn case_ii_lognormal() -> TiltedLaw {
    mixture(RightKind::Lognormal { mu: 0.0, sigma: 1.0 }, 1.0, 0.6).expect("case ii lognormal")
}

/// Case (ii): Weibull right tail `exp(-sqrt(x))`, `theta = 0.6`.
pub fn case_ii_weibull() -> TiltedLaw {
    mixture(RightKind::Weibull { beta: 0.5 }, 1.0, 0.6).expect("case ii weibull")
}

/// `A = a` almost surely (`0 < a < 1`), tilted with `kappa = 1`.
pub fn constant(a: f64) -> Result<TiltedLaw> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter("constant multiplier must lie in (0, 1)"));
    }
    base_from_tilted(TailSpec::point_mass(log(a)), 1.0)
}

/// Pure Pareto law with survival `(1 + x)^{-alpha}` on `[0, inf)`.
pub fn pure_pareto(alpha: f64) -> TailSpec {
    TailSpec::pure(RightKind::lomax(alpha, 1.0)).expect("valid pareto")
}

/// Named catalog entries.
pub fn by_name(name: &str) -> Option<TiltedLaw> {
    Some(match name {
        "lognormal_classical" => lognormal_classical(),
        "two_point_lattice" => two_point_lattice(),
        "case_i_mixture" => case_i_mixture(),
        "case_i_srt" => case_i_srt(),
        "case_ii_pareto" => case_ii_pareto(),
        "case_ii_lognormal" => case_ii_lognormal(),
        "case_ii_weibull" => case_ii_weibull(),
        _ => return None,
    })
}

pub const NAMES: [&str; 7] = [
    "lognormal_classical",
    "two_point_lattice",
    "case_i_mixture",
    "case_i_srt",
    "case_ii_pareto",
    "case_ii_lognormal",
    "case_ii_weibull",
];

/// A multiplier law together with a law for `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    pub a: ALaw,
    pub b: BLaw,
}

/// Pair a multiplier with a `B` law, checking `nu > kappa` and `E|B|^nu < inf`.
pub fn assemble(a: ALaw, b: BLaw) -> Result<Model> {
    b.validate()?;
    if let ALaw::Tilted(law) = &a {
        if !(b.nu > law.kappa) {
            return Err(Error::InvalidParameter("B moment order nu must exceed kappa"));
        }
        if let Some(m) = b.abs_moment(b.nu) {
            if !m.is_finite() {
                return Err(Error::InvalidParameter("E|B|^nu is infinite"));
            }
        } else {
            // B = x0 (1 - A): E|B|^nu is finite iff E A^nu is
            let mv = super::check::moments(law, b.nu, 300.0);
            if mv.diverged {
                return Err(Error::InvalidParameter("E|B|^nu is infinite"));
            }
        }
    }
    Ok(Model { a, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tilted::CaseTag;

    #[test]
    fn catalog_cases() {
        assert_eq!(lognormal_classical().case, CaseTag::Classical);
        assert_eq!(lognormal_classical().theta, 1.0);
        assert_eq!(case_i_mixture().case, CaseTag::CaseI { alpha: 0.7 });
        assert_eq!(case_ii_pareto().case, CaseTag::CaseII);
        assert!((case_ii_pareto().theta - 0.6).abs() < 1e-12);
        assert_eq!(case_ii_lognormal().case, CaseTag::CaseII);
        assert_eq!(case_ii_weibull().case, CaseTag::CaseII);
        assert_eq!(two_point_lattice().theta, 1.0);
    }

    #[test]
    fn assembly_checks_nu() {
        let law = case_ii_pareto();
        assert!(assemble(ALaw::Tilted(law), BLaw::constant(1.0)).is_ok());
        let bad = BLaw {
            nu: 0.5,
            ..BLaw::constant(1.0)
        };
        assert!(assemble(ALaw::Tilted(law), bad).is_err());
    }
}
