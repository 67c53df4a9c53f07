//! Tilted laws: the pair `(kappa, F_kappa)` and the derived base law
//! `F(dy) = theta e^{-kappa y} F_kappa(dy)`.

use alloc::vec::Vec;
use libm::{exp, log};

use super::tail::{LeftKind, RightKind, TailSpec};
use crate::error::{Error, Result};
use crate::quad::{integrate_dyadic, QuadOptions, Quadrature};
use crate::rng::uniform;
use crate::special::norm_quantile;

/// `theta` within this distance of one is treated as exactly one.
pub const THETA_SNAP: f64 = 1e-9;

/// Which tail theorem applies to a model.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "case", rename_all = "snake_case"))]
pub enum CaseTag {
    /// `theta = 1` and a regularly varying tail of index `alpha <= 1`.
    CaseI { alpha: f64 },
    /// `theta < 1` and a heavy (locally subexponential) tail.
    CaseII,
    /// `theta = 1` with a finite tilted log-moment.
    Classical,
    /// `theta < 1` with a light right tail; no tail theorem applies.
    LightSubcritical,
}

impl CaseTag {
    pub fn name(&self) -> &'static str {
        match self {
            CaseTag::CaseI { .. } => "case_i",
            CaseTag::CaseII => "case_ii",
            CaseTag::Classical => "classical",
            CaseTag::LightSubcritical => "light_subcritical",
        }
    }
}

/// Which measure to draw `log A` under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    P,
    PKappa,
}

/// Law of `log A` given through its tilted version.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TiltedLaw {
    pub kappa: f64,
    pub fkappa: TailSpec,
    pub theta: f64,
    pub case: CaseTag,
    /// `int e^{-kappa y} dRight(y)` for the right component alone.
    right_tilt: f64,
    /// Base-measure probability of the left component.
    base_left_mass: f64,
}

/// `integral e^{-kappa y} dRight(y)`.
pub fn right_tilt_integral(right: &RightKind, kappa: f64) -> Result<f64> {
    TailSpec::pure(*right)?.tilt_integral(kappa)
}

/// Build the tilted law for a given `F_kappa` and `kappa`.
pub fn base_from_tilted(fkappa: TailSpec, kappa: f64) -> Result<TiltedLaw> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter("kappa must be positive"));
    }
    fkappa.validate()?;
    let integral = fkappa.tilt_integral(kappa)?;
    if !integral.is_finite() {
        return Err(Error::DivergedMoment { t: 0.0 });
    }
    if integral < 1.0 - THETA_SNAP {
        return Err(Error::InvalidTilt { integral });
    }
    let mut theta = 1.0 / integral;
    if (theta - 1.0).abs() < THETA_SNAP {
        theta = 1.0;
    }
    let right_tilt = right_tilt_integral(&fkappa.right, kappa)?;
    let base_left_mass = match fkappa.left {
        LeftKind::None => 0.0,
        LeftKind::ReflectedExp { rate, weight } => theta * weight * rate / (rate - kappa),
        LeftKind::PointMass { location, weight } => theta * weight * exp(-kappa * location),
    };
    let case = classify(&fkappa, theta);
    Ok(TiltedLaw {
        kappa,
        fkappa,
        theta,
        case,
        right_tilt,
        base_left_mass,
    })
}

fn classify(fkappa: &TailSpec, theta: f64) -> CaseTag {
    let critical = theta == 1.0;
    match fkappa.right {
        RightKind::Pareto { alpha, .. } if alpha <= 1.0 && critical => CaseTag::CaseI { alpha },
        r if r.is_heavy() && !critical => CaseTag::CaseII,
        _ if critical => CaseTag::Classical,
        _ => CaseTag::LightSubcritical,
    }
}

/// Left weight `q` that makes `theta` take the requested value for a
/// reflected-exponential left part of rate `lambda`:
/// `q = (1/theta - I) / (lambda/(lambda - kappa) - I)`.
pub fn tune_theta(lambda: f64, right: &RightKind, kappa: f64, theta: f64) -> Result<f64> {
    if !(lambda > kappa) {
        return Err(Error::Infeasible("left rate must exceed kappa"));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter("theta must lie in (0, 1]"));
    }
    right.validate()?;
    let i_right = right_tilt_integral(right, kappa)?;
    let left = lambda / (lambda - kappa);
    let target = 1.0 / theta;
    if (target - i_right).abs() < 1e-15 {
        return Ok(0.0);
    }
    let q = (target - i_right) / (left - i_right);
    if !(0.0..=1.0).contains(&q) || !q.is_finite() {
        return Err(Error::Infeasible("no mixture weight in [0, 1] reaches the requested theta"));
    }
    Ok(q)
}

/// Left weight giving `theta = 1` exactly.
pub fn tune_case_i(lambda: f64, right: &RightKind, kappa: f64) -> Result<f64> {
    tune_theta(lambda, right, kappa, 1.0)
}

impl TiltedLaw {
    /// `int phi(y) F(dy)` over `(lo, hi]` under the base measure.
    pub fn base_expect_in<P: Fn(f64) -> f64>(&self, phi: P, lo: f64, hi: f64, opts: QuadOptions) -> Quadrature {
        let k = self.kappa;
        let th = self.theta;
        let mut q = self.fkappa.expect_in(|y| phi(y) * exp(-k * y), lo, hi, opts);
        q.value *= th;
        q.abs_error *= th;
        q
    }

    pub fn base_cdf(&self, x: f64) -> f64 {
        self.base_expect_in(|_| 1.0, f64::NEG_INFINITY, x, QuadOptions::default().with_abs_tol(1e-13))
            .value
            .clamp(0.0, 1.0)
    }

    pub fn base_sf(&self, x: f64) -> f64 {
        self.base_expect_in(|_| 1.0, x, f64::INFINITY, QuadOptions::default().with_abs_tol(1e-13))
            .value
            .clamp(0.0, 1.0)
    }

    /// Numeric quantile of the base law to absolute tolerance `1e-10`.
    pub fn base_quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::QuantileFailure { u });
        }
        let mut lo = -1.0;
        let mut hi = 1.0;
        let mut tries = 0;
        while self.base_cdf(lo) >= u {
            lo *= 2.0;
            tries += 1;
            if tries > 60 {
                return Err(Error::QuantileFailure { u });
            }
        }
        while self.base_cdf(hi) < u {
            hi *= 2.0;
            tries += 1;
            if tries > 120 {
                return Err(Error::QuantileFailure { u });
            }
        }
        let (mut a, mut b) = (lo, hi);
        while b - a > 1e-10 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if self.base_cdf(m) >= u {
                b = m;
            } else {
                a = m;
            }
        }
        Ok(b)
    }

    /// Density of the continuous part of the base law.
    pub fn base_density(&self, y: f64) -> f64 {
        self.theta * exp(-self.kappa * y) * self.fkappa.density(y)
    }

    /// Log of [`Self::base_density`], finite where the tilt factor alone
    /// would underflow.
    pub fn base_log_density(&self, y: f64) -> f64 {
        log(self.theta) - self.kappa * y + log(self.fkappa.density(y))
    }

    /// Atoms of the base law.
    pub fn base_atoms(&self) -> Vec<(f64, f64)> {
        self.fkappa
            .atoms()
            .into_iter()
            .map(|(y, m)| (y, self.theta * exp(-self.kappa * y) * m))
            .collect()
    }

    /// `F_kappa(x)` recovered from the base law's density and atoms by
    /// tilting it back with `e^{kappa y}`. Uses `int e^{kappa y} F(dy) = theta`
    /// so only the part of the base law below `x` is integrated.
    pub fn retilt_cdf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        let k = self.kappa;
        let opts = QuadOptions::default().with_abs_tol(1e-13);
        let f = |y: f64| exp(k * y + self.base_log_density(y));
        let atoms: f64 = self
            .base_atoms()
            .iter()
            .filter(|(y, _)| *y <= x)
            .map(|(y, m)| exp(k * y) * m)
            .sum();
        let neg = integrate_dyadic(|s| f(-s), (-x).max(0.0), f64::INFINITY, opts).value;
        let pos = if x > 0.0 {
            integrate_dyadic(f, 0.0, x, opts).value
        } else {
            0.0
        };
        ((atoms + neg + pos) / self.theta).min(1.0)
    }

    /// `E log A` under the base measure.
    pub fn mean_log_a(&self) -> f64 {
        self.base_expect_in(|y| y, f64::NEG_INFINITY, f64::INFINITY, QuadOptions::default())
            .value
    }

    /// Draw `log A` under the chosen measure.
    ///
    /// Under `P` the base law is sampled by composition: the left component
    /// is again reflected-exponential (rate `lambda - kappa`) or an atom, and
    /// the right component is drawn from the tilted right part and accepted
    /// with probability `e^{-kappa y}`.
    #[inline]
    pub fn sample<R: rand_core::RngCore + ?Sized>(&self, measure: Measure, rng: &mut R) -> f64 {
        match measure {
            Measure::PKappa => self.fkappa.sample(rng),
            Measure::P => self.sample_base(rng),
        }
    }

    #[inline]
    fn sample_base<R: rand_core::RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.base_left_mass > 0.0 {
            let u = uniform(rng);
            if u < self.base_left_mass {
                return match self.fkappa.left {
                    LeftKind::ReflectedExp { rate, .. } => log(uniform(rng)) / (rate - self.kappa),
                    LeftKind::PointMass { location, .. } => location,
                    LeftKind::None => unreachable!(),
                };
            }
        }
        let k = self.kappa;
        match self.fkappa.right {
            RightKind::PointMass { location } => location,
            RightKind::Exponential { rate } => -log(uniform(rng)) / (rate + k),
            RightKind::Gaussian { mean, sd } => mean - k * sd * sd + sd * norm_quantile(uniform(rng)),
            right => loop {
                let y = right.inv_sf(uniform(rng));
                if y <= 0.0 || uniform(rng) < exp(-k * y) {
                    break y;
                }
            },
        }
    }

    /// Base probability of the right component, `theta (1 - w) I_right`.
    pub fn base_right_mass(&self) -> f64 {
        self.theta * self.fkappa.right_weight() * self.right_tilt
    }

    pub fn base_left_mass(&self) -> f64 {
        self.base_left_mass
    }
}

/// Law of the multiplier `A`: either degenerate at zero or given by a tilted law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ALaw {
    Zero,
    Tilted(TiltedLaw),
}

impl ALaw {
    /// Draw `log A` under `P` (`-inf` for `A = 0`).
    #[inline]
    pub fn sample_log<R: rand_core::RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ALaw::Zero => f64::NEG_INFINITY,
            ALaw::Tilted(law) => law.sample(Measure::P, rng),
        }
    }

    pub fn tilted(&self) -> Option<&TiltedLaw> {
        match self {
            ALaw::Zero => None,
            ALaw::Tilted(l) => Some(l),
        }
    }

    pub fn mean_log_a(&self) -> f64 {
        match self {
            ALaw::Zero => f64::NEG_INFINITY,
            ALaw::Tilted(l) => l.mean_log_a(),
        }
    }
}

impl From<TiltedLaw> for ALaw {
    fn from(l: TiltedLaw) -> Self {
        ALaw::Tilted(l)
    }
}
