use core::fmt;

/// Errors raised by the numerics core.
///
/// Every variant carries a stable machine-readable code (see [`Error::code`])
/// so that front ends can report failures without parsing messages.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid parameter supplied to a constructor or operation.
    InvalidParameter(&'static str),
    /// The moment function has no positive root inside the bracket.
    NoRoot { lo: f64, hi: f64 },
    /// A moment integral did not converge.
    DivergedMoment { t: f64 },
    /// The tilted law would force `E A^kappa > 1`.
    InvalidTilt { integral: f64 },
    /// No mixture weight can satisfy the requested normalization.
    Infeasible(&'static str),
    /// Numeric inversion of a distribution function failed to bracket.
    QuantileFailure { u: f64 },
    /// `E log A >= 0`; the recursion does not contract.
    NotContracting { mean_log_a: f64 },
    /// Too many simulated paths hit the horizon before the product underflowed.
    TruncationNotConverged { fraction: f64, limit: f64 },
    /// The operation requires a different case of the model.
    CaseMismatch(&'static str),
    /// First passage was not reached within the horizon.
    HorizonExceeded { horizon: u64 },
    /// The paired-difference variance grows without bound.
    InsufficientMoment,
    /// No samples to estimate from.
    EmptySample,
    /// A cell of the discretised measure carries too much mass.
    GridTooCoarse { cell_mass: f64 },
    /// Grid functions with different steps cannot be combined.
    StepMismatch { left: f64, right: f64 },
    /// The renewal series was not summed to tolerance.
    RenewalNotConverged { terms: usize, residual: f64 },
    /// Normalizer incompatible with the renewal table.
    NormalizerMismatch(&'static str),
    /// Defective renewal iteration failed to converge.
    FixedPointDiverged { iterations: usize },
    /// Monte Carlo noise dominates the estimated function.
    McNoiseTooLarge { noisy_fraction: f64 },
    /// The distribution has atoms where a density is required.
    NoDensity { location: f64 },
    /// Not enough thresholds or decades for a slope fit.
    InsufficientRange { thresholds: usize, decades: f64 },
    /// Spike parameters outside the admissible region.
    ParamViolation(&'static str),
}

impl Error {
    /// Stable code for machine-readable reporting.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NoRoot { .. } => "no_root",
            Error::DivergedMoment { .. } => "diverged_moment",
            Error::InvalidTilt { .. } => "invalid_tilt",
            Error::Infeasible(_) => "infeasible",
            Error::QuantileFailure { .. } => "quantile_failure",
            Error::NotContracting { .. } => "not_contracting",
            Error::TruncationNotConverged { .. } => "truncation_not_converged",
            Error::CaseMismatch(_) => "case_mismatch",
            Error::HorizonExceeded { .. } => "horizon_exceeded",
            Error::InsufficientMoment => "insufficient_moment",
            Error::EmptySample => "empty_sample",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
            Error::StepMismatch { .. } => "step_mismatch",
            Error::RenewalNotConverged { .. } => "truncation_not_converged",
            Error::NormalizerMismatch(_) => "normalizer_mismatch",
            Error::FixedPointDiverged { .. } => "fixed_point_diverged",
            Error::McNoiseTooLarge { .. } => "mc_noise_too_large",
            Error::NoDensity { .. } => "no_density",
            Error::InsufficientRange { .. } => "insufficient_range",
            Error::ParamViolation(_) => "param_violation",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::NoRoot { lo, hi } => {
                write!(f, "E A^t - 1 has no sign change on [{lo}, {hi}]")
            }
            Error::DivergedMoment { t } => write!(f, "moment integral diverged at t = {t}"),
            Error::InvalidTilt { integral } => write!(
                f,
                "integral of exp(-kappa y) F_kappa(dy) is {integral} < 1, theta would exceed 1"
            ),
            Error::Infeasible(what) => write!(f, "infeasible: {what}"),
            Error::QuantileFailure { u } => write!(f, "quantile inversion failed at u = {u}"),
            Error::NotContracting { mean_log_a } => {
                write!(f, "E log A = {mean_log_a} is not negative")
            }
            Error::TruncationNotConverged { fraction, limit } => write!(
                f,
                "{fraction} of paths hit the horizon (limit {limit})"
            ),
            Error::CaseMismatch(what) => write!(f, "case mismatch: {what}"),
            Error::HorizonExceeded { horizon } => {
                write!(f, "first passage not reached within {horizon} steps")
            }
            Error::InsufficientMoment => {
                write!(f, "variance estimate grows with the sample size")
            }
            Error::EmptySample => write!(f, "empty sample"),
            Error::GridTooCoarse { cell_mass } => {
                write!(f, "grid too coarse: a cell carries mass {cell_mass}")
            }
            Error::StepMismatch { left, right } => {
                write!(f, "grid steps differ: {left} vs {right}")
            }
            Error::RenewalNotConverged { terms, residual } => write!(
                f,
                "renewal series not converged after {terms} terms (residual {residual})"
            ),
            Error::NormalizerMismatch(what) => write!(f, "normalizer mismatch: {what}"),
            Error::FixedPointDiverged { iterations } => {
                write!(f, "fixed point iteration diverged after {iterations} iterations")
            }
            Error::McNoiseTooLarge { noisy_fraction } => write!(
                f,
                "Monte Carlo noise exceeds the signal on {noisy_fraction} of cells"
            ),
            Error::NoDensity { location } => write!(f, "atom at {location} inside density range"),
            Error::InsufficientRange {
                thresholds,
                decades,
            } => write!(
                f,
                "need >= 5 thresholds over >= 1.5 decades, got {thresholds} over {decades}"
            ),
            Error::ParamViolation(what) => write!(f, "parameter violation: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
