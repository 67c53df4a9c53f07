//! Monte Carlo engines for perpetuities, max-equations and random-walk maxima.

mod estimate;
mod goldie;
mod paths;
mod walk;

pub use estimate::{tail_estimate, TailEstimate};
pub use goldie::{estimate_goldie_constant, goldie_term, GoldieEstimate, GoldieVariant};
pub use paths::{sample_log_a, sample_max_perpetuity, sample_perpetuity};
pub use walk::{is_tail_max_rw, sample_max_rw, IsEstimate};

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest admissible fraction of paths stopped by the horizon.
pub const TRUNCATION_GATE: f64 = 1e-3;

/// Number of substreams used when none is configured.
pub const DEFAULT_STREAMS: usize = 64;

/// Monte Carlo settings. Results depend only on `seed` and `stream_count`
/// (never on the number of threads).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SimConfig {
    pub seed: u64,
    pub n_paths: usize,
    /// Stop a path once the running product of multipliers drops below this.
    pub trunc_eps: f64,
    pub max_horizon: u64,
    pub stream_count: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 0,
            n_paths: 100_000,
            trunc_eps: 1e-12,
            max_horizon: 100_000,
            stream_count: DEFAULT_STREAMS,
        }
    }
}

impl SimConfig {
    pub fn new(seed: u64, n_paths: usize) -> Self {
        SimConfig {
            seed,
            n_paths,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::InvalidParameter("n_paths must be positive"));
        }
        if !(self.trunc_eps > 0.0 && self.trunc_eps < 1.0) {
            return Err(Error::InvalidParameter("trunc_eps must lie in (0, 1)"));
        }
        if self.max_horizon == 0 || self.stream_count == 0 {
            return Err(Error::InvalidParameter("max_horizon and stream_count must be positive"));
        }
        Ok(())
    }
}

/// Draws of a simulated fixed point together with truncation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct PerpetuitySample {
    pub draws: Vec<f64>,
    /// Fraction of paths stopped by `max_horizon` rather than by `trunc_eps`.
    pub truncated_fraction: f64,
    pub config: SimConfig,
}

impl PerpetuitySample {
    /// Refuse to estimate from a sample with too many horizon-stopped paths.
    pub fn check_truncation(&self) -> Result<()> {
        if self.truncated_fraction > TRUNCATION_GATE {
            return Err(Error::TruncationNotConverged {
                fraction: self.truncated_fraction,
                limit: TRUNCATION_GATE,
            });
        }
        Ok(())
    }
}
