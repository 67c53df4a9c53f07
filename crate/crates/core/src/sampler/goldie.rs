use libm::{exp, pow};

use super::PerpetuitySample;
use crate::error::{Error, Result};
use crate::model::{ALaw, BLaw};
use crate::rng::{index, map_blocks, stream};
use crate::stats::Moments;

/// Which tail constant to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GoldieVariant {
    /// `(AX + B)_+^kappa - (AX)_+^kappa`
    Plus,
    /// `(AX + B)_-^kappa - (AX)_-^kappa`
    Minus,
    /// `(A X_+ v B_+)^kappa - (A X_+)^kappa`
    Max,
}

impl GoldieVariant {
    pub fn name(&self) -> &'static str {
        match self {
            GoldieVariant::Plus => "plus",
            GoldieVariant::Minus => "minus",
            GoldieVariant::Max => "max",
        }
    }
}

#[inline]
fn ppow(y: f64, k: f64) -> f64 {
    if y > 0.0 {
        pow(y, k)
    } else {
        0.0
    }
}

/// The paired difference for one draw `(a, b, x)`.
#[inline]
pub fn goldie_term(variant: GoldieVariant, a: f64, b: f64, x: f64, kappa: f64) -> f64 {
    match variant {
        GoldieVariant::Plus => ppow(a * x + b, kappa) - ppow(a * x, kappa),
        GoldieVariant::Minus => ppow(-(a * x + b), kappa) - ppow(-(a * x), kappa),
        GoldieVariant::Max => {
            let ax = a * x.max(0.0);
            ppow(ax.max(b.max(0.0)), kappa) - ppow(ax, kappa)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldieEstimate {
    pub variant: GoldieVariant,
    pub estimate: f64,
    pub ci_halfwidth: f64,
    pub n: u64,
}

/// Mean of the paired difference over `n_pairs` fresh `(A, B)` pairs, each
/// matched with a uniformly resampled draw of `X`.
///
/// Fails with `InsufficientMoment` when the sample variance more than
/// doubles at both doublings `n/4 -> n/2 -> n`.
pub fn estimate_goldie_constant(
    xs: &PerpetuitySample,
    a: &ALaw,
    b: &BLaw,
    kappa: f64,
    n_pairs: usize,
    seed: u64,
    variant: GoldieVariant,
) -> Result<GoldieEstimate> {
    xs.check_truncation()?;
    if xs.draws.is_empty() || n_pairs == 0 {
        return Err(Error::EmptySample);
    }
    let draws = &xs.draws;
    let blocks = map_blocks(n_pairs, xs.config.stream_count, |i, r| {
        let mut rng = stream(seed, i as u64);
        let len = r.len();
        let mut parts = [Moments::default(); 3];
        for j in 0..len {
            let av = exp(a.sample_log(&mut rng));
            let bv = b.sample(av, &mut rng);
            let x = draws[index(&mut rng, draws.len())];
            let t = goldie_term(variant, av, bv, x, kappa);
            let slot = if 4 * j < len {
                0
            } else if 2 * j < len {
                1
            } else {
                2
            };
            parts[slot].push(t);
        }
        parts
    });
    let mut quarter = Moments::default();
    let mut half = Moments::default();
    let mut all = Moments::default();
    for p in &blocks {
        quarter = quarter.merge(&p[0]);
        half = half.merge(&p[0]).merge(&p[1]);
        all = all.merge(&p[0]).merge(&p[1]).merge(&p[2]);
    }
    let (v1, v2, v3) = (quarter.variance(), half.variance(), all.variance());
    if n_pairs >= 64 && v2 > 2.0 * v1 && v3 > 2.0 * v2 {
        return Err(Error::InsufficientMoment);
    }
    Ok(GoldieEstimate {
        variant,
        estimate: all.mean,
        ci_halfwidth: all.ci_halfwidth(),
        n: all.n,
    })
}
