use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::stats::wilson;

/// Empirical survival probabilities at a set of thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct TailEstimate {
    pub thresholds: Vec<f64>,
    pub survival: Vec<f64>,
    pub exceedances: Vec<u64>,
    /// Wilson 95% bounds.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Half the Wilson interval width.
    pub ci_halfwidth: Vec<f64>,
    /// Survival times a normalizer; filled by the fitting routines.
    pub normalized: Vec<f64>,
    pub normalized_ci: Vec<f64>,
    pub n: u64,
}

/// Empirical `P{X > t}` at ascending thresholds.
pub fn tail_estimate(samples: &[f64], thresholds: &[f64]) -> Result<TailEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if thresholds.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("thresholds must be strictly ascending"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as u64;
    let mut est = TailEstimate {
        thresholds: thresholds.to_vec(),
        survival: Vec::with_capacity(thresholds.len()),
        exceedances: Vec::with_capacity(thresholds.len()),
        lower: Vec::with_capacity(thresholds.len()),
        upper: Vec::with_capacity(thresholds.len()),
        ci_halfwidth: Vec::with_capacity(thresholds.len()),
        normalized: Vec::new(),
        normalized_ci: Vec::new(),
        n,
    };
    for &t in thresholds {
        let k = n - sorted.partition_point(|&x| x <= t) as u64;
        let (lo, hi) = wilson(k, n);
        est.survival.push(k as f64 / n as f64);
        est.exceedances.push(k);
        est.lower.push(lo);
        est.upper.push(hi);
        est.ci_halfwidth.push(0.5 * (hi - lo));
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sample() {
        let e = tail_estimate(&[2.0; 10], &[1.0, 3.0]).unwrap();
        assert_eq!(e.survival, alloc::vec![1.0, 0.0]);
        assert!(matches!(tail_estimate(&[], &[1.0]), Err(Error::EmptySample)));
    }
}
