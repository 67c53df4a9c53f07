use libm::{exp, log};

use super::{PerpetuitySample, SimConfig};
use crate::error::{Error, Result};
use crate::model::{Measure, TiltedLaw};
use crate::rng::{map_blocks, stream};
use crate::stats::Moments;

/// Draws of `M = max{0, S_1, S_2, ...}` for the walk with steps `log A` under `P`.
///
/// A path stops once `S_n < -log(1/trunc_eps)`; the neglected event is a
/// later rebound above the running maximum from below that barrier.
pub fn sample_max_rw(law: &TiltedLaw, cfg: &SimConfig) -> Result<PerpetuitySample> {
    cfg.validate()?;
    let m = law.mean_log_a();
    if !(m < 0.0) {
        return Err(Error::NotContracting { mean_log_a: m });
    }
    let barrier = -log(cfg.trunc_eps);
    let blocks = map_blocks(cfg.n_paths, cfg.stream_count, |i, r| {
        let mut rng = stream(cfg.seed, i as u64);
        let mut out = alloc::vec::Vec::with_capacity(r.len());
        let mut truncated = 0u64;
        for _ in r {
            let mut s = 0.0;
            let mut mx: f64 = 0.0;
            let mut done = false;
            for _ in 0..cfg.max_horizon {
                s += law.sample(Measure::P, &mut rng);
                mx = mx.max(s);
                if s < -barrier {
                    done = true;
                    break;
                }
            }
            truncated += u64::from(!done);
            out.push(mx);
        }
        (out, truncated)
    });
    let truncated: u64 = blocks.iter().map(|b| b.1).sum();
    let sample = PerpetuitySample {
        truncated_fraction: truncated as f64 / cfg.n_paths as f64,
        draws: blocks.into_iter().flat_map(|b| b.0).collect(),
        config: *cfg,
    };
    sample.check_truncation()?;
    Ok(sample)
}

/// Importance-sampling estimate with a 95% normal interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsEstimate {
    pub x: f64,
    pub estimate: f64,
    pub ci_halfwidth: f64,
    pub n: u64,
}

/// `P{M > x}` by simulating the walk under `P_kappa` up to the first passage
/// `tau` above `x` and averaging `e^{-kappa S_tau}`.
///
/// Requires `theta = 1`, where the tilted walk drifts to `+inf`.
pub fn is_tail_max_rw(law: &TiltedLaw, x: f64, cfg: &SimConfig) -> Result<IsEstimate> {
    cfg.validate()?;
    if law.theta != 1.0 {
        return Err(Error::CaseMismatch("importance sampling of the maximum needs theta = 1"));
    }
    let k = law.kappa;
    let blocks = map_blocks(cfg.n_paths, cfg.stream_count, |i, r| {
        let mut rng = stream(cfg.seed, i as u64);
        let mut m = Moments::default();
        for _ in r {
            let mut s = 0.0;
            let mut steps = 0u64;
            while s <= x {
                if steps == cfg.max_horizon {
                    return Err(Error::HorizonExceeded {
                        horizon: cfg.max_horizon,
                    });
                }
                s += law.sample(Measure::PKappa, &mut rng);
                steps += 1;
            }
            m.push(exp(-k * s));
        }
        Ok(m)
    });
    let mut total = Moments::default();
    for b in blocks {
        total = total.merge(&b?);
    }
    Ok(IsEstimate {
        x,
        estimate: total.mean,
        ci_halfwidth: total.ci_halfwidth(),
        n: total.n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::catalog;

    #[test]
    fn decreasing_walk_has_zero_maximum() {
        let law = catalog::constant(libm::exp(-1.0)).unwrap();
        let m = sample_max_rw(&law, &SimConfig::new(2, 200)).unwrap();
        assert!(m.draws.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn is_requires_critical_theta() {
        let law = catalog::case_ii_pareto();
        assert!(matches!(
            is_tail_max_rw(&law, 1.0, &SimConfig::new(1, 10)),
            Err(Error::CaseMismatch(_))
        ));
    }

    #[test]
    fn is_bounded_by_exponential() {
        let law = catalog::two_point_lattice();
        let e = is_tail_max_rw(&law, 2.5, &SimConfig::new(5, 20_000)).unwrap();
        assert!(e.estimate <= libm::exp(-law.kappa * 2.5));
        // P{M >= 3} = 0.25^3
        assert!((e.estimate - 0.015625).abs() < 3.0 * e.ci_halfwidth + 1e-12);
    }
}
