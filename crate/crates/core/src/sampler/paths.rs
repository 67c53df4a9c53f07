use alloc::vec::Vec;
use libm::exp;

use super::{PerpetuitySample, SimConfig, DEFAULT_STREAMS};
use crate::error::{Error, Result};
use crate::model::{ALaw, BLaw, Measure, TiltedLaw};
use crate::rng::{map_blocks, stream};

/// i.i.d. draws of `log A` under the chosen measure.
pub fn sample_log_a(law: &TiltedLaw, measure: Measure, n: usize, seed: u64) -> Vec<f64> {
    let blocks = map_blocks(n, DEFAULT_STREAMS, |i, r| {
        let mut rng = stream(seed, i as u64);
        r.map(|_| law.sample(measure, &mut rng)).collect::<Vec<_>>()
    });
    blocks.concat()
}

fn check_contracting(a: &ALaw) -> Result<()> {
    let m = a.mean_log_a();
    if !(m < 0.0) {
        return Err(Error::NotContracting { mean_log_a: m });
    }
    Ok(())
}

fn check_nu(a: &ALaw, b: &BLaw) -> Result<()> {
    b.validate()?;
    if let Some(law) = a.tilted() {
        if !(b.nu > law.kappa) {
            return Err(Error::InvalidParameter("B moment order nu must exceed kappa"));
        }
    }
    Ok(())
}

/// Run `path` for every path index, in blocks with independent streams.
fn run_paths<F>(cfg: &SimConfig, path: F) -> Result<PerpetuitySample>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> (f64, bool) + Sync + Send,
{
    cfg.validate()?;
    let blocks = map_blocks(cfg.n_paths, cfg.stream_count, |i, r| {
        let mut rng = stream(cfg.seed, i as u64);
        let mut out = Vec::with_capacity(r.len());
        let mut truncated = 0u64;
        for _ in r {
            let (x, cut) = path(&mut rng);
            out.push(x);
            truncated += u64::from(cut);
        }
        (out, truncated)
    });
    let truncated: u64 = blocks.iter().map(|b| b.1).sum();
    let draws: Vec<f64> = blocks.into_iter().flat_map(|b| b.0).collect();
    let sample = PerpetuitySample {
        truncated_fraction: truncated as f64 / cfg.n_paths as f64,
        draws,
        config: *cfg,
    };
    sample.check_truncation()?;
    Ok(sample)
}

/// Draws of `X = sum_k B_k prod_{i<k} A_i` (backward representation).
///
/// A path stops when the running product falls below `trunc_eps`, or at
/// `max_horizon` steps (counted as truncated).
pub fn sample_perpetuity(a: &ALaw, b: &BLaw, cfg: &SimConfig) -> Result<PerpetuitySample> {
    check_contracting(a)?;
    check_nu(a, b)?;
    let eps = cfg.trunc_eps;
    let horizon = cfg.max_horizon;
    run_paths(cfg, |rng| {
        let mut x = 0.0;
        let mut prod = 1.0;
        for _ in 0..horizon {
            let av = exp(a.sample_log(rng));
            let bv = b.sample(av, rng);
            x += prod * bv;
            prod *= av;
            if prod < eps {
                return (x, false);
            }
        }
        (x, true)
    })
}

/// Draws of `X = max_k B_k+ prod_{i<k} A_i`, the solution of `X = AX v B`.
pub fn sample_max_perpetuity(a: &ALaw, b: &BLaw, cfg: &SimConfig) -> Result<PerpetuitySample> {
    check_contracting(a)?;
    check_nu(a, b)?;
    let eps = cfg.trunc_eps;
    let horizon = cfg.max_horizon;
    run_paths(cfg, |rng| {
        let mut x: f64 = 0.0;
        let mut prod = 1.0;
        for _ in 0..horizon {
            let av = exp(a.sample_log(rng));
            let bv = b.sample(av, rng).max(0.0);
            x = x.max(prod * bv);
            prod *= av;
            if prod < eps {
                return (x, false);
            }
        }
        (x, true)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{catalog, BKind};

    #[test]
    fn constant_multiplier_fixed_point() {
        let a = ALaw::Tilted(catalog::constant(0.5).unwrap());
        let s = sample_perpetuity(&a, &BLaw::constant(1.0), &SimConfig::new(1, 100)).unwrap();
        assert!(s.draws.iter().all(|x| (x - 2.0).abs() < 1e-11));
        let m = sample_max_perpetuity(&a, &BLaw::constant(1.0), &SimConfig::new(1, 100)).unwrap();
        assert!(m.draws.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn zero_multiplier_returns_b() {
        let b = BLaw::new(BKind::TwoPoint { b1: 1.0, p: 0.5, b2: 2.0 }, 2.0).unwrap();
        let s = sample_perpetuity(&ALaw::Zero, &b, &SimConfig::new(3, 1000)).unwrap();
        assert!(s.draws.iter().all(|&x| x == 1.0 || x == 2.0));
        assert_eq!(s.truncated_fraction, 0.0);
    }

    #[test]
    fn unit_multiplier_does_not_contract() {
        let law = crate::model::base_from_tilted(crate::model::TailSpec::point_mass(0.0), 1.0).unwrap();
        let r = sample_perpetuity(&ALaw::Tilted(law), &BLaw::constant(1.0), &SimConfig::new(1, 10));
        assert!(matches!(r, Err(Error::NotContracting { .. })));
    }
}
