use perpetuity_core::model::{catalog, ALaw, BKind, BLaw};
use perpetuity_core::sampler::{is_tail_max_rw, sample_max_rw, sample_perpetuity, SimConfig};

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

// X = sum 2^-k B_k with E B = 1, Var B = 1: E X = 2, Var X = 4/3.
#[test]
fn constant_multiplier_moments() {
    let a = ALaw::Tilted(catalog::constant(0.5).unwrap());
    let b = BLaw::new(BKind::TwoPoint { b1: 0.0, p: 0.5, b2: 2.0 }, 2.0).unwrap();
    let n = 200_000;
    let s = sample_perpetuity(&a, &b, &SimConfig::new(11, n)).unwrap();
    let (m, v) = mean_var(&s.draws);
    let se = (4.0 / 3.0 / n as f64).sqrt();
    assert!((m - 2.0).abs() < 4.0 * se, "mean {m}");
    assert!((v - 4.0 / 3.0).abs() < 0.03, "variance {v}");
}

// Walk with steps +1 w.p. 1/5 and -1 w.p. 4/5: P{M >= k} = 4^-k.
#[test]
fn walk_maximum_matches_gamblers_ruin() {
    let law = catalog::two_point_lattice();
    let n = 200_000;
    let m = sample_max_rw(&law, &SimConfig::new(3, n)).unwrap();
    for k in 1..=3 {
        let p = 0.25f64.powi(k);
        let hits = m.draws.iter().filter(|&&x| x >= k as f64 - 1e-9).count() as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits - p).abs() < 4.0 * se, "k = {k}: {hits} vs {p}");
    }
}

#[test]
fn importance_sampling_matches_lattice_law() {
    let law = catalog::two_point_lattice();
    for k in 1..=8 {
        let x = k as f64 - 0.5;
        let e = is_tail_max_rw(&law, x, &SimConfig::new(100 + k, 20_000)).unwrap();
        let p = 0.25f64.powi(k as i32);
        assert!((e.estimate - p).abs() <= 3.0 * e.ci_halfwidth + 1e-15, "k = {k}: {} vs {p}", e.estimate);
        // relative error stays bounded as the event becomes rare
        assert!(e.ci_halfwidth / p < 0.05);
    }
}

#[test]
fn seeds_select_distinct_samples() {
    let law = catalog::case_ii_pareto();
    let a = ALaw::Tilted(law);
    let b = BLaw::new(BKind::ExponentialPos { rate: 1.0 }, 3.0).unwrap();
    let x = sample_perpetuity(&a, &b, &SimConfig::new(1, 1000)).unwrap();
    let y = sample_perpetuity(&a, &b, &SimConfig::new(1, 1000)).unwrap();
    let z = sample_perpetuity(&a, &b, &SimConfig::new(2, 1000)).unwrap();
    assert_eq!(x.draws, y.draws);
    assert_ne!(x.draws, z.draws);
}
