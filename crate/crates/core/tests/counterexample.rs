use perpetuity_core::counterexample::*;
use perpetuity_core::diagnostics::Verdict;
use perpetuity_core::Error;

#[test]
fn spike_integral_matches_partial_sum() {
    let s = SpikeSpec { beta: 1.1, n_max: 30 };
    let z = build_spiky_z(&s, 0.0, 905.0, 0.05).unwrap();
    let partial: f64 = (1..=30).map(|n| 0.5 * (n as f64).powf(-1.1)).sum();
    assert!((z.integral() - partial).abs() < 1e-12);
    assert!((s.integral() - partial).abs() < 1e-15);
    let upper = dri_upper_sum(&z);
    assert!(upper <= 4.0 * partial + 1e-12 && upper >= 2.0 * partial);
}

#[test]
fn spikes_sit_on_squares() {
    let s = SpikeSpec { beta: 1.3, n_max: 5 };
    let z = build_spiky_z(&s, 0.0, 30.0, 0.25).unwrap();
    for n in 1..=5usize {
        let d = (n * n) as f64;
        assert_eq!(z.at(d), (n as f64).powf(-1.3));
        assert_eq!(z.at(d - 0.5), 0.0);
        assert_eq!(z.at(d + 0.5), 0.0);
    }
}

#[test]
fn parameter_region_is_enforced() {
    let p = CounterexampleParams {
        beta: 1.3,
        ..Default::default()
    };
    assert!(matches!(counterexample_run(&p), Err(Error::ParamViolation(_))));
    let p = CounterexampleParams {
        alpha: 0.6,
        ..Default::default()
    };
    assert!(matches!(counterexample_run(&p), Err(Error::ParamViolation(_))));
    assert!(matches!(
        build_spiky_z(&SpikeSpec { beta: 0.9, n_max: 3 }, 0.0, 10.0, 0.05),
        Err(Error::ParamViolation(_))
    ));
}

#[test]
fn lower_bound_grows_and_clipped_control_does_not() {
    let r = counterexample_run(&CounterexampleParams::default()).unwrap();
    assert!(r.strictly_increasing);
    assert!(r.bound_holds);
    for row in &r.rows {
        assert!(row.v_n >= row.lower_bound * (1.0 - 1e-12));
    }
    assert!((r.slope - 0.1).abs() <= 0.05, "slope {}", r.slope);
    assert!(r.clipped_slope <= 0.0, "clipped slope {}", r.clipped_slope);
    assert!(r.u_window > 1e-3);
    assert_eq!(r.doney_verdict, Verdict::Consistent);
    assert!(!r.condition_proven);
    for row in r.rows.iter().filter(|row| row.n >= 10 && row.n < 30) {
        let ratio = row.off_spike_value / r.off_spike_reference;
        assert!((0.5..=2.0).contains(&ratio), "n = {}: {ratio}", row.n);
    }
}
