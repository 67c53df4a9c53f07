//! One function per command; each returns its tables and check lines.

use perpetuity_core::diagnostics::{
    delta_subexp_check, doney_sweep, growth_check, slowvary_fit, FitMode, SweepReport, Verdict, MIN_DECADES,
};
use perpetuity_core::model::{
    check_case, solve_kappa, ALaw, BKind, BLaw, CaseTag, Df, LeftKind, RightKind, TailSpec,
    TiltedLaw, KAPPA_BRACKET,
};
use perpetuity_core::renewal::{
    build_grid_df, implicit_renewal_crosscheck, renewal_increments, smooth_integral, smooth_transform, srt_check,
    GridFn, RenewalTable,
};
use perpetuity_core::sampler::{
    estimate_goldie_constant, is_tail_max_rw, sample_max_perpetuity, sample_max_rw, sample_perpetuity, tail_estimate,
    GoldieVariant, PerpetuitySample, SimConfig,
};
use perpetuity_core::special::srt_constant;
use perpetuity_core::stats::weighted_line;
use perpetuity_core::counterexample::counterexample_run;

use crate::config::{Checks, Command, ModelDesc, RunConfig, Target};
use crate::error::LabError;
use crate::output::{Cell, CheckLine, Outcome, Status, Table};

type Res = Result<Outcome, LabError>;

/// Dispatch on the configured command.
pub fn execute(cfg: &RunConfig) -> Res {
    cfg.validate()?;
    match cfg.command {
        Command::SolveKappa => solve_kappa_cmd(cfg),
        Command::BuildModel => build_model(cfg),
        Command::Simulate => simulate(cfg),
        Command::TailTable => tail_table(cfg),
        Command::GoldieConstant => goldie_constant(cfg),
        Command::RenewalCheck => renewal_check(cfg),
        Command::SrtCheck => srt_check_cmd(cfg),
        Command::ImplicitCheck => implicit_check(cfg),
        Command::DoneyCheck => doney_check(cfg),
        Command::SubexpCheck => subexp_check(cfg),
        Command::Counterexample => counterexample(cfg),
    }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn solve_kappa_cmd(cfg: &RunConfig) -> Res {
    let mut out = Outcome::default();
    let mut t = Table::new("kappa", &["kappa", "theta", "log_moment_at_kappa"]);
    let ch = &cfg.checks;
    let kappa = match cfg.model()? {
        ModelDesc::Base { base } => {
            let k = solve_kappa(base, KAPPA_BRACKET)?;
            let r = base.log_moment(k)?;
            t.push(vec![k.into(), 1.0.into(), r.into()]);
            out.checks.push(CheckLine::new(
                "kappa_residual",
                Status::from_bool(r.abs() <= ch.kappa_residual),
                format!("|log E A^kappa| = {r:e} at kappa = {k}"),
            ));
            k
        }
        m => {
            let law = m.tilted_law()?;
            t.push(vec![law.kappa.into(), law.theta.into(), f64::NAN.into()]);
            law.kappa
        }
    };
    if let Some(e) = ch.kappa_expected {
        out.checks.push(CheckLine::new(
            "kappa_expected",
            Status::from_bool(within(kappa, e, ch.kappa_tol)),
            format!("kappa = {kappa}, expected {e} within {:e}", ch.kappa_tol),
        ));
    }
    out.tables.push(t);
    Ok(out)
}

/// Points at which the re-tilted distribution function is compared with `F_kappa`.
pub const ROUND_TRIP_POINTS: [f64; 7] = [-3.0, -0.5, 0.0, 0.7, 2.0, 10.0, 50.0];

fn opt(v: Option<f64>) -> Cell {
    v.unwrap_or(f64::INFINITY).into()
}

fn build_model(cfg: &RunConfig) -> Res {
    let law = cfg.model()?.tilted_law()?;
    let mut out = Outcome::default();
    let report = check_case(&law, cfg.blaw.as_ref());
    let alpha = match law.case {
        CaseTag::CaseI { alpha } => alpha,
        _ => f64::NAN,
    };
    let mut t = Table::new(
        "model",
        &["kappa", "theta", "case", "alpha", "mean_log_a", "tilted_log_moment", "b_log_b", "b_log_a", "b_a_log_a"],
    );
    let flags = report.b_flags;
    t.push(vec![
        law.kappa.into(),
        law.theta.into(),
        law.case.name().into(),
        alpha.into(),
        law.mean_log_a().into(),
        opt(report.tilted_log_moment),
        flags.map_or(Cell::Num(f64::NAN), |f| opt(f.b_log_b)),
        flags.map_or(Cell::Num(f64::NAN), |f| opt(f.b_log_a)),
        flags.map_or(Cell::Num(f64::NAN), |f| opt(f.b_a_log_a)),
    ]);
    out.tables.push(t);

    let tol = cfg.checks.tilt_tol;
    let norm = law.theta * law.fkappa.expect(|y| (-law.kappa * y).exp()).value;
    out.checks.push(CheckLine::new(
        "tilt_normalization",
        Status::from_bool(within(norm, 1.0, tol)),
        format!("theta * int e^(-kappa y) F_kappa(dy) = {norm}"),
    ));
    let mut rt = Table::new("round_trip", &["x", "cdf", "retilted_cdf", "abs_error"]);
    let mut worst: f64 = 0.0;
    for x in ROUND_TRIP_POINTS {
        let a = law.fkappa.cdf(x);
        let b = law.retilt_cdf(x);
        worst = worst.max((a - b).abs());
        rt.push(vec![x.into(), a.into(), b.into(), (a - b).abs().into()]);
    }
    out.tables.push(rt);
    out.checks.push(CheckLine::new(
        "tilt_round_trip",
        Status::from_bool(worst <= tol),
        format!("max |F_kappa - retilted| = {worst:e}"),
    ));
    Ok(out)
}

/// Draws of the configured target; `WalkMaximum` draws are returned as `e^M`.
pub fn draw(cfg: &RunConfig, law: &TiltedLaw) -> Result<PerpetuitySample, LabError> {
    let a = ALaw::Tilted(*law);
    Ok(match cfg.tail.target {
        Target::Perpetuity => sample_perpetuity(&a, cfg.blaw()?, &cfg.sim)?,
        Target::MaxEquation => sample_max_perpetuity(&a, cfg.blaw()?, &cfg.sim)?,
        Target::WalkMaximum => {
            let mut s = sample_max_rw(law, &cfg.sim)?;
            for v in &mut s.draws {
                *v = v.exp();
            }
            s
        }
        Target::WalkMaximumIs => {
            return Err(LabError::config("importance sampling does not produce draws; use tail-table"))
        }
    })
}

fn tail_rows(name: &str, est: &perpetuity_core::sampler::TailEstimate) -> Table {
    let mut t = Table::new(
        name,
        &["threshold", "survival", "exceedances", "lower", "upper", "ci_halfwidth", "normalized", "normalized_ci"],
    );
    for i in 0..est.thresholds.len() {
        let (nv, nc) = if est.normalized.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            (est.normalized[i], est.normalized_ci[i])
        };
        t.push(vec![
            est.thresholds[i].into(),
            est.survival[i].into(),
            est.exceedances[i].into(),
            est.lower[i].into(),
            est.upper[i].into(),
            est.ci_halfwidth[i].into(),
            nv.into(),
            nc.into(),
        ]);
    }
    t
}

fn simulate(cfg: &RunConfig) -> Res {
    let law = cfg.model()?.tilted_law()?;
    let s = draw(cfg, &law)?;
    let est = tail_estimate(&s.draws, &cfg.tail.threshold_ladder())?;
    let mut out = Outcome::default();
    out.tables.push(tail_rows("tail", &est));
    if cfg.tail.dump_samples {
        let mut t = Table::new("samples", &["index", "value"]);
        for (i, v) in s.draws.iter().enumerate() {
            t.push(vec![i.into(), (*v).into()]);
        }
        out.tables.push(t);
    }
    out.checks.push(CheckLine::new(
        "truncation",
        Status::Pass,
        format!("{} of {} paths stopped by the horizon", s.truncated_fraction, s.draws.len()),
    ));
    Ok(out)
}

/// Default normalization for a model case.
pub fn fit_mode(law: &TiltedLaw) -> Result<FitMode, LabError> {
    Ok(match law.case {
        CaseTag::CaseI { .. } => FitMode::CaseI,
        CaseTag::CaseII => FitMode::CaseII,
        CaseTag::Classical => FitMode::Classical,
        CaseTag::LightSubcritical => {
            return Err(perpetuity_core::Error::CaseMismatch("no tail normalization for a light subcritical law").into())
        }
    })
}

/// Factor turning the tail constant `E[...]` into the limit of the normalized tail.
pub fn constant_factor(law: &TiltedLaw, mode: FitMode) -> f64 {
    let k = law.kappa;
    match mode {
        FitMode::CaseI => srt_constant(perpetuity_core::renewal::srt_index(&law.fkappa)) / k,
        FitMode::CaseII => law.theta / ((1.0 - law.theta) * (1.0 - law.theta) * k),
        FitMode::Classical => 1.0 / (k * law.fkappa.expect(|y| y).value),
    }
}

fn slope_status(slope: f64, decades: f64, ch: &Checks) -> Status {
    if decades < MIN_DECADES {
        Status::Inconclusive
    } else {
        Status::from_bool(slope.abs() < ch.slope_tol)
    }
}

fn tail_table(cfg: &RunConfig) -> Res {
    let law = cfg.model()?.tilted_law()?;
    if cfg.tail.target == Target::WalkMaximumIs {
        return walk_max_is(cfg, &law);
    }
    let ch = &cfg.checks;
    let mode = match cfg.tail.fit {
        Some(m) => m,
        None => fit_mode(&law)?,
    };
    let s = draw(cfg, &law)?;
    let mut est = tail_estimate(&s.draws, &cfg.tail.threshold_ladder())?;
    let fit = slowvary_fit(&mut est, &law, mode)?;
    let mut out = Outcome::default();
    out.tables.push(tail_rows("tail", &est));
    let used: Vec<f64> = fit.sweep.rows.iter().map(|r| r.x).collect();
    let span = (used[used.len() - 1] / used[0]).log10();
    out.checks.push(CheckLine::new(
        "slowvary_slope",
        slope_status(fit.sweep.slope, span, ch),
        format!("slope {} over {span:.2} decades ({} thresholds)", fit.sweep.slope, used.len()),
    ));
    let mut summary = Table::new("plateau", &["mode", "plateau_x", "plateau", "plateau_ci", "slope", "decades"]);
    summary.push(vec![
        format!("{mode:?}").to_lowercase().as_str().into(),
        fit.plateau_x.into(),
        fit.plateau.into(),
        fit.plateau_ci.into(),
        fit.sweep.slope.into(),
        span.into(),
    ]);
    out.tables.push(summary);

    if cfg.tail.goldie_pairs > 0 {
        let (a, b) = match cfg.tail.target {
            Target::WalkMaximum => (ALaw::Tilted(law), BLaw::constant(1.0)),
            _ => (ALaw::Tilted(law), *cfg.blaw()?),
        };
        let variant = match cfg.tail.target {
            Target::WalkMaximum | Target::MaxEquation => GoldieVariant::Max,
            _ => cfg.tail.goldie_variant,
        };
        let seed = cfg.sim.seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let g = estimate_goldie_constant(&s, &a, &b, law.kappa, cfg.tail.goldie_pairs, seed, variant)?;
        let factor = constant_factor(&law, mode);
        let predicted = factor * g.estimate;
        let predicted_ci = factor * g.ci_halfwidth;
        let gap = (fit.plateau - predicted).abs();
        let allowed = fit.plateau_ci + predicted_ci + ch.constant_slack * predicted.abs();
        let mut t = Table::new(
            "constant",
            &["variant", "goldie", "goldie_ci", "factor", "predicted", "predicted_ci", "plateau", "plateau_ci", "gap", "allowed"],
        );
        t.push(vec![
            variant.name().into(),
            g.estimate.into(),
            g.ci_halfwidth.into(),
            factor.into(),
            predicted.into(),
            predicted_ci.into(),
            fit.plateau.into(),
            fit.plateau_ci.into(),
            gap.into(),
            allowed.into(),
        ]);
        out.tables.push(t);
        out.checks.push(CheckLine::new(
            "tail_constant",
            Status::from_bool(gap <= allowed),
            format!(
                "plateau {} +- {} at x = {}, predicted {} +- {}",
                fit.plateau, fit.plateau_ci, fit.plateau_x, predicted, predicted_ci
            ),
        ));
    }
    Ok(out)
}

/// `P{M > x} = r^{floor(x) + 1}` for a walk with steps `+1` and `-1` under
/// `P`, where `r = P{+1} / P{-1}`; `None` for other laws.
pub fn lattice_oracle(law: &TiltedLaw, x: f64) -> Option<f64> {
    match (law.fkappa.left, law.fkappa.right) {
        (LeftKind::PointMass { location: l, .. }, RightKind::PointMass { location: r }) if l == -1.0 && r == 1.0 => {
            let atoms = law.base_atoms();
            let up: f64 = atoms.iter().filter(|(y, _)| *y == 1.0).map(|a| a.1).sum();
            let down: f64 = atoms.iter().filter(|(y, _)| *y == -1.0).map(|a| a.1).sum();
            Some((up / down).powf(x.floor() + 1.0))
        }
        _ => None,
    }
}

fn walk_max_is(cfg: &RunConfig, law: &TiltedLaw) -> Res {
    let ch = &cfg.checks;
    let xs = cfg.tail.threshold_ladder();
    let k = law.kappa;
    let mode = match cfg.tail.fit {
        Some(m) => m,
        None => fit_mode(law)?,
    };
    let mut t = Table::new("is_tail", &["x", "estimate", "ci_halfwidth", "normalized", "normalized_ci", "oracle"]);
    let (mut lx, mut ly, mut w) = (Vec::new(), Vec::new(), Vec::new());
    let mut oracle_ok = true;
    let mut has_oracle = false;
    for (i, &x) in xs.iter().enumerate() {
        let sim = SimConfig {
            seed: cfg.sim.seed.wrapping_add(i as u64),
            ..cfg.sim
        };
        let e = is_tail_max_rw(law, x, &sim)?;
        let factor = (k * x).exp()
            * match mode {
                FitMode::CaseI => law.fkappa.truncated_mean(x),
                FitMode::CaseII => 1.0 / law.fkappa.window(x, 1.0),
                FitMode::Classical => 1.0,
            };
        let oracle = lattice_oracle(law, x);
        if let Some(o) = oracle {
            has_oracle = true;
            oracle_ok &= (e.estimate - o).abs() <= ch.ci_multiplier * e.ci_halfwidth + 1e-15 * o;
        }
        let nv = factor * e.estimate;
        let nc = factor * e.ci_halfwidth;
        t.push(vec![
            x.into(),
            e.estimate.into(),
            e.ci_halfwidth.into(),
            nv.into(),
            nc.into(),
            oracle.unwrap_or(f64::NAN).into(),
        ]);
        if x > 1.0 && nv > 0.0 {
            lx.push(x.ln());
            ly.push(nv.ln());
            let rel = nc / nv;
            w.push(1.0 / (rel * rel).max(1e-300));
        }
    }
    let mut out = Outcome::default();
    out.tables.push(t);
    if has_oracle {
        out.checks.push(CheckLine::new(
            "lattice_oracle",
            Status::from_bool(oracle_ok),
            format!("importance estimates within {} intervals of r^(floor(x)+1)", ch.ci_multiplier),
        ));
    } else if lx.len() >= 2 {
        let (_, s) = weighted_line(&lx, &ly, &w);
        let span = (lx[lx.len() - 1] - lx[0]) / std::f64::consts::LN_10;
        let status = if span < 1.5 {
            Status::Inconclusive
        } else {
            Status::from_bool(s.abs() < ch.slope_tol)
        };
        out.checks.push(CheckLine::new("is_slope", status, format!("slope {s} over {span:.2} decades")));
    }
    Ok(out)
}

fn goldie_constant(cfg: &RunConfig) -> Res {
    let law = cfg.model()?.tilted_law()?;
    let b = *cfg.blaw()?;
    let a = ALaw::Tilted(law);
    let s = sample_perpetuity(&a, &b, &cfg.sim)?;
    let n_pairs = if cfg.tail.goldie_pairs > 0 {
        cfg.tail.goldie_pairs
    } else {
        cfg.sim.n_paths
    };
    let seed = cfg.sim.seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut t = Table::new("goldie", &["variant", "estimate", "ci_halfwidth", "n"]);
    let mut ests = Vec::new();
    for v in [GoldieVariant::Plus, GoldieVariant::Minus, GoldieVariant::Max] {
        let g = estimate_goldie_constant(&s, &a, &b, law.kappa, n_pairs, seed, v)?;
        t.push(vec![v.name().into(), g.estimate.into(), g.ci_halfwidth.into(), g.n.into()]);
        ests.push(g);
    }
    let mut out = Outcome::default();
    out.tables.push(t);
    let k = cfg.checks.ci_multiplier;
    if let BKind::FixedPoint { x0 } = b.kind {
        let spread = s.draws.iter().map(|x| (x - x0).abs()).fold(0.0, f64::max);
        out.checks.push(CheckLine::new(
            "degenerate_draws",
            Status::from_bool(spread <= 1e-9 * x0.abs().max(1.0)),
            format!("max |X - x0| = {spread:e}"),
        ));
        // only the constants of X = AX + B vanish; the max-equation constant does not
        let ok = ests[..2].iter().all(|g| g.estimate.abs() <= k * g.ci_halfwidth + 1e-12);
        let detail: Vec<String> = ests[..2]
            .iter()
            .map(|g| format!("{} {:e} +- {:e}", g.variant.name(), g.estimate, g.ci_halfwidth))
            .collect();
        out.checks.push(CheckLine::new("degenerate_constants", Status::from_bool(ok), detail.join(", ")));
    } else {
        let sum = ests[0].estimate + ests[1].estimate;
        let ci = ests[0].ci_halfwidth + ests[1].ci_halfwidth;
        let status = if sum - k * ci > 0.0 {
            Status::Pass
        } else if sum + k * ci < 0.0 {
            Status::Fail
        } else {
            Status::Inconclusive
        };
        out.checks.push(CheckLine::new(
            "constant_positivity",
            status,
            format!("plus + minus = {sum} +- {ci}"),
        ));
    }
    Ok(out)
}

/// `F_kappa` and `theta` for the renewal commands; a bare tail model is
/// taken with `theta = 1`.
fn renewal_law(cfg: &RunConfig) -> Result<(TailSpec, f64), LabError> {
    match cfg.model()? {
        ModelDesc::Tail { spec } => Ok((*spec, 1.0)),
        m => {
            let law = m.tilted_law()?;
            Ok((law.fkappa, law.theta))
        }
    }
}

fn renewal_table(cfg: &RunConfig, spec: &TailSpec, theta: f64) -> Result<RenewalTable, LabError> {
    let g = &cfg.grid;
    let fk = build_grid_df(spec, g.x_min, g.x_max, g.h)?;
    Ok(renewal_increments(&fk, theta, g.report_step, g.n_max, g.tol)?)
}

/// Test functions for the smoothing transform: an indicator with a closed
/// form transform, a Gaussian bump and a signed damped sine.
pub fn smoothing_test_functions() -> [(&'static str, fn(f64) -> f64); 3] {
    [
        ("indicator", |x| if x > 0.0 && x <= 1.0 { 1.0 } else { 0.0 }),
        ("bump", |x| (-(x - 2.0) * (x - 2.0)).exp()),
        ("signed", |x| (-x.abs()).exp() * x.sin()),
    ]
}

fn renewal_check(cfg: &RunConfig) -> Res {
    let (spec, theta) = renewal_law(cfg)?;
    let ch = &cfg.checks;
    let table = renewal_table(cfg, &spec, theta)?;
    let mut out = Outcome::default();
    let mut t = Table::new("increments", &["x", "increment"]);
    for (x, v) in table.increments() {
        t.push(vec![x.into(), v.into()]);
    }
    out.tables.push(t);
    let mut s = Table::new("renewal_summary", &["theta", "terms", "total_mass", "mass_deficit", "outside_mass"]);
    s.push(vec![
        theta.into(),
        table.terms.into(),
        table.total_mass().into(),
        table.mass_deficit.into(),
        table.outside_mass.into(),
    ]);
    out.tables.push(s);
    if theta < 1.0 {
        let target = 1.0 / (1.0 - theta);
        let m = table.total_mass();
        out.checks.push(CheckLine::new(
            "geometric_mass",
            Status::from_bool(within(m, target, ch.geometric_mass_tol)),
            format!("total mass {m}, 1/(1 - theta) = {target}"),
        ));
    } else {
        let mean = spec.expect(|y| y);
        if mean.converged && mean.value.is_finite() && mean.value > 0.0 {
            let x = cfg.grid.blackwell_x;
            let inc = table.increment(x, 1.0);
            let r = inc * mean.value;
            out.checks.push(CheckLine::new(
                "blackwell",
                Status::from_bool(within(r, 1.0, ch.blackwell_band)),
                format!("U({}) - U({x}) = {inc}, times mean = {r}", x + 1.0),
            ));
        }
    }
    let mut sm = Table::new("smoothing", &["function", "integral", "smoothed_integral", "rel_error"]);
    let mut ok = true;
    for (name, f) in smoothing_test_functions() {
        let g = GridFn::from_fn(f, -20.0, 20.0, cfg.grid.h)?;
        let ghat = smooth_transform(&g)?;
        let a = g.integral();
        let b = smooth_integral(&g, &ghat);
        let scale = g.values.iter().map(|v| v.abs()).sum::<f64>() * g.h;
        let rel = (a - b).abs() / scale;
        ok &= rel <= ch.smoothing_rel_tol;
        sm.push(vec![name.into(), a.into(), b.into(), rel.into()]);
    }
    out.tables.push(sm);
    out.checks.push(CheckLine::new(
        "smoothing_integral",
        Status::from_bool(ok),
        "integral of the smoothing transform against the original",
    ));
    Ok(out)
}

fn srt_check_cmd(cfg: &RunConfig) -> Res {
    let (spec, theta) = renewal_law(cfg)?;
    if theta != 1.0 {
        return Err(perpetuity_core::Error::CaseMismatch("the local renewal limit needs theta = 1").into());
    }
    let ladder = cfg.grid.srt_ladder();
    let table = renewal_table(cfg, &spec, theta)?;
    let w = cfg.grid.report_step;
    let r = srt_check(&table, &spec, w, &ladder)?;
    let mut t = Table::new("srt", &["x", "m", "increment", "value", "reference", "ratio"]);
    for row in &r.rows {
        t.push(vec![
            row.x.into(),
            row.m.into(),
            row.increment.into(),
            row.value.into(),
            row.reference.into(),
            row.ratio.into(),
        ]);
    }
    let mut out = Outcome::default();
    out.tables.push(t);
    let ok = within(r.last_ratio, 1.0, cfg.checks.srt_band) && r.monotone_last_decade;
    out.checks.push(CheckLine::new(
        "srt_ratio",
        Status::from_bool(ok),
        format!(
            "ratio {} at x = {}, monotone over the last decade: {}",
            r.last_ratio,
            ladder[ladder.len() - 1],
            r.monotone_last_decade
        ),
    ));
    Ok(out)
}

fn implicit_check(cfg: &RunConfig) -> Res {
    let law = cfg.model()?.tilted_law()?;
    let a = ALaw::Tilted(law);
    let s = sample_perpetuity(&a, cfg.blaw()?, &cfg.sim)?;
    let r = implicit_renewal_crosscheck(&law, &s, &cfg.implicit)?;
    let mut t = Table::new("implicit", &["x", "psi", "psi_ci", "f_direct", "f_iterated"]);
    for i in 0..r.nodes.len() {
        t.push(vec![
            r.nodes[i].into(),
            r.psi[i].into(),
            r.psi_ci[i].into(),
            r.f_direct[i].into(),
            r.f_iterated[i].into(),
        ]);
    }
    let mut s = Table::new(
        "implicit_summary",
        &[
            "psi_integral",
            "psi_hat_integral",
            "zeroed_cells",
            "bias_bound",
            "max_rel_gap",
            "reliable_cells",
            "normalized_top",
            "normalized_top_x",
            "predicted_limit",
            "iterations",
        ],
    );
    s.push(vec![
        r.psi_integral.into(),
        r.psi_hat_integral.into(),
        r.zeroed_cells.into(),
        r.bias_bound.into(),
        r.max_rel_gap.into(),
        r.reliable_cells.into(),
        r.normalized_top.into(),
        r.normalized_top_x.into(),
        r.predicted_limit.into(),
        r.iterations.into(),
    ]);
    let mut out = Outcome::default();
    out.tables.push(t);
    out.tables.push(s);
    let status = if r.reliable_cells == 0 {
        Status::Inconclusive
    } else {
        Status::from_bool(r.max_rel_gap <= cfg.checks.implicit_gap)
    };
    out.checks.push(CheckLine::new(
        "implicit_gap",
        status,
        format!("max relative gap {} over {} reliable cells", r.max_rel_gap, r.reliable_cells),
    ));
    Ok(out)
}

fn verdict_status(v: Verdict, expected: Option<Verdict>) -> Status {
    match expected {
        Some(e) => Status::from_bool(v == e),
        None => match v {
            Verdict::Consistent => Status::Pass,
            Verdict::Inconsistent => Status::Fail,
            Verdict::Inconclusive => Status::Inconclusive,
        },
    }
}

fn sweep_table(name: &str, param: &'static str, r: &SweepReport) -> Table {
    let mut t = Table::new(name, &["x", param, "value"]);
    for row in &r.rows {
        t.push(vec![row.x.into(), row.param.into(), row.value.into()]);
    }
    t
}

fn doney_check(cfg: &RunConfig) -> Res {
    let spec = cfg.model()?.tail_spec()?;
    let d = &cfg.diagnostics;
    let r = doney_sweep(&spec, &d.xs, &d.deltas)?;
    let mut out = Outcome::default();
    out.tables.push(sweep_table("doney", "delta", &r));
    out.checks.push(CheckLine::new(
        "doney_verdict",
        verdict_status(r.verdict, cfg.checks.expected_verdict),
        format!("verdict {}, fitted exponent {}", r.verdict.name(), r.slope),
    ));
    if let Some(e) = cfg.checks.doney_exponent {
        out.checks.push(CheckLine::new(
            "doney_exponent",
            Status::from_bool(within(r.slope, e, cfg.checks.doney_exponent_tol)),
            format!("exponent {} against {e}", r.slope),
        ));
    }
    Ok(out)
}

fn subexp_check(cfg: &RunConfig) -> Res {
    let spec = cfg.model()?.tail_spec()?;
    let d = &cfg.diagnostics;
    let r = delta_subexp_check(&spec, d.t, &d.xs)?;
    let g = growth_check(&spec, d.t, &d.xs)?;
    let mut out = Outcome::default();
    out.tables.push(sweep_table("subexp", "shift", &r));
    out.tables.push(sweep_table("growth", "window", &g));
    out.checks.push(CheckLine::new(
        "subexp_verdict",
        verdict_status(r.verdict, cfg.checks.expected_verdict),
        format!("verdict {}, last deviation {}", r.verdict.name(), r.last_value),
    ));
    out.checks.push(CheckLine::new(
        "growth_verdict",
        verdict_status(g.verdict, None),
        format!("verdict {}, slope {}", g.verdict.name(), g.slope),
    ));
    Ok(out)
}

fn counterexample(cfg: &RunConfig) -> Res {
    let r = counterexample_run(&cfg.counterexample)?;
    let ch = &cfg.checks;
    let mut t = Table::new("counterexample", &["n", "d_n", "v_n", "lower_bound", "off_spike_value", "clipped_value"]);
    for row in &r.rows {
        t.push(vec![
            row.n.into(),
            row.d_n.into(),
            row.v_n.into(),
            row.lower_bound.into(),
            row.off_spike_value.into(),
            row.clipped_value.into(),
        ]);
    }
    let mut s = Table::new(
        "counterexample_summary",
        &[
            "alpha",
            "beta",
            "a",
            "u_window",
            "slope",
            "predicted_slope",
            "clipped_slope",
            "z_integral",
            "dri_upper_sum",
            "c_alpha",
            "off_spike_reference",
            "doney_exponent",
            "doney_verdict",
            "condition_proven",
        ],
    );
    s.push(vec![
        r.alpha.into(),
        r.beta.into(),
        r.a.into(),
        r.u_window.into(),
        r.slope.into(),
        r.predicted_slope.into(),
        r.clipped_slope.into(),
        r.z_integral.into(),
        r.dri_upper_sum.into(),
        r.c_alpha.into(),
        r.off_spike_reference.into(),
        r.doney_exponent.into(),
        r.doney_verdict.name().into(),
        r.condition_proven.into(),
    ]);
    let mut out = Outcome::default();
    out.tables.push(t);
    out.tables.push(s);
    out.checks.push(CheckLine::new(
        "lower_bound_increasing",
        Status::from_bool(r.strictly_increasing && r.bound_holds),
        format!("strictly increasing: {}, v_n >= bound: {}", r.strictly_increasing, r.bound_holds),
    ));
    out.checks.push(CheckLine::new(
        "growth_slope",
        Status::from_bool(within(r.slope, ch.counterexample_slope, ch.counterexample_slope_tol)),
        format!("slope {} (2(1 - alpha) - beta = {})", r.slope, r.predicted_slope),
    ));
    out.checks.push(CheckLine::new(
        "clipped_control",
        Status::from_bool(r.clipped_slope <= 0.0),
        format!("clipped slope {}", r.clipped_slope),
    ));
    Ok(out)
}
