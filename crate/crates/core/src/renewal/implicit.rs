//! Grid cross-check of the implicit renewal equation `f = psi + theta F * f`
//! with `f(x) = e^{kappa x} P{X > e^x}` estimated from simulation.

use alloc::vec::Vec;
use libm::{exp, sqrt};

use super::grid::{build_grid_df, convolve_window, GridFn, GridKind};
use super::key::key_renewal_limit;
use super::smooth::{smooth_integral, smooth_transform};
use super::table::{renewal_increments, srt_index};
use crate::error::{Error, Result};
use crate::model::{ALaw, Df, TiltedLaw};
use crate::rng::{map_blocks, stream};
use crate::sampler::PerpetuitySample;
use crate::special::srt_constant;
use crate::stats::Z95;

/// Grid and noise settings for the implicit renewal check.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ImplicitParams {
    pub x_min: f64,
    pub x_max: f64,
    pub h: f64,
    /// Seed for the fresh multipliers paired with the `X` draws.
    pub seed: u64,
    /// Relative CI of the direct `f` below which a cell counts as reliable.
    pub reliable_rel_ci: f64,
}

impl Default for ImplicitParams {
    fn default() -> Self {
        ImplicitParams {
            x_min: -6.0,
            x_max: 4.0,
            h: 0.02,
            seed: 1,
            reliable_rel_ci: 0.1,
        }
    }
}

/// `psi` on a grid with pointwise 95% half-widths.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiGrid {
    pub psi: GridFn,
    pub ci: Vec<f64>,
    /// `e^{kappa x} P^{X > e^x}` on the same nodes.
    pub f_direct: GridFn,
    pub f_ci: Vec<f64>,
}

fn survival_sorted(sorted: &[f64], t: f64) -> f64 {
    let n = sorted.len();
    (n - sorted.partition_point(|&x| x <= t)) as f64 / n as f64
}

/// `psi(x) = e^{kappa x} (P^{X > e^x} - P^{AX > e^x})` from the `X` draws and
/// one fresh multiplier per draw.
pub fn psi_on_grid(xs: &PerpetuitySample, a: &ALaw, kappa: f64, params: &ImplicitParams) -> Result<PsiGrid> {
    if xs.draws.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sx = xs.draws.clone();
    sx.sort_unstable_by(f64::total_cmp);
    let draws = &xs.draws;
    let blocks = map_blocks(draws.len(), xs.config.stream_count, |i, r| {
        let mut rng = stream(params.seed, i as u64);
        r.map(|j| exp(a.sample_log(&mut rng)) * draws[j]).collect::<Vec<_>>()
    });
    let mut sax: Vec<f64> = blocks.concat();
    sax.sort_unstable_by(f64::total_cmp);
    let n = sx.len() as f64;
    let mut psi = GridFn::zeros(params.x_min, params.x_max, params.h, GridKind::Pointwise)?;
    let mut f = psi.clone();
    let mut ci = Vec::with_capacity(psi.len());
    let mut f_ci = Vec::with_capacity(psi.len());
    for i in 0..psi.len() {
        let x = psi.node(i);
        let t = exp(x);
        let w = exp(kappa * x);
        let p1 = survival_sorted(&sx, t);
        let p2 = survival_sorted(&sax, t);
        psi.values[i] = w * (p1 - p2);
        f.values[i] = w * p1;
        ci.push(w * Z95 * sqrt((p1 * (1.0 - p1) + p2 * (1.0 - p2)) / n));
        f_ci.push(w * Z95 * sqrt(p1 * (1.0 - p1) / n));
    }
    Ok(PsiGrid {
        psi,
        ci,
        f_direct: f,
        f_ci,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitReport {
    pub nodes: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi_ci: Vec<f64>,
    pub f_direct: Vec<f64>,
    pub f_iterated: Vec<f64>,
    /// Cells where `psi`'s interval straddled zero and the value was zeroed.
    pub zeroed_cells: usize,
    /// `h * sum |psi|` over the zeroed cells.
    pub bias_bound: f64,
    pub psi_integral: f64,
    pub psi_hat_integral: f64,
    /// Largest relative gap between the iterated and the direct `f` on
    /// reliable cells away from the right edge (smoothed when `theta = 1`).
    pub max_rel_gap: f64,
    pub reliable_cells: usize,
    /// Normalized direct `f` at the largest reliable node.
    pub normalized_top: f64,
    pub normalized_top_x: f64,
    /// Limit predicted from `int psi`.
    pub predicted_limit: f64,
    pub iterations: usize,
}

/// Estimate `psi` from simulation, solve the renewal equation on the grid
/// and compare with the directly estimated `f`.
pub fn implicit_renewal_crosscheck(
    law: &TiltedLaw,
    xs: &PerpetuitySample,
    params: &ImplicitParams,
) -> Result<ImplicitReport> {
    xs.check_truncation()?;
    let a = ALaw::Tilted(*law);
    let kappa = law.kappa;
    let theta = law.theta;
    let pg = psi_on_grid(xs, &a, kappa, params)?;
    let mut psi = pg.psi.clone();
    let mut zeroed = 0usize;
    let mut bias = 0.0;
    for (v, c) in psi.values.iter_mut().zip(&pg.ci) {
        if v.abs() <= *c {
            bias += v.abs() * params.h;
            *v = 0.0;
            zeroed += 1;
        }
    }
    let noisy = zeroed as f64 / psi.len() as f64;
    if noisy > 0.5 {
        return Err(Error::McNoiseTooLarge { noisy_fraction: noisy });
    }
    let n = psi.len();
    let width = params.x_max - params.x_min;
    let fk = build_grid_df(&law.fkappa, -width, width, params.h)?;
    let start = psi.start();
    let end = start + n as i64 - 1;

    let (f_iter, iterations, compare_direct, compare_iter) = if theta < 1.0 {
        let mut f = psi.clone();
        let mut it = 0;
        loop {
            let (conv, _) = convolve_window(&fk, &f, start, end);
            let mut change: f64 = 0.0;
            let mut scale: f64 = 0.0;
            for i in 0..n {
                let next = psi.values[i] + theta * conv[i];
                change = change.max((next - f.values[i]).abs());
                scale = scale.max(next.abs());
                f.values[i] = next;
            }
            it += 1;
            if change <= 1e-12 * scale.max(1e-300) {
                break;
            }
            if it >= 10_000 || !change.is_finite() {
                return Err(Error::FixedPointDiverged { iterations: it });
            }
        }
        (f.values.clone(), it, pg.f_direct.values.clone(), f.values)
    } else {
        // theta = 1: f = U * psi, compared after smoothing both sides
        let table = renewal_increments(&fk, 1.0, params.h, 1 << 24, 1e-10)
            .map_err(|_| Error::FixedPointDiverged { iterations: 24 })?;
        let (f, _) = convolve_window(&table.grid, &psi, start, end);
        let psi_hat = smooth_transform(&psi)?;
        let (f_hat, _) = convolve_window(&table.grid, &psi_hat, start, end);
        let direct_hat = smooth_transform(&pg.f_direct)?;
        (f, table.terms, direct_hat.values, f_hat)
    };

    // compare on reliable cells, leaving out the top fifth of the grid
    let cut = params.x_max - 0.2 * width;
    let mut max_gap: f64 = 0.0;
    let mut reliable = 0usize;
    let mut top = None;
    for i in 0..n {
        let x = psi.node(i);
        let d = pg.f_direct.values[i];
        if d > 0.0 && pg.f_ci[i] <= params.reliable_rel_ci * d {
            top = Some(i);
            if x <= cut && compare_direct[i] > 0.0 {
                reliable += 1;
                max_gap = max_gap.max((compare_iter[i] - compare_direct[i]).abs() / compare_direct[i]);
            }
        }
    }
    let psi_integral = psi.integral();
    let psi_hat = smooth_transform(&psi)?;
    let psi_hat_integral = smooth_integral(&psi, &psi_hat);
    let (normalized_top, normalized_top_x) = match top {
        Some(i) => {
            let x = psi.node(i);
            let d = pg.f_direct.values[i];
            let v = if theta == 1.0 {
                law.fkappa.truncated_mean(x) * d
            } else {
                d / law.fkappa.window(x, 1.0)
            };
            (v, x)
        }
        None => (f64::NAN, f64::NAN),
    };
    let predicted_limit = if theta == 1.0 {
        srt_constant(srt_index(&law.fkappa)) * psi_integral
    } else {
        key_renewal_limit(psi_integral, theta, &law.fkappa)
    };
    Ok(ImplicitReport {
        nodes: psi.nodes(),
        psi: psi.values,
        psi_ci: pg.ci,
        f_direct: pg.f_direct.values,
        f_iterated: f_iter,
        zeroed_cells: zeroed,
        bias_bound: bias,
        psi_integral,
        psi_hat_integral,
        max_rel_gap: max_gap,
        reliable_cells: reliable,
        normalized_top,
        normalized_top_x,
        predicted_limit,
        iterations,
    })
}
