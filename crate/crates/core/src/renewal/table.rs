//! Renewal measures `U = sum_n (theta F)^{*n}` on a grid window.

use alloc::vec::Vec;

use super::grid::{convolve_window, GridFn, GridKind};
use crate::error::{Error, Result};
use crate::model::{Df, RightKind, TailSpec};
use crate::quad::{integrate, QuadOptions};
use crate::special::srt_constant;

/// Cell masses of a renewal measure on a fixed window.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalTable {
    /// `U` restricted to the window of the input grid (measure kind).
    pub grid: GridFn,
    pub theta: f64,
    /// Number of convolution powers summed (`n < terms`).
    pub terms: usize,
    /// For `theta < 1`: `1/(1 - theta)` minus the accounted total mass.
    /// For `theta = 1`: in-window mass of the last summed block.
    pub mass_deficit: f64,
    /// Mass of the summed series that left the window.
    pub outside_mass: f64,
    /// Step at which increments are reported.
    pub report_step: f64,
    /// Truncated mean at the nonnegative grid nodes (empty until attached).
    pub m_values: Vec<f64>,
    pub c_alpha: Option<f64>,
}

impl RenewalTable {
    /// `U(x, x + w]`.
    pub fn increment(&self, x: f64, w: f64) -> f64 {
        self.grid.window_sum(x, x + w)
    }

    /// `U(x, x + report_step]` for `x` on the report ladder across the window.
    pub fn increments(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut x = self.grid.x0;
        let end = self.grid.x_max() - self.report_step;
        while x <= end + 1e-9 {
            out.push((x, self.increment(x, self.report_step)));
            x += self.report_step;
        }
        out
    }

    /// Mass inside the window plus the mass that left it.
    pub fn total_mass(&self) -> f64 {
        self.grid.mass() + self.outside_mass
    }

    /// Attach the truncated mean of `spec` and the constant `C_alpha`.
    pub fn attach_truncated_mean(&mut self, spec: &TailSpec) {
        let opts = QuadOptions::default().with_abs_tol(1e-14);
        let f = |u: f64| spec.cdf(-u) + spec.sf(u);
        let mut m = 0.0;
        let mut prev = 0.0;
        self.m_values = self
            .grid
            .nodes()
            .into_iter()
            .filter(|&x| x >= -1e-9)
            .map(|x| {
                let x = x.max(0.0);
                m += integrate(f, prev, x, opts).value;
                prev = x;
                m
            })
            .collect();
        self.c_alpha = Some(srt_constant(srt_index(spec)));
    }
}

/// Index `alpha` governing the local renewal limit: the Pareto index when it
/// is at most one, otherwise one (finite mean).
pub fn srt_index(spec: &TailSpec) -> f64 {
    match spec.right {
        RightKind::Pareto { alpha, .. } if alpha <= 1.0 => alpha,
        _ => 1.0,
    }
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

/// Sum the renewal series of `theta F` on the window of `fk` by doubling:
/// with `P_k = (theta F)^{*2^k}` and `A_k = sum_{n < 2^k}`, `A_{k+1} = A_k + A_k * P_k`.
///
/// Stops once the block `A_k * P_k` contributes less than `tol`: in total
/// mass when `theta < 1`, inside the window when `theta = 1` (where the
/// series has infinite mass).
pub fn renewal_increments(
    fk: &GridFn,
    theta: f64,
    report_step: f64,
    n_max: usize,
    tol: f64,
) -> Result<RenewalTable> {
    if fk.kind != GridKind::Measure {
        return Err(Error::InvalidParameter("renewal needs a measure grid"));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter("theta must lie in (0, 1]"));
    }
    let start = fk.start();
    let end = start + fk.len() as i64 - 1;
    if start > 0 || end < 0 {
        return Err(Error::InvalidParameter("grid window must contain the origin"));
    }
    let h = fk.h;
    let mut a = GridFn::new(start, h, alloc::vec![0.0; fk.len()], GridKind::Measure);
    a.values[(-start) as usize] = 1.0;
    let mut a_out = 0.0;
    let mut p = fk.scaled(theta);
    let mut p_out = p.deficit;
    let mut terms = 1usize;
    loop {
        let (c, clip) = convolve_window(&a, &p, start, end);
        let c_in: f64 = c.iter().sum();
        let (ma, mp) = (a.mass(), p.mass());
        let c_out = a_out * (mp + p_out) + ma * p_out + clip;
        add_into(&mut a.values, &c);
        a_out += c_out;
        terms *= 2;
        let residual = if theta < 1.0 { c_in + c_out } else { c_in };
        if residual < tol {
            let mass_deficit = if theta < 1.0 {
                1.0 / (1.0 - theta) - (a.mass() + a_out)
            } else {
                c_in
            };
            return Ok(RenewalTable {
                grid: a,
                theta,
                terms,
                mass_deficit,
                outside_mass: a_out,
                report_step,
                m_values: Vec::new(),
                c_alpha: None,
            });
        }
        if terms >= n_max {
            return Err(Error::RenewalNotConverged { terms, residual });
        }
        let (pp, pclip) = convolve_window(&p, &p, start, end);
        p_out = 2.0 * mp * p_out + p_out * p_out + pclip;
        p.values = pp;
    }
}

/// `m(x) = int_0^x [F(-u) + (1 - F(u))] du`.
pub fn truncated_mean(spec: &TailSpec, x: f64) -> f64 {
    spec.truncated_mean(x)
}

/// `g(x) = F(x + 1) - F(x)`.
pub fn local_window_g(spec: &TailSpec, x: f64) -> f64 {
    spec.window(x, 1.0)
}

/// One rung of a local renewal ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrtRow {
    pub x: f64,
    pub m: f64,
    pub increment: f64,
    /// `m(x) U(x, x + h]`.
    pub value: f64,
    /// `h C_alpha`.
    pub reference: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SrtReport {
    pub alpha: f64,
    pub c_alpha: f64,
    pub rows: Vec<SrtRow>,
    pub last_ratio: f64,
    /// `|ratio - 1|` is nonincreasing over the ladder points in the last decade.
    pub monotone_last_decade: bool,
}

/// Compare `m(x) [U(x + h) - U(x)]` with `h C_alpha` along a ladder of `x`.
pub fn srt_check(table: &RenewalTable, spec: &TailSpec, h: f64, ladder: &[f64]) -> Result<SrtReport> {
    if table.theta != 1.0 {
        return Err(Error::CaseMismatch("the local renewal limit needs theta = 1"));
    }
    if ladder.is_empty() {
        return Err(Error::InvalidParameter("empty ladder"));
    }
    let alpha = srt_index(spec);
    let c_alpha = srt_constant(alpha);
    let rows: Vec<SrtRow> = ladder
        .iter()
        .map(|&x| {
            let m = spec.truncated_mean(x);
            let increment = table.increment(x, h);
            let value = m * increment;
            let reference = h * c_alpha;
            SrtRow {
                x,
                m,
                increment,
                value,
                reference,
                ratio: value / reference,
            }
        })
        .collect();
    let top = ladder[ladder.len() - 1];
    let last: Vec<f64> = rows
        .iter()
        .filter(|r| r.x >= top / 10.0)
        .map(|r| (r.ratio - 1.0).abs())
        .collect();
    let monotone_last_decade = last.windows(2).all(|w| w[1] <= w[0]);
    Ok(SrtReport {
        alpha,
        c_alpha,
        last_ratio: rows[rows.len() - 1].ratio,
        rows,
        monotone_last_decade,
    })
}
