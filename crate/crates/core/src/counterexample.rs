//! A directly Riemann integrable function for which the key renewal limit
//! fails without the growth condition `z(x) = O(1/x)`.
//!
//! `z` is a train of triangular spikes of half-width 1/2 centred at
//! `d_n = n^2` with heights `a_n = n^{-beta}`. For a renewal measure with
//! `m(x)` regularly varying of index `1 - alpha`, the normalized convolution
//! at the spike centres is bounded below by
//! `m(a + d_n) (a_n / 2) [U(a + 1/4) - U(a - 1/4)]`, which grows like
//! `n^{2(1 - alpha) - beta}` when `2 alpha + beta < 2`.

use alloc::vec::Vec;
use libm::{log, pow, round};

use crate::diagnostics::{doney_sweep, Verdict, DONEY_DELTAS, X_LADDER};
use crate::error::{Error, Result};
use crate::model::catalog::pure_pareto;
use crate::renewal::{build_grid_df, convolve_window, renewal_increments, GridFn, GridKind, RenewalTable};
use crate::special::srt_constant;
use crate::stats::slope;

/// Spike train parameters; `d_n = n^2`, half-width 1/2, `a_n = n^{-beta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SpikeSpec {
    pub beta: f64,
    pub n_max: usize,
}

impl SpikeSpec {
    pub fn location(n: usize) -> f64 {
        (n * n) as f64
    }

    pub fn amplitude(&self, n: usize) -> f64 {
        pow(n as f64, -self.beta)
    }

    /// `int z = (1/2) sum_{n <= n_max} a_n`.
    pub fn integral(&self) -> f64 {
        0.5 * (1..=self.n_max).map(|n| self.amplitude(n)).sum::<f64>()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 1.0 && self.beta.is_finite()) {
            return Err(Error::ParamViolation("beta must exceed 1"));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be positive"));
        }
        Ok(())
    }
}

/// Number of grid steps in a quarter, if `h` divides 1/4.
fn quarter_steps(h: f64) -> Result<i64> {
    let q = round(0.25 / h);
    if !(h > 0.0) || q < 1.0 || (q * h - 0.25).abs() > 1e-12 {
        return Err(Error::GridTooCoarse { cell_mass: h });
    }
    Ok(q as i64)
}

/// The spike train on the nodes of `[x_min, x_max]`. Node values are set
/// from integer offsets, so peaks, feet and quarter points are exact.
pub fn build_spiky_z(spec: &SpikeSpec, x_min: f64, x_max: f64, h: f64) -> Result<GridFn> {
    spec.validate()?;
    let q = quarter_steps(h)?;
    let mut z = GridFn::zeros(x_min, x_max, h, GridKind::Pointwise)?;
    let s = z.start();
    let len = z.len() as i64;
    for n in 1..=spec.n_max {
        let a = spec.amplitude(n);
        let centre = (n * n) as i64 * 4 * q;
        for j in -2 * q..=2 * q {
            let k = centre + j - s;
            if (0..len).contains(&k) {
                z.values[k as usize] = a * (1.0 - j.abs() as f64 / (2 * q) as f64);
            }
        }
    }
    Ok(z)
}

/// Sum over unit cells `[j, j + 1)` of the largest node value, the upper
/// Riemann sum that certifies direct Riemann integrability.
pub fn dri_upper_sum(z: &GridFn) -> f64 {
    let mut total = 0.0;
    let mut cell = i64::MIN;
    let mut best: f64 = 0.0;
    for i in 0..z.len() {
        let c = libm::floor(z.node(i) + 1e-9) as i64;
        if c != cell {
            total += best;
            best = 0.0;
            cell = c;
        }
        best = best.max(z.values[i]);
    }
    total + best
}

/// Settings of a counterexample run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CounterexampleParams {
    pub alpha: f64,
    pub beta: f64,
    pub n_max: usize,
    pub h: f64,
    /// Constant of the clipped control `min(z(x), K / x)`.
    pub clip: f64,
    /// Smallest `U(a + 1/4) - U(a - 1/4)` accepted when choosing `a`.
    pub min_window: f64,
    pub renewal_tol: f64,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        CounterexampleParams {
            alpha: 0.4,
            beta: 1.1,
            n_max: 30,
            h: 0.05,
            clip: 1.0,
            min_window: 1e-3,
            renewal_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CounterexampleRow {
    pub n: usize,
    pub d_n: f64,
    /// `m(a + d_n)` times the convolution restricted to `y` in `(a - 1/2, a + 1/2]`.
    pub v_n: f64,
    pub lower_bound: f64,
    /// `m(x) (U * z)(x)` at the midpoint between spikes `n` and `n + 1`
    /// (NaN for the last spike).
    pub off_spike_value: f64,
    /// `v_n` computed for the clipped function.
    pub clipped_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CounterexampleReport {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    /// `U(a + 1/4) - U(a - 1/4)`.
    pub u_window: f64,
    pub rows: Vec<CounterexampleRow>,
    /// Fitted log-log slope of the lower bound over `n` in `[n_max/3, n_max]`.
    pub slope: f64,
    /// `2(1 - alpha) - beta`.
    pub predicted_slope: f64,
    pub strictly_increasing: bool,
    pub bound_holds: bool,
    pub clipped_slope: f64,
    pub z_integral: f64,
    pub dri_upper_sum: f64,
    pub c_alpha: f64,
    /// `C_alpha int z`, the limit the off-spike values are compared with.
    pub off_spike_reference: f64,
    pub doney_exponent: f64,
    pub doney_verdict: Verdict,
    /// The Pareto renewal law is taken to satisfy the integral condition on
    /// diagnostic evidence only; this flag stays false.
    pub condition_proven: bool,
}

/// Build the renewal measure of a pure Pareto(`alpha`) law and evaluate the
/// spike train against it.
pub fn counterexample_run(p: &CounterexampleParams) -> Result<CounterexampleReport> {
    if !(p.alpha > 0.0 && p.alpha < 0.5) {
        return Err(Error::ParamViolation("alpha must lie in (0, 1/2)"));
    }
    if 2.0 * p.alpha + p.beta >= 2.0 {
        return Err(Error::ParamViolation("need 2 alpha + beta < 2"));
    }
    if p.n_max < 3 {
        return Err(Error::InvalidParameter("n_max must be at least 3"));
    }
    let spikes = SpikeSpec {
        beta: p.beta,
        n_max: p.n_max,
    };
    let law = pure_pareto(p.alpha);
    let doney = doney_sweep(&law, &X_LADDER, &DONEY_DELTAS)?;
    let x_top = SpikeSpec::location(p.n_max) + 2.0;
    let fk = build_grid_df(&law, 0.0, x_top, p.h)?;
    let table = renewal_increments(&fk, 1.0, p.h, 1 << 24, p.renewal_tol)?;
    let a = choose_a(&table, p.min_window)?;
    let u_window = table.grid.window_sum(a - 0.25, a + 0.25);

    let z = build_spiky_z(&spikes, 0.0, x_top, p.h)?;
    let mut clipped = z.clone();
    for (i, v) in clipped.values.iter_mut().enumerate() {
        let x = z.node(i);
        if x > 0.0 {
            *v = v.min(p.clip / x);
        }
    }
    let (full, _) = convolve_window(&table.grid, &z, z.start(), z.start() + z.len() as i64 - 1);
    let c_alpha = srt_constant(p.alpha);
    let z_integral = spikes.integral();

    let mut rows = Vec::with_capacity(p.n_max);
    for n in 1..=p.n_max {
        let d = SpikeSpec::location(n);
        let x = a + d;
        let m = law.truncated_mean(x);
        let v_n = m * near_convolution(&table, &z, x, a);
        let clipped_value = m * near_convolution(&table, &clipped, x, a);
        let lower_bound = m * 0.5 * spikes.amplitude(n) * u_window;
        let off_spike_value = if n < p.n_max {
            let mid = a + 0.5 * (d + SpikeSpec::location(n + 1));
            z.index_of(mid)
                .map_or(f64::NAN, |i| law.truncated_mean(mid) * full[i])
        } else {
            f64::NAN
        };
        rows.push(CounterexampleRow {
            n,
            d_n: d,
            v_n,
            lower_bound,
            off_spike_value,
            clipped_value,
        });
    }
    let fit: Vec<&CounterexampleRow> = rows.iter().filter(|r| 3 * r.n >= p.n_max).collect();
    let ln: Vec<f64> = fit.iter().map(|r| log(r.n as f64)).collect();
    let lb: Vec<f64> = fit.iter().map(|r| log(r.lower_bound)).collect();
    let lc: Vec<f64> = fit.iter().map(|r| log(r.clipped_value)).collect();
    let strictly_increasing = fit.windows(2).all(|w| w[1].lower_bound > w[0].lower_bound);
    let bound_holds = rows.iter().all(|r| r.v_n >= r.lower_bound * (1.0 - 1e-12));
    Ok(CounterexampleReport {
        alpha: p.alpha,
        beta: p.beta,
        a,
        u_window,
        slope: slope(&ln, &lb),
        predicted_slope: 2.0 * (1.0 - p.alpha) - p.beta,
        strictly_increasing,
        bound_holds,
        clipped_slope: slope(&ln, &lc),
        z_integral,
        dri_upper_sum: dri_upper_sum(&z),
        c_alpha,
        off_spike_reference: c_alpha * z_integral,
        doney_exponent: doney.slope,
        doney_verdict: doney.verdict,
        condition_proven: false,
        rows,
    })
}

/// First node `a >= 0` with `U(a + 1/4) - U(a - 1/4)` above `min_window`.
fn choose_a(table: &RenewalTable, min_window: f64) -> Result<f64> {
    let g = &table.grid;
    (0..g.len())
        .map(|i| g.node(i))
        .filter(|&x| x >= 0.0)
        .find(|&x| g.window_sum(x - 0.25, x + 0.25) > min_window)
        .ok_or(Error::InvalidParameter("no point with a visible renewal window"))
}

/// `sum_{y in (a - 1/2, a + 1/2]} z(x - y) U{y}`.
fn near_convolution(table: &RenewalTable, z: &GridFn, x: f64, a: f64) -> f64 {
    let g = &table.grid;
    let mut total = 0.0;
    for i in 0..g.len() {
        let y = g.node(i);
        if y > a - 0.5 + 1e-9 && y <= a + 0.5 + 1e-9 {
            total += z.at(x - y) * g.values[i];
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_spike_shape() {
        let s = SpikeSpec { beta: 1.1, n_max: 3 };
        let z = build_spiky_z(&s, 0.0, 12.0, 0.05).unwrap();
        assert_eq!(z.at(1.0), 1.0);
        assert_eq!(z.at(0.5), 0.0);
        assert_eq!(z.at(1.5), 0.0);
        assert_eq!(z.at(1.25), 0.5);
        assert!(z.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn step_must_divide_quarter() {
        let s = SpikeSpec { beta: 1.1, n_max: 3 };
        assert!(matches!(build_spiky_z(&s, 0.0, 12.0, 0.3), Err(Error::GridTooCoarse { .. })));
        assert!(matches!(build_spiky_z(&s, 0.0, 12.0, 0.04), Err(Error::GridTooCoarse { .. })));
    }
}
