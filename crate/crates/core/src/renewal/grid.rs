//! Functions and measures on uniform grids.

use alloc::vec::Vec;
use libm::{floor, round};

use crate::error::{Error, Result};
use crate::model::{Df, TailSpec};

/// Largest admissible mass of the continuous part in a single cell.
pub const MAX_CELL_MASS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// `values[i]` is the mass of the cell `(x_i - h/2, x_i + h/2]`.
    Measure,
    /// `values[i]` is the value at the node `x_i`.
    Pointwise,
}

/// Values on the nodes `x_i = x0 + i h`. Node positions are integer multiples
/// of `h` so that grids with the same step align exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    pub x0: f64,
    pub h: f64,
    pub values: Vec<f64>,
    pub kind: GridKind,
    /// Mass that lies outside the represented window (measures only).
    pub deficit: f64,
}

impl GridFn {
    /// Grid starting at node `start * h`.
    pub fn new(start: i64, h: f64, values: Vec<f64>, kind: GridKind) -> Self {
        GridFn {
            x0: start as f64 * h,
            h,
            values,
            kind,
            deficit: 0.0,
        }
    }

    /// Pointwise samples of `f` at the nodes in `[x_min, x_max]`.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, x_min: f64, x_max: f64, h: f64) -> Result<Self> {
        let (s, e) = node_range(x_min, x_max, h)?;
        let values = (s..=e).map(|k| f(k as f64 * h)).collect();
        Ok(GridFn::new(s, h, values, GridKind::Pointwise))
    }

    pub fn zeros(x_min: f64, x_max: f64, h: f64, kind: GridKind) -> Result<Self> {
        let (s, e) = node_range(x_min, x_max, h)?;
        Ok(GridFn::new(s, h, alloc::vec![0.0; (e - s + 1) as usize], kind))
    }

    /// Absolute index of the first node (`x0 / h`).
    pub fn start(&self) -> i64 {
        round(self.x0 / self.h) as i64
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, i: usize) -> f64 {
        (self.start() + i as i64) as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    pub fn x_max(&self) -> f64 {
        self.node(self.len().saturating_sub(1))
    }

    /// Total mass inside the window (compensated summation).
    pub fn mass(&self) -> f64 {
        neumaier_sum(&self.values)
    }

    /// Mass inside the window plus the recorded deficit.
    pub fn total_mass(&self) -> f64 {
        self.mass() + self.deficit
    }

    /// Local index of the node nearest to `x`, if inside the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let k = round(x / self.h) as i64 - self.start();
        if k >= 0 && (k as usize) < self.len() {
            Some(k as usize)
        } else {
            None
        }
    }

    /// Value at the node nearest to `x`; zero outside the grid.
    pub fn at(&self, x: f64) -> f64 {
        self.index_of(x).map_or(0.0, |i| self.values[i])
    }

    /// Sum of values at nodes in `(lo, hi]`.
    pub fn window_sum(&self, lo: f64, hi: f64) -> f64 {
        let first = floor(lo / self.h + 1e-9) as i64 + 1 - self.start();
        let last = floor(hi / self.h + 1e-9) as i64 - self.start();
        let first = first.max(0);
        let last = last.min(self.len() as i64 - 1);
        if first > last {
            return 0.0;
        }
        self.values[first as usize..=last as usize].iter().sum()
    }

    /// Trapezoid integral of the piecewise-linear interpolant (pointwise kind).
    pub fn integral(&self) -> f64 {
        match self.kind {
            GridKind::Measure => self.mass(),
            GridKind::Pointwise => {
                let n = self.len();
                if n < 2 {
                    return 0.0;
                }
                let inner: f64 = self.values[1..n - 1].iter().sum();
                self.h * (inner + 0.5 * (self.values[0] + self.values[n - 1]))
            }
        }
    }

    /// Same grid with values scaled by `c`.
    pub fn scaled(&self, c: f64) -> GridFn {
        GridFn {
            values: self.values.iter().map(|v| v * c).collect(),
            deficit: self.deficit * c,
            ..self.clone()
        }
    }
}

/// Neumaier's compensated sum.
pub fn neumaier_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Absolute node indices spanning `[x_min, x_max]`.
pub fn node_range(x_min: f64, x_max: f64, h: f64) -> Result<(i64, i64)> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter("grid step must be positive"));
    }
    if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
        return Err(Error::InvalidParameter("grid window must satisfy x_min < x_max"));
    }
    let s = round(x_min / h) as i64;
    let e = round(x_max / h) as i64;
    if e - s > 50_000_000 {
        return Err(Error::InvalidParameter("grid too large"));
    }
    Ok((s, e))
}

/// Cell masses of `spec` on the nodes in `[x_min, x_max]`; mass outside the
/// outermost cells is recorded as the deficit.
pub fn build_grid_df(spec: &TailSpec, x_min: f64, x_max: f64, h: f64) -> Result<GridFn> {
    let (s, e) = node_range(x_min, x_max, h)?;
    let mut values = Vec::with_capacity((e - s + 1) as usize);
    for k in s..=e {
        let x = k as f64 * h;
        let lo = x - 0.5 * h;
        let m = spec.window(lo, h);
        let atoms = spec.atom_mass_in(lo, lo + h);
        if m - atoms > MAX_CELL_MASS {
            return Err(Error::GridTooCoarse { cell_mass: m - atoms });
        }
        values.push(m);
    }
    let lo = s as f64 * h - 0.5 * h;
    let hi = e as f64 * h + 0.5 * h;
    let mut g = GridFn::new(s, h, values, GridKind::Measure);
    g.deficit = spec.cdf(lo) + spec.sf(hi);
    Ok(g)
}

fn check_steps(a: &GridFn, b: &GridFn) -> Result<()> {
    if (a.h - b.h).abs() > 1e-12 * a.h {
        return Err(Error::StepMismatch { left: a.h, right: b.h });
    }
    Ok(())
}

/// Result kind of combining two grids.
fn product_kind(a: &GridFn, b: &GridFn) -> Result<GridKind> {
    match (a.kind, b.kind) {
        (GridKind::Measure, GridKind::Measure) => Ok(GridKind::Measure),
        (GridKind::Pointwise, GridKind::Pointwise) => {
            Err(Error::InvalidParameter("cannot convolve two pointwise grids"))
        }
        _ => Ok(GridKind::Pointwise),
    }
}

/// Canonical operand order, so that `convolve(a, b)` and `convolve(b, a)`
/// perform identical floating-point operations.
fn ordered<'a>(a: &'a GridFn, b: &'a GridFn) -> (&'a GridFn, &'a GridFn) {
    let key = |g: &GridFn| (g.start(), g.len());
    match key(a).cmp(&key(b)) {
        core::cmp::Ordering::Less => (a, b),
        core::cmp::Ordering::Greater => (b, a),
        core::cmp::Ordering::Equal => {
            for (x, y) in a.values.iter().zip(&b.values) {
                match x.total_cmp(y) {
                    core::cmp::Ordering::Less => return (a, b),
                    core::cmp::Ordering::Greater => return (b, a),
                    _ => {}
                }
            }
            (a, b)
        }
    }
}

/// Full discrete convolution. For measures the deficit of the result is
/// `m_a d_b + d_a m_b + d_a d_b`, so total mass is conserved.
pub fn convolve(a: &GridFn, b: &GridFn) -> Result<GridFn> {
    check_steps(a, b)?;
    let kind = product_kind(a, b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("empty grid"));
    }
    let (p, q) = ordered(a, b);
    let start = p.start() + q.start();
    let end = start + (p.len() + q.len() - 2) as i64;
    let (values, _) = convolve_window(p, q, start, end);
    let mut out = GridFn::new(start, a.h, values, kind);
    if kind == GridKind::Measure {
        out.deficit = p.mass() * q.deficit + p.deficit * q.mass() + p.deficit * q.deficit;
    }
    Ok(out)
}

/// Convolution evaluated on the absolute node range `[k0, k1]`.
///
/// Returns the values and the mass of `a * b` falling outside the range
/// (counted as `sum_i a_i * (b mass outside)`; meaningful for measures).
pub fn convolve_window(a: &GridFn, b: &GridFn, k0: i64, k1: i64) -> (Vec<f64>, f64) {
    let n_out = (k1 - k0 + 1).max(0) as usize;
    let mut out = alloc::vec![0.0; n_out];
    let nb = b.len() as i64;
    // prefix sums of b for the clipped-mass bookkeeping
    let mut prefix = Vec::with_capacity(b.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in &b.values {
        acc += v;
        prefix.push(acc);
    }
    let b_total = acc;
    let (sa, sb) = (a.start(), b.start());
    let mut clipped = 0.0;
    for (i, &ai) in a.values.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        // output index o = sa + i + sb + l - k0, for l in [0, nb)
        let base = sa + i as i64 + sb - k0;
        let l0 = (-base).max(0);
        let l1 = (n_out as i64 - 1 - base).min(nb - 1);
        if l0 > l1 {
            clipped += ai * b_total;
            continue;
        }
        let inside = prefix[(l1 + 1) as usize] - prefix[l0 as usize];
        clipped += ai * (b_total - inside);
        let o0 = (base + l0) as usize;
        let len = (l1 - l0 + 1) as usize;
        let dst = &mut out[o0..o0 + len];
        let src = &b.values[l0 as usize..l0 as usize + len];
        for (d, s) in dst.iter_mut().zip(src) {
            *d += ai * s;
        }
    }
    (out, clipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LeftKind, RightKind};
    use libm::exp;

    #[test]
    fn point_mass_on_one_cell() {
        let g = build_grid_df(&TailSpec::point_mass(-1.0), -3.0, 3.0, 0.01).unwrap();
        let i = g.index_of(-1.0).unwrap();
        assert_eq!(g.values[i], 1.0);
        assert_eq!(g.mass(), 1.0);
    }

    #[test]
    fn exponential_grid_mass() {
        let spec = TailSpec::pure(RightKind::Exponential { rate: 1.0 }).unwrap();
        let g = build_grid_df(&spec, 0.0, 40.0, 0.01).unwrap();
        // e^{-40} sits below the rounding of a 4000-term sum
        assert!(g.mass() >= 1.0 - exp(-40.0) - 1e-13);
        assert!((g.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_rejected() {
        let spec = TailSpec::pure(RightKind::Exponential { rate: 1.0 }).unwrap();
        assert!(matches!(build_grid_df(&spec, 0.0, 40.0, 0.5), Err(Error::GridTooCoarse { .. })));
        // atoms are fine
        let two = TailSpec::new(
            LeftKind::PointMass {
                location: -1.0,
                weight: 0.5,
            },
            RightKind::PointMass { location: 1.0 },
        )
        .unwrap();
        assert!(build_grid_df(&two, -2.0, 2.0, 0.5).is_ok());
    }

    #[test]
    fn delta_convolution() {
        let a = GridFn::new(10, 0.1, alloc::vec![1.0], GridKind::Measure);
        let b = GridFn::new(-3, 0.1, alloc::vec![1.0], GridKind::Measure);
        let c = convolve(&a, &b).unwrap();
        assert_eq!(c.start(), 7);
        assert_eq!(c.values, alloc::vec![1.0]);
        let d = GridFn::new(0, 0.2, alloc::vec![1.0], GridKind::Measure);
        assert!(matches!(convolve(&a, &d), Err(Error::StepMismatch { .. })));
    }

    #[test]
    fn window_clipping_accounts_mass() {
        let a = GridFn::new(0, 1.0, alloc::vec![0.25, 0.5, 0.25], GridKind::Measure);
        let (v, clipped) = convolve_window(&a, &a, 0, 2);
        let inside: f64 = v.iter().sum();
        assert!((inside + clipped - 1.0).abs() < 1e-15);
        assert_eq!(v, alloc::vec![0.0625, 0.25, 0.375]);
    }
}
