//! Key renewal convolutions `x -> int z(x - y) U(dy)`.

use alloc::vec::Vec;

use super::grid::{convolve_window, GridFn, GridKind};
use super::table::{srt_index, RenewalTable};
use crate::error::{Error, Result};
use crate::model::{Df, TailSpec};
use crate::special::srt_constant;

/// Scaling applied to the convolution before comparing with its limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalizer {
    /// Multiply by `m(x)`; needs `theta = 1`.
    TruncatedMean(TailSpec),
    /// Divide by `g(x) = F(x, x + 1]`; needs `theta < 1`.
    Window(TailSpec),
    None,
}

/// `normalizer(x) * int z(x - y) U(dy)` on the nodes of the table window.
pub fn key_renewal_convolve(z: &GridFn, table: &RenewalTable, normalizer: &Normalizer) -> Result<GridFn> {
    if z.kind != GridKind::Pointwise {
        return Err(Error::InvalidParameter("z must be a pointwise grid"));
    }
    if (z.h - table.grid.h).abs() > 1e-12 * z.h {
        return Err(Error::StepMismatch {
            left: z.h,
            right: table.grid.h,
        });
    }
    match normalizer {
        Normalizer::TruncatedMean(_) if table.theta != 1.0 => {
            return Err(Error::NormalizerMismatch("truncated-mean scaling needs theta = 1"))
        }
        Normalizer::Window(_) if table.theta >= 1.0 => {
            return Err(Error::NormalizerMismatch("window scaling needs theta < 1"))
        }
        _ => {}
    }
    let start = table.grid.start();
    let end = start + table.grid.len() as i64 - 1;
    let (mut values, _) = convolve_window(&table.grid, z, start, end);
    let h = z.h;
    for (i, v) in values.iter_mut().enumerate() {
        let x = (start + i as i64) as f64 * h;
        *v *= match normalizer {
            Normalizer::TruncatedMean(spec) => spec.truncated_mean(x),
            Normalizer::Window(spec) => {
                let g = spec.window(x, 1.0);
                if g > 0.0 {
                    1.0 / g
                } else {
                    f64::NAN
                }
            }
            Normalizer::None => 1.0,
        };
    }
    Ok(GridFn::new(start, h, values, GridKind::Pointwise))
}

/// Limit of the normalized convolution: `C_alpha int z` for `theta = 1`
/// (with truncated-mean scaling), `theta int z / (1 - theta)^2` for `theta < 1`
/// (with window scaling).
pub fn key_renewal_limit(z_integral: f64, theta: f64, spec: &TailSpec) -> f64 {
    if theta == 1.0 {
        srt_constant(srt_index(spec)) * z_integral
    } else {
        theta * z_integral / ((1.0 - theta) * (1.0 - theta))
    }
}

/// Values of a pointwise grid at the given abscissae (nearest node).
pub fn sample_at(g: &GridFn, xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| g.at(x)).collect()
}
