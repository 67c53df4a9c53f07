//! Grid renewal numerics: convolution powers, renewal measures, the
//! truncated mean, key renewal convolutions and the smoothing transform.

mod grid;
mod implicit;
mod key;
mod smooth;
mod table;

pub use grid::{build_grid_df, convolve, convolve_window, neumaier_sum, node_range, GridFn, GridKind, MAX_CELL_MASS};
pub use implicit::{implicit_renewal_crosscheck, psi_on_grid, ImplicitParams, ImplicitReport, PsiGrid};
pub use key::{key_renewal_convolve, key_renewal_limit, sample_at, Normalizer};
pub use smooth::{smooth_integral, smooth_transform};
pub use table::{
    local_window_g, renewal_increments, srt_check, srt_index, truncated_mean, RenewalTable, SrtReport, SrtRow,
};
