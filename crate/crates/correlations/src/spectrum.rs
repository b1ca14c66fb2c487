//! Frequency-resolved output correlations from the transfer matrix.

use pcopo_model::{transfer_matrix_via, ClosedFormInverse, ComplexMatrix, InversePath, ModelParams, C64};

use crate::error::Result;
use crate::threshold::check_below_threshold;

/// Operator pairs `(i, l)` of `<o_i o_l>` with `o = (a(kc), a(-kc), a†(-kc), a†(kc))`,
/// in the field order of [`crate::MomentSet`].
pub const MOMENT_INDICES: [(usize, usize); 6] = [(3, 0), (2, 1), (0, 1), (0, 0), (1, 1), (2, 0)];

/// `<o_i(omega) o_l(-omega)>` density for vacuum input.
pub fn pair_density(t_w: &ComplexMatrix, t_mw: &ComplexMatrix, (i, l): (usize, usize)) -> C64 {
    t_w[(i, 0)] * t_mw[(l, 3)] + t_w[(i, 1)] * t_mw[(l, 2)]
}

/// Densities of the six stationary moments at `omega`; integrating over
/// `omega / (2 pi)` gives the equal-time output moments.
pub fn moment_densities(params: &ModelParams, omega: f64, path: InversePath) -> Result<[C64; 6]> {
    let t_w = transfer_matrix_via(params, omega, path)?;
    let t_mw = transfer_matrix_via(params, -omega, path)?;
    Ok(MOMENT_INDICES.map(|ix| pair_density(&t_w, &t_mw, ix)))
}

/// Output photon-number spectrum of mode `kc`.
pub fn spectral_intensity(params: &ModelParams, omega: f64) -> Result<f64> {
    check_below_threshold(params)?;
    Ok(moment_densities(params, omega, InversePath::Numeric)?[0].re)
}

/// Same spectrum from the adjugate entries,
/// `4 (w'(omega) w(-omega) - z'(omega) z(-omega)) / |D(omega)|^2`.
pub fn spectral_intensity_closed(params: &ModelParams, omega: f64) -> Result<f64> {
    check_below_threshold(params)?;
    let a = ClosedFormInverse::new(params, omega)?;
    let b = ClosedFormInverse::new(params, -omega)?;
    let num = 4.0 * (a.wp * b.w - a.zp * b.z);
    Ok(num.re / a.d.norm_sqr())
}
