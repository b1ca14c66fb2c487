use pcopo_model::{coupling_constants, ModelParams, C64};

use crate::error::{CorrelationError, Result};

/// Denominator of the stationary moments,
/// `16|S|^4 |1+k^2|^2 - 8|S|^2 (1+|k|^2) c5 + c5^2` with `c5 = 4 + M1^2`.
pub fn sigma_den(params: &ModelParams) -> Result<f64> {
    let c = coupling_constants(params)?;
    let s2 = c.s.norm_sqr();
    let c5 = 4.0 + params.m1 * params.m1;
    let q = (C64::new(1.0, 0.0) + c.kappa * c.kappa).norm_sqr();
    Ok(16.0 * s2 * s2 * q - 8.0 * s2 * (1.0 + c.kappa.norm_sqr()) * c5 + c5 * c5)
}

/// First factor of `sigma_den = f_+ f_-`,
/// `f_± = c5 - 4|S|^2 (1 + |k|^2 ± 2|Im k|)`.
///
/// `f_+` is the one that reaches zero first as `E` grows, and it changes sign
/// at threshold even when `sigma_den` only touches zero (double root at `M0 = 0`).
pub fn threshold_factor(params: &ModelParams) -> Result<f64> {
    let c = coupling_constants(params)?;
    let c5 = 4.0 + params.m1 * params.m1;
    let k = c.kappa;
    Ok(c5 - 4.0 * c.s.norm_sqr() * (1.0 + k.norm_sqr() + 2.0 * k.im.abs()))
}

/// Relative floors used by [`check_below_threshold`].
pub const FACTOR_FLOOR: f64 = 1e-12;
pub const SIGMA_FLOOR: f64 = 1e-14;

pub fn is_below_threshold(params: &ModelParams) -> Result<bool> {
    let c5 = 4.0 + params.m1 * params.m1;
    Ok(threshold_factor(params)? > FACTOR_FLOOR * c5 && sigma_den(params)? > SIGMA_FLOOR * c5 * c5)
}

pub fn check_below_threshold(params: &ModelParams) -> Result<()> {
    if is_below_threshold(params)? {
        Ok(())
    } else {
        Err(CorrelationError::AboveThreshold {
            e: params.e,
            margin: threshold_factor(params)?,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ThresholdOptions {
    pub e_max: f64,
    pub tol: f64,
    /// Bracketing scan resolution on `[0, e_max]`.
    pub scan_points: usize,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            e_max: 4.0,
            tol: 1e-9,
            scan_points: 64,
        }
    }
}

/// Smallest pump `E > 0` at which the linearized theory diverges; the `E`
/// field of `params` is ignored.
pub fn threshold(params: &ModelParams) -> Result<f64> {
    threshold_with(params, &ThresholdOptions::default())
}

pub fn threshold_with(params: &ModelParams, opts: &ThresholdOptions) -> Result<f64> {
    let f = |e: f64| threshold_factor(&params.with_e(e));
    let mut lo = 0.0;
    let mut f_lo = f(lo)?;
    let mut hi = None;
    for i in 1..=opts.scan_points {
        let e = opts.e_max * i as f64 / opts.scan_points as f64;
        let fe = f(e)?;
        if fe <= 0.0 {
            hi = Some(e);
            break;
        }
        lo = e;
        f_lo = fe;
    }
    let mut hi = hi.ok_or(CorrelationError::NoThresholdRoot { e_max: opts.e_max })?;
    debug_assert!(f_lo > 0.0);
    while hi - lo > opts.tol {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `E = fraction * E_thr` for the given configuration.
pub fn relative_pump(params: &ModelParams, fraction: f64) -> Result<ModelParams> {
    Ok(params.with_e(fraction * threshold(params)?))
}
