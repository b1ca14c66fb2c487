//! Pump steady state, few-mode coupling constants and the linear-response
//! matrices of the below-threshold signal fluctuations.
//!
//! Fluctuations carry time dependence `exp(-i omega t)`. The 4-mode vector is
//! `(a(kc), a(-kc), a†(-kc), a†(kc))` and the 6-mode vector is
//! `(a(k), a(k+kp), a(k-kp), a†(-k), a†(-k-kp), a†(-k+kp))`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::matrix::{invert_numeric, ComplexMatrix, C64};
use crate::params::ModelParams;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Pump amplitudes on the three retained harmonics `0, +kp, -kp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSteadyState {
    pub a0_0: C64,
    pub a0_plus: C64,
    pub a0_minus: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingConstants {
    /// Effective homogeneous pump.
    pub s: C64,
    /// Ratio of the `+kp` pump harmonic to `s`.
    pub kappa: C64,
}

/// `(-M0/2) / (1 + i delta0 + i kp^2)`.
fn harmonic_ratio(params: &ModelParams, kp: f64) -> C64 {
    C64::new(-params.m0 / 2.0, 0.0) / C64::new(1.0, params.delta0 + kp * kp)
}

/// Three-mode pump steady state; harmonics beyond `|k| = kp` are dropped.
pub fn pump_steady_state(params: &ModelParams) -> Result<PumpSteadyState> {
    params.validate()?;
    let kp = params.kp()?;
    let ratio = harmonic_ratio(params, kp);
    let denom = C64::new(1.0, params.delta0) - C64::new(params.m0, 0.0) * ratio;
    let a0_0 = C64::new(params.e, 0.0) / denom;
    let a0_plus = ratio * a0_0;
    Ok(PumpSteadyState {
        a0_0,
        a0_plus,
        a0_minus: -a0_plus,
    })
}

/// Pump amplitudes `A(n kp)` for `n = -n_max ..= n_max` without truncation
/// beyond `n_max`, solved as a banded linear system.
pub fn pump_harmonics(params: &ModelParams, n_max: usize) -> Result<Vec<C64>> {
    params.validate()?;
    let kp = params.kp()?;
    let size = 2 * n_max + 1;
    let half_m0 = C64::new(params.m0 / 2.0, 0.0);
    let mut a = DMatrix::<C64>::zeros(size, size);
    let mut b = nalgebra::DVector::<C64>::zeros(size);
    for row in 0..size {
        let n = row as f64 - n_max as f64;
        let k = n * kp;
        a[(row, row)] = C64::new(1.0, params.delta0 + k * k);
        if row > 0 {
            a[(row, row - 1)] = half_m0;
        }
        if row + 1 < size {
            a[(row, row + 1)] = -half_m0;
        }
    }
    b[n_max] = C64::new(params.e, 0.0);
    let x = a.lu().solve(&b).ok_or(ModelError::Singular)?;
    Ok(x.iter().copied().collect())
}

/// `S` and `kappa` of the few-mode reduction.
pub fn coupling_constants(params: &ModelParams) -> Result<CouplingConstants> {
    params.validate_resonant()?;
    let pump = pump_steady_state(params)?;
    Ok(CouplingConstants {
        s: pump.a0_0,
        kappa: harmonic_ratio(params, params.kp()?),
    })
}

/// Few-mode response matrix `L(omega)`.
#[allow(non_snake_case)]
pub fn build_L(params: &ModelParams, omega: f64) -> Result<ComplexMatrix> {
    let CouplingConstants { s, kappa: k } = coupling_constants(params)?;
    let z = C64::new(1.0, -omega);
    let m = C64::new(params.m1 / 2.0, 0.0);
    let sc = s.conj();
    let kc = k.conj();
    Ok(ComplexMatrix::from_rows([
        [z, m, -s, -k * s],
        [-m, z, k * s, -s],
        [-sc, kc * sc, z, -m],
        [-kc * sc, -sc, m, z],
    ]))
}

/// Six-mode response matrix around wavenumber `k`, valid for any `kp`.
#[allow(non_snake_case)]
pub fn build_L6(params: &ModelParams, k: f64, omega: f64) -> Result<ComplexMatrix> {
    params.validate()?;
    let kp = params.kp()?;
    if k.abs() > kp {
        return Err(ModelError::OutsideTruncation { k, kp });
    }
    let s = pump_steady_state(params)?.a0_0;
    let kb = harmonic_ratio(params, kp);
    let sc = s.conj();
    let kbc = kb.conj();
    let m = C64::new(params.m1 / 2.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let eta = |n: f64| {
        let q = k + n * kp;
        C64::new(1.0, -omega + params.delta1 + 2.0 * q * q)
    };
    let etap = |n: f64| {
        let q = k + n * kp;
        C64::new(1.0, -omega - params.delta1 - 2.0 * q * q)
    };
    Ok(ComplexMatrix::from_rows([
        [eta(0.0), -m, m, -s, kb * s, -kb * s],
        [m, eta(1.0), zero, -kb * s, -s, zero],
        [-m, zero, eta(-1.0), kb * s, zero, -s],
        [-sc, -kbc * sc, kbc * sc, etap(0.0), m, -m],
        [kbc * sc, -sc, zero, -m, etap(1.0), zero],
        [-kbc * sc, zero, -sc, m, zero, etap(-1.0)],
    ]))
}

/// Indices of the `(a(k), a(k-kp), a†(-k), a†(-k+kp))` entries of the 6-mode
/// vector; at `k = kc`, `kp = 2 kc` they coincide with the 4-mode vector.
pub const L6_TO_L_INDICES: [usize; 4] = [0, 2, 3, 5];

/// Coefficients of the closed-form inverse of `L`.
///
/// `L^-1` has the 2x2 block layout
/// `[[u, v, w, z], [-v, u, -z, w], [w', z', u', v'], [-z', w', -v', u']] / d`
/// where the fields hold the adjugate entries. With `c1r = 2|S|^2 (1 + |kappa|^2)`:
///
/// * `d  = c1r c2 / 2 + c2^2 / 4 + |S|^4 |1 + kappa^2|^2`
/// * `u  = [-(1 - i omega)(c1r + c2) + M1 c3] / 2`
/// * `u' = [-(1 - i omega)(c1r + c2) - M1 c3] / 2`
/// * `v  = [c4 + M1 (c1r + c2) / 2] / 2`, `v' = [c4 - M1 (c1r + c2) / 2] / 2`
/// * `w  = -S (c1 + c2) / 2`, `w' = -S* (c1* + c2) / 2`
/// * `z  = -S (c1 kappa* + c2 kappa) / 2`, `z' = S* (c1* kappa + c2 kappa*) / 2`
///
/// The real `c1r` (not the complex `c1`) enters `d`, `u` and `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormInverse {
    pub d: C64,
    pub u: C64,
    pub up: C64,
    pub v: C64,
    pub vp: C64,
    pub w: C64,
    pub wp: C64,
    pub z: C64,
    pub zp: C64,
    pub c1: C64,
    pub c1r: f64,
    pub c2: C64,
    pub c3: C64,
    pub c4: C64,
}

impl ClosedFormInverse {
    pub fn new(params: &ModelParams, omega: f64) -> Result<Self> {
        let CouplingConstants { s, kappa } = coupling_constants(params)?;
        let m1 = params.m1;
        let s2 = s.norm_sqr();
        let zf = C64::new(1.0, -omega);
        let kc = kappa.conj();
        let c1 = 2.0 * s2 * (ONE + kappa * kappa);
        let c1r = 2.0 * s2 * (1.0 + kappa.norm_sqr());
        let c2 = -0.5 * (C64::new(m1 * m1, 0.0) - 4.0 * (I + omega) * (I + omega));
        let c3 = s2 * (kappa - kc);
        let c4 = 2.0 * c3 * zf;
        let d = 0.5 * c1r * c2 + 0.25 * c2 * c2 + s2 * s2 * (ONE + kappa * kappa).norm_sqr();
        let sum = c2 + c1r;
        Ok(Self {
            d,
            u: 0.5 * (-zf * sum + m1 * c3),
            up: 0.5 * (-zf * sum - m1 * c3),
            v: 0.5 * (c4 + 0.5 * m1 * sum),
            vp: 0.5 * (c4 - 0.5 * m1 * sum),
            w: -0.5 * s * (c1 + c2),
            wp: -0.5 * s.conj() * (c1.conj() + c2),
            z: -0.5 * s * (c1 * kc + c2 * kappa),
            zp: 0.5 * s.conj() * (c1.conj() * kappa + c2 * kc),
            c1,
            c1r,
            c2,
            c3,
            c4,
        })
    }

    /// Adjugate of `L` (so `L^-1 = adjugate / d`).
    pub fn adjugate(&self) -> ComplexMatrix {
        let Self {
            u,
            up,
            v,
            vp,
            w,
            wp,
            z,
            zp,
            ..
        } = *self;
        ComplexMatrix::from_rows([
            [u, v, w, z],
            [-v, u, -z, w],
            [wp, zp, up, vp],
            [-zp, wp, -vp, up],
        ])
    }
}

/// `|D|` floor relative to `|D(0)|` of the empty cavity.
pub const DEFAULT_DET_FLOOR: f64 = 1e-12;

/// `|D(omega = 0)|` with `E = 0`, the reference for the singularity floor.
pub fn empty_cavity_det(params: &ModelParams) -> f64 {
    let c5 = 4.0 + params.m1 * params.m1;
    c5 * c5 / 16.0
}

/// Closed-form `L^-1`, refusing `|D| < floor * |D_empty(0)|`.
#[allow(non_snake_case)]
pub fn invert_L_closed(params: &ModelParams, omega: f64) -> Result<ComplexMatrix> {
    invert_L_closed_with(params, omega, DEFAULT_DET_FLOOR)
}

#[allow(non_snake_case)]
pub fn invert_L_closed_with(params: &ModelParams, omega: f64, rel_floor: f64) -> Result<ComplexMatrix> {
    let cf = ClosedFormInverse::new(params, omega)?;
    let floor = rel_floor * empty_cavity_det(params);
    let det = cf.d.norm();
    if !(det > floor) {
        return Err(ModelError::NearSingular { det, floor });
    }
    Ok(cf.adjugate().scale(ONE / cf.d))
}

/// Which inversion route feeds the transfer matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InversePath {
    #[default]
    Numeric,
    Closed,
}

/// Input-output relation `a_out = (2 L^-1 - 1) a_in`.
pub fn transfer_matrix(params: &ModelParams, omega: f64) -> Result<ComplexMatrix> {
    transfer_matrix_via(params, omega, InversePath::Numeric)
}

pub fn transfer_matrix_via(params: &ModelParams, omega: f64, path: InversePath) -> Result<ComplexMatrix> {
    let cf = ClosedFormInverse::new(params, omega)?;
    let floor = DEFAULT_DET_FLOOR * empty_cavity_det(params);
    if !(cf.d.norm() > floor) {
        return Err(ModelError::NearSingular {
            det: cf.d.norm(),
            floor,
        });
    }
    let inv = match path {
        InversePath::Numeric => invert_numeric(&build_L(params, omega)?)?.inverse,
        InversePath::Closed => cf.adjugate().scale(ONE / cf.d),
    };
    Ok(inv.scale(C64::new(2.0, 0.0)).sub(&ComplexMatrix::identity(4)))
}
