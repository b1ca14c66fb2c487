//! Two-mode quadrature superpositions `Sigma = x1(theta) + x2(theta + phi)`
//! with `x(alpha) = a e^{i alpha} + a† e^{-i alpha}`; a vacuum quadrature has
//! unit variance, so `Sigma` has variance 2 in vacuum.

use std::f64::consts::PI;

use pcopo_model::{ModelParams, C64};
use serde::{Deserialize, Serialize};

use crate::error::{CorrelationError, Result};
use crate::moments::MomentSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub theta: f64,
    pub phi: f64,
}

impl QuadratureSpec {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// Angles reduced to `[0, 2 pi)`.
    pub fn reduced(&self) -> Self {
        let r = |a: f64| a.rem_euclid(2.0 * PI);
        Self::new(r(self.theta), r(self.phi))
    }

    /// The combination whose variance enters the Duan and Reid criteria
    /// together with `self`.
    pub fn partner(&self) -> Self {
        Self::new(self.theta + PI / 2.0, self.phi + PI)
    }
}

/// Second moments of `x1 = x_{kc}(theta)` and `x2 = x_{-kc}(theta + phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePair {
    pub x1x1: f64,
    pub x2x2: f64,
    pub x1x2: f64,
}

impl QuadraturePair {
    pub fn new(m: &MomentSet, spec: QuadratureSpec) -> Self {
        let (t, f) = (spec.theta, spec.phi);
        let e = |a: f64| C64::from_polar(1.0, a);
        Self {
            x1x1: 2.0 * (m.anom_plus * e(2.0 * t)).re + 2.0 * m.n_plus + 1.0,
            x2x2: 2.0 * (m.anom_minus * e(2.0 * (t + f))).re + 2.0 * m.n_minus + 1.0,
            x1x2: 2.0 * (m.anom_cross * e(2.0 * t + f)).re + 2.0 * (m.hop.conj() * e(f)).re,
        }
    }

    /// Variance of `a x1 + b x2`.
    pub fn variance(&self, a: f64, b: f64) -> f64 {
        a * a * self.x1x1 + b * b * self.x2x2 + 2.0 * a * b * self.x1x2
    }
}

pub fn sigma_variance(m: &MomentSet, spec: QuadratureSpec) -> f64 {
    QuadraturePair::new(m, spec).variance(1.0, 1.0)
}

/// Output variance of `Sigma_{theta, phi}`.
pub fn quadrature_variance(params: &ModelParams, spec: QuadratureSpec) -> Result<f64> {
    Ok(sigma_variance(&MomentSet::closed(params)?, spec))
}

#[derive(Debug, Clone, Copy)]
pub struct AngleSearch {
    pub n_theta: usize,
    pub n_phi: usize,
    pub value_tol: f64,
    pub max_sweeps: usize,
}

impl Default for AngleSearch {
    fn default() -> Self {
        Self {
            n_theta: 181,
            n_phi: 181,
            value_tol: 1e-10,
            max_sweeps: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinVariance {
    pub value: f64,
    pub theta_star: f64,
    pub phi_star: f64,
}

/// Grid angles `theta_i = i pi / n_theta`, `phi_j = 2 pi j / n_phi`.
pub fn angle_grids(n_theta: usize, n_phi: usize) -> (Vec<f64>, Vec<f64>) {
    (
        (0..n_theta).map(|i| PI * i as f64 / n_theta as f64).collect(),
        (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect(),
    )
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Global minimum of `Var(Sigma_{theta, phi})` for fixed moments.
pub fn min_variance_of(m: &MomentSet, search: &AngleSearch) -> Result<MinVariance> {
    if search.n_theta == 0 || search.n_phi == 0 {
        return Err(CorrelationError::InvalidGrid("empty angle grid".into()));
    }
    let (thetas, phis) = angle_grids(search.n_theta, search.n_phi);
    let f = |t: f64, p: f64| sigma_variance(m, QuadratureSpec::new(t, p));
    let mut best = (f(0.0, 0.0), 0.0, 0.0);
    for &t in &thetas {
        for &p in &phis {
            let v = f(t, p);
            // ties keep the lexicographically first grid point
            if v < best.0 - 1e-12 {
                best = (v, t, p);
            }
        }
    }
    let (mut value, mut t, mut p) = best;
    let ht = PI / search.n_theta as f64;
    let hp = 2.0 * PI / search.n_phi as f64;
    for _ in 0..search.max_sweeps {
        let before = value;
        let (nt, vt) = golden_section(|x| f(x, p), t - ht, t + ht, 1e-12);
        if vt < value {
            t = nt;
            value = vt;
        }
        let (np, vp) = golden_section(|y| f(t, y), p - hp, p + hp, 1e-12);
        if vp < value {
            p = np;
            value = vp;
        }
        if before - value <= search.value_tol * 1e-2 {
            break;
        }
    }
    let spec = QuadratureSpec::new(t, p);
    let spec = QuadratureSpec::new(spec.theta.rem_euclid(PI), spec.reduced().phi);
    Ok(MinVariance {
        value,
        theta_star: spec.theta,
        phi_star: spec.phi,
    })
}

pub fn min_variance(params: &ModelParams) -> Result<MinVariance> {
    min_variance_of(&MomentSet::closed(params)?, &AngleSearch::default())
}
