use std::f64::consts::PI;

use pcopo_model::{coupling_constants, InversePath, ModelParams, C64};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quadrature::{integrate_real_line, QuadratureOptions};
use crate::spectrum::moment_densities;
use crate::threshold::{check_below_threshold, sigma_den};

/// Stationary second moments of the `±kc` pair.
///
/// * `n_plus = <a†(kc) a(kc)>`, `n_minus = <a†(-kc) a(-kc)>`
/// * `anom_cross = <a(kc) a(-kc)>`
/// * `anom_plus = <a(kc) a(kc)>`, `anom_minus = <a(-kc) a(-kc)>`
/// * `hop = <a†(-kc) a(kc)>`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub n_plus: f64,
    pub n_minus: f64,
    pub anom_cross: C64,
    pub anom_plus: C64,
    pub anom_minus: C64,
    pub hop: C64,
}

impl MomentSet {
    pub fn vacuum() -> Self {
        let z = C64::new(0.0, 0.0);
        Self {
            n_plus: 0.0,
            n_minus: 0.0,
            anom_cross: z,
            anom_plus: z,
            anom_minus: z,
            hop: z,
        }
    }

    /// Output moments from the closed forms.
    pub fn closed(params: &ModelParams) -> Result<Self> {
        check_below_threshold(params)?;
        let c = coupling_constants(params)?;
        let (s, k) = (c.s, c.kappa);
        let one = C64::new(1.0, 0.0);
        let s2 = s.norm_sqr();
        let m1 = params.m1;
        let c1 = 2.0 * s2 * (one + k * k);
        let c3 = s2 * (k - k.conj());
        let c5 = 4.0 + m1 * m1;
        let c6 = 2.0 + k * m1;
        let c7 = 2.0 * k - m1;
        let sigma = sigma_den(params)?;
        let n = -4.0 * s2 * (4.0 * s2 * (one + k * k).norm_sqr() - (1.0 + k.norm_sqr()) * c5) / sigma;
        let anom_plus = -2.0 * s * (2.0 * c1 * c7.conj() - c5 * c7) / sigma;
        Ok(Self {
            n_plus: n,
            n_minus: n,
            anom_cross: 2.0 * s * (-2.0 * c1 * c6.conj() + c5 * c6) / sigma,
            anom_plus,
            anom_minus: -anom_plus,
            hop: 4.0 * c3 * c5 / sigma,
        })
    }

    /// Output moments by integrating the transfer-matrix spectra over all
    /// frequencies; returns the moments and the quadrature error estimate.
    pub fn from_spectra(params: &ModelParams, opts: &QuadratureOptions, path: InversePath) -> Result<(Self, f64)> {
        check_below_threshold(params)?;
        let r = integrate_real_line(
            |w| {
                let d = moment_densities(params, w, path)?;
                let mut out = [0.0; 12];
                for (i, v) in d.iter().enumerate() {
                    out[2 * i] = v.re;
                    out[2 * i + 1] = v.im;
                }
                Ok(out)
            },
            opts,
        )?;
        let v = r.value.map(|x| x / (2.0 * PI));
        let c = |i: usize| C64::new(v[2 * i], v[2 * i + 1]);
        Ok((
            Self {
                n_plus: v[0],
                n_minus: v[2],
                anom_cross: c(2),
                anom_plus: c(3),
                anom_minus: c(4),
                hop: c(5),
            },
            r.error / (2.0 * PI),
        ))
    }

    /// Intracavity moments; the output moments are twice these.
    pub fn intracavity(&self) -> Self {
        self.scaled(0.5)
    }

    pub fn scaled(&self, f: f64) -> Self {
        Self {
            n_plus: f * self.n_plus,
            n_minus: f * self.n_minus,
            anom_cross: f * self.anom_cross,
            anom_plus: f * self.anom_plus,
            anom_minus: f * self.anom_minus,
            hop: f * self.hop,
        }
    }

    /// `(name, value)` pairs with real moments promoted to complex.
    pub fn entries(&self) -> [(&'static str, C64); 6] {
        [
            ("n_plus", C64::new(self.n_plus, 0.0)),
            ("n_minus", C64::new(self.n_minus, 0.0)),
            ("anom_cross", self.anom_cross),
            ("anom_plus", self.anom_plus),
            ("anom_minus", self.anom_minus),
            ("hop", self.hop),
        ]
    }
}

/// Output photon number of mode `kc`.
pub fn intensity(params: &ModelParams) -> Result<f64> {
    Ok(MomentSet::closed(params)?.n_plus)
}

pub fn second_moments(params: &ModelParams) -> Result<MomentSet> {
    MomentSet::closed(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn opo_intensity() {
        let n = intensity(&ModelParams::new(0.92, 0.0, 0.0)).unwrap();
        assert!((n - 0.92f64.powi(2) / (1.0 - 0.92f64.powi(2))).abs() < 1e-12);
        assert!((n - 5.51042).abs() < 1e-5);
    }

    #[test]
    fn vacuum_moments() {
        let m = MomentSet::closed(&ModelParams::new(0.0, 0.7, 0.4)).unwrap();
        for (name, v) in m.entries() {
            assert_eq!(v.norm(), 0.0, "{name}");
        }
    }

    #[test]
    fn opo_has_only_number_and_cross() {
        let m = MomentSet::closed(&ModelParams::new(0.6, 0.0, 0.0)).unwrap();
        assert_eq!(m.anom_plus.norm(), 0.0);
        assert_eq!(m.anom_minus.norm(), 0.0);
        assert_eq!(m.hop.norm(), 0.0);
        // pure two-mode squeezed output: |cross|^2 = n (n + 1)
        assert!((m.anom_cross.norm_sqr() - m.n_plus * (m.n_plus + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn signal_modulation_moments() {
        let m = MomentSet::closed(&ModelParams::new(0.8, 0.0, 0.5)).unwrap();
        assert_eq!(m.hop.norm(), 0.0);
        assert!(m.anom_plus.norm() > 1e-3);
    }

    #[test]
    fn pump_modulation_alone_gives_same_mode_pairs() {
        let m = MomentSet::closed(&ModelParams::new(0.8, 0.5, 0.0)).unwrap();
        assert!(m.anom_plus.norm() > 1e-3);
        assert!(m.hop.norm() > 1e-3);
        assert!(m.hop.re.abs() < 1e-15);
    }

    #[test]
    fn spectra_agree_at_sample_point() {
        let p = ModelParams::new(0.7, 0.6, 0.5);
        let closed = MomentSet::closed(&p).unwrap();
        let (quad, _) = MomentSet::from_spectra(&p, &QuadratureOptions::default(), InversePath::Numeric).unwrap();
        for ((name, a), (_, b)) in closed.entries().iter().zip(quad.entries()) {
            assert!((a - b).norm() <= 1e-8 * a.norm().max(1e-6), "{name}: {a} vs {b}");
        }
    }
}
