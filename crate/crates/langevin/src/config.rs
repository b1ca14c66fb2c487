use std::f64::consts::PI;

use pcopo_model::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::{LangevinError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Exact exponential for decay, detuning and diffraction.
    #[default]
    SplitStepExponential,
    /// Crank-Nicolson for the same linear part.
    SemiImplicit,
}

/// Stochastic integration settings. Times are in units of the cavity decay time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// Power of two.
    pub grid_points: usize,
    /// Transverse period; `None` gives `box_wavelengths` critical wavelengths.
    pub box_length: Option<f64>,
    pub box_wavelengths: u32,
    pub dt: f64,
    pub t_transient: f64,
    pub t_measure: f64,
    /// Steps between recorded samples.
    pub sample_every: usize,
    /// Time batches per trajectory used for error bars.
    pub batches: usize,
    pub n_trajectories: usize,
    /// Vacuum level of a mode in the Q representation.
    pub noise_strength: f64,
    pub seed: u64,
    pub scheme: Scheme,
    pub noise: bool,
    pub nonlinear: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            grid_points: 256,
            box_length: None,
            box_wavelengths: 8,
            dt: 1e-3,
            t_transient: 50.0,
            t_measure: 200.0,
            sample_every: 10,
            batches: 10,
            n_trajectories: 4,
            noise_strength: 1e-3,
            seed: 1,
            scheme: Scheme::default(),
            noise: true,
            nonlinear: true,
        }
    }
}

/// Relative tolerance for grid commensurability.
const GRID_TOL: f64 = 1e-9;

impl SimConfig {
    pub fn box_length(&self, params: &ModelParams) -> Result<f64> {
        match self.box_length {
            Some(l) => Ok(l),
            None => Ok(self.box_wavelengths as f64 * 2.0 * PI / params.kc()?),
        }
    }

    pub fn transient_steps(&self) -> usize {
        (self.t_transient / self.dt).round() as usize
    }

    pub fn measure_steps(&self) -> usize {
        (self.t_measure / self.dt).round() as usize
    }

    /// Samples per batch; the measured window is truncated to a whole number of batches.
    pub fn samples_per_batch(&self) -> usize {
        self.measure_steps() / self.sample_every / self.batches
    }

    /// Largest `|1 + i Delta(x) + i c k^2|` over both fields and the grid.
    pub fn max_linear_rate(&self, params: &ModelParams) -> Result<f64> {
        let l = self.box_length(params)?;
        let kmax = PI * self.grid_points as f64 / l;
        let pump = 1.0 + params.delta0.abs() + params.m0 + kmax * kmax;
        let signal = 1.0 + params.delta1.abs() + params.m1 + 2.0 * kmax * kmax;
        Ok(pump.max(signal))
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        params.validate()?;
        let bad = |field, reason: String| Err(LangevinError::InvalidConfig { field, reason });
        if self.grid_points < 4 || !self.grid_points.is_power_of_two() {
            return bad("grid_points", format!("must be a power of two >= 4, got {}", self.grid_points));
        }
        let l = self.box_length(params)?;
        if !(l.is_finite() && l > 0.0) {
            return bad("box_length", format!("must be positive, got {l}"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt", format!("must be positive, got {}", self.dt));
        }
        if !(self.t_transient >= 0.0 && self.t_measure >= 0.0) {
            return bad("t_measure", "times must be nonnegative".into());
        }
        if self.sample_every == 0 || self.batches == 0 {
            return bad("sample_every", "sample_every and batches must be positive".into());
        }
        if self.n_trajectories == 0 {
            return bad("n_trajectories", "must be positive".into());
        }
        if !(self.noise_strength >= 0.0 && self.noise_strength.is_finite()) {
            return bad("noise_strength", format!("must be >= 0, got {}", self.noise_strength));
        }
        let dk = 2.0 * PI / l;
        let kc = params.kc()?;
        let kp = params.kp()?;
        for (what, k) in [("kc", kc), ("kp", kp)] {
            let m = k / dk;
            if (m - m.round()).abs() > GRID_TOL * m.max(1.0) {
                return Err(LangevinError::Incommensurate { what, k, dk });
            }
            if m.round() as usize >= self.grid_points / 2 {
                return bad("grid_points", format!("{what} = {k} lies beyond the grid Nyquist wavenumber"));
            }
        }
        let value = self.dt * self.max_linear_rate(params)?;
        if value >= 0.5 {
            return Err(LangevinError::Stability { value });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SimConfig::default().validate(&ModelParams::new(0.5, 0.5, 0.5)).unwrap();
    }

    #[test]
    fn incommensurate_box_rejected() {
        let cfg = SimConfig {
            box_length: Some(70.0),
            ..Default::default()
        };
        assert!(matches!(
            cfg.validate(&ModelParams::default()),
            Err(LangevinError::Incommensurate { what: "kc", .. })
        ));
    }

    #[test]
    fn non_power_of_two_rejected() {
        let cfg = SimConfig {
            grid_points: 100,
            ..Default::default()
        };
        assert!(cfg.validate(&ModelParams::default()).is_err());
    }

    #[test]
    fn stability_guard() {
        let cfg = SimConfig {
            dt: 0.01,
            ..Default::default()
        };
        assert!(matches!(
            cfg.validate(&ModelParams::default()),
            Err(LangevinError::Stability { .. })
        ));
        let small = SimConfig {
            grid_points: 64,
            dt: 0.01,
            ..Default::default()
        };
        small.validate(&ModelParams::default()).unwrap();
    }

    #[test]
    fn off_resonant_kp_must_sit_on_grid() {
        let p = ModelParams::default().with_kp(1.0);
        assert!(matches!(
            SimConfig::default().validate(&p),
            Err(LangevinError::Incommensurate { what: "kp", .. })
        ));
        let kc = p.kc().unwrap();
        let p = p.with_kp(kc * 1.5);
        SimConfig::default().validate(&p).unwrap();
    }
}
