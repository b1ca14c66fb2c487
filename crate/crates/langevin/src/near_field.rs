//! Single-trajectory space-time records of the signal field.

use num_complex::Complex64 as C64;
use pcopo_model::ModelParams;
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::ensemble::ModeProbe;
use crate::error::{LangevinError, Result};
use crate::state::{trajectory_rng, FieldState};
use crate::stepper::Stepper;

/// `Re alpha1(x, t)` on the grid plus the `±kc` mode amplitudes over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearFieldRecord {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    /// One row per recorded time.
    pub re_alpha1: Vec<Vec<f64>>,
    pub mode_plus: Vec<C64>,
    pub mode_minus: Vec<C64>,
    /// Ascending wavenumbers of `spatial_spectrum`.
    pub k: Vec<f64>,
    /// Time average of `|a_k|^2` of the signal.
    pub spatial_spectrum: Vec<f64>,
}

/// Runs trajectory 0 through the transient, then records every `stride`
/// steps for `t_measure`.
pub fn near_field_record(params: &ModelParams, config: &SimConfig, stride: usize) -> Result<NearFieldRecord> {
    if stride == 0 {
        return Err(LangevinError::InvalidConfig {
            field: "stride",
            reason: "must be positive".into(),
        });
    }
    let mut stepper = Stepper::new(params, config)?;
    let mut rng = trajectory_rng(config.seed, 0);
    let mut state = FieldState::zeros(config.grid_points);
    for _ in 0..config.transient_steps() {
        stepper.step(&mut state, &mut rng)?;
    }
    let grid = stepper.grid().clone();
    let order = grid.ascending();
    let mut probe = ModeProbe::new(&grid, params.kc()?);
    let mut spectrum = vec![0.0; grid.n];
    let mut rec = NearFieldRecord {
        x: grid.x.clone(),
        t: Vec::new(),
        re_alpha1: Vec::new(),
        mode_plus: Vec::new(),
        mode_minus: Vec::new(),
        k: order.iter().map(|&j| grid.k[j]).collect(),
        spatial_spectrum: Vec::new(),
    };
    for _ in 0..config.measure_steps() / stride {
        for _ in 0..stride {
            stepper.step(&mut state, &mut rng)?;
        }
        probe.load(&mut stepper, &state);
        for (s, &j) in spectrum.iter_mut().zip(&order) {
            *s += probe.modes1[j].norm_sqr();
        }
        rec.t.push(state.t);
        rec.re_alpha1.push(state.alpha1.iter().map(|v| v.re).collect());
        rec.mode_plus.push(probe.modes1[probe.ip]);
        rec.mode_minus.push(probe.modes1[probe.im]);
    }
    let n = rec.t.len().max(1) as f64;
    rec.spatial_spectrum = spectrum.into_iter().map(|s| s / n).collect();
    Ok(rec)
}

impl NearFieldRecord {
    /// Spatial phase of the `±kc` fringes, `arg a(kc) - arg a(-kc)`.
    pub fn pattern_phase(&self) -> Vec<f64> {
        self.mode_plus
            .iter()
            .zip(&self.mode_minus)
            .map(|(p, m)| (p * m.conj()).arg())
            .collect()
    }

    /// `1 - |<exp(2i (Phi(t + lag) - Phi(t)))>|` over the record; the doubled
    /// angle makes fringes shifted by half a period equivalent.
    pub fn circular_variance_at_lag(&self, lag: usize) -> f64 {
        let phi = self.pattern_phase();
        if lag >= phi.len() {
            return f64::NAN;
        }
        let n = phi.len() - lag;
        let s: C64 = (0..n)
            .map(|i| C64::from_polar(1.0, 2.0 * (phi[i + lag] - phi[i])))
            .sum();
        1.0 - s.norm() / n as f64
    }

    /// `1 - |<exp(2i Phi)>|` over the whole record.
    pub fn circular_variance(&self) -> f64 {
        let phi = self.pattern_phase();
        let s: C64 = phi.iter().map(|&p| C64::from_polar(1.0, 2.0 * p)).sum();
        1.0 - s.norm() / phi.len() as f64
    }

    /// Ratio of the time-averaged spectrum at `k` to the median over all `k`.
    pub fn peak_contrast(&self, k: f64) -> f64 {
        let j = self
            .k
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - k).abs().total_cmp(&(b.1 - k).abs()))
            .map(|(j, _)| j)
            .unwrap_or(0);
        let mut sorted = self.spatial_spectrum.clone();
        sorted.sort_by(f64::total_cmp);
        self.spatial_spectrum[j] / sorted[sorted.len() / 2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(phases: &[f64]) -> NearFieldRecord {
        NearFieldRecord {
            x: vec![],
            t: (0..phases.len()).map(|i| i as f64).collect(),
            re_alpha1: vec![],
            mode_plus: phases.iter().map(|&p| C64::from_polar(2.0, p)).collect(),
            mode_minus: vec![C64::new(1.0, 0.0); phases.len()],
            k: vec![],
            spatial_spectrum: vec![],
        }
    }

    #[test]
    fn locked_phase_has_zero_variance() {
        let r = record(&[0.3; 50]);
        assert!(r.circular_variance().abs() < 1e-12);
        assert!(r.circular_variance_at_lag(10).abs() < 1e-12);
    }

    #[test]
    fn half_period_shift_is_equivalent() {
        let ph: Vec<f64> = (0..40).map(|i| 0.3 + std::f64::consts::PI * (i % 2) as f64).collect();
        assert!(record(&ph).circular_variance() < 1e-12);
    }

    #[test]
    fn uniform_drift_decorrelates() {
        let ph: Vec<f64> = (0..400).map(|i| i as f64 * 0.1).collect();
        assert!(record(&ph).circular_variance() > 0.9);
        assert!(record(&ph).circular_variance_at_lag(1) < 1e-12);
    }
}
