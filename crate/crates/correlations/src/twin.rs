use pcopo_model::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::{CorrelationError, Result};
use crate::moments::MomentSet;

/// Normally ordered variance of `n(kc) - n(-kc)` against its shot-noise level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwinBeamReport {
    pub raw_variance: f64,
    pub shot_noise: f64,
    pub normalized: f64,
}

impl TwinBeamReport {
    pub fn nonclassical(&self) -> bool {
        self.normalized < 0.0
    }
}

/// Gaussian moment expansion of `<:(n+ - n-)^2:>`.
pub fn twin_raw_variance(m: &MomentSet) -> f64 {
    m.n_plus * m.n_plus + m.n_minus * m.n_minus + m.anom_plus.norm_sqr() + m.anom_minus.norm_sqr()
        - 2.0 * m.anom_cross.norm_sqr()
        - 2.0 * m.hop.norm_sqr()
}

pub fn twin_beams_of(m: &MomentSet) -> Result<TwinBeamReport> {
    let raw = twin_raw_variance(m);
    let shot = m.n_plus + m.n_minus;
    if !(shot > 0.0) {
        return Err(CorrelationError::DegenerateShotNoise(shot));
    }
    Ok(TwinBeamReport {
        raw_variance: raw,
        shot_noise: shot,
        normalized: raw / shot,
    })
}

pub fn twin_beams(params: &ModelParams) -> Result<TwinBeamReport> {
    twin_beams_of(&MomentSet::closed(params)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn opo_twin_beams_perfect() {
        for &e in &[0.5, 0.9, 0.99] {
            let r = twin_beams(&ModelParams::new(e, 0.0, 0.0)).unwrap();
            assert!((r.normalized + 1.0).abs() < 1e-9);
            assert!(r.nonclassical());
        }
    }

    #[test]
    fn vacuum_shot_noise_rejected() {
        assert!(matches!(
            twin_beams(&ModelParams::new(0.0, 0.0, 0.0)),
            Err(CorrelationError::DegenerateShotNoise(_))
        ));
    }
}
