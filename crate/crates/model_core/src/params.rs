use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Relative tolerance used to decide whether `kp` equals `2 kc`.
pub const RESONANCE_TOL: f64 = 1e-12;

/// Scaled model parameters shared by the analytic and stochastic engines.
///
/// `kp = None` means the photonic-crystal period is resonant, `kp = 2 kc`,
/// which needs `delta1 < 0` for `kc = sqrt(-delta1 / 2)` to exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    #[serde(rename = "E")]
    pub e: f64,
    pub delta0: f64,
    pub delta1: f64,
    #[serde(rename = "M0")]
    pub m0: f64,
    #[serde(rename = "M1")]
    pub m1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kp: Option<f64>,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            e: 0.0,
            delta0: 0.0,
            delta1: -1.0,
            m0: 0.0,
            m1: 0.0,
            kp: None,
        }
    }
}

impl ModelParams {
    /// Resonant configuration with `delta1 = -1`, `delta0 = 0`.
    pub fn new(e: f64, m0: f64, m1: f64) -> Self {
        Self {
            e,
            m0,
            m1,
            ..Self::default()
        }
    }

    pub fn with_e(mut self, e: f64) -> Self {
        self.e = e;
        self
    }

    pub fn with_delta0(mut self, delta0: f64) -> Self {
        self.delta0 = delta0;
        self
    }

    pub fn with_delta1(mut self, delta1: f64) -> Self {
        self.delta1 = delta1;
        self
    }

    pub fn with_kp(mut self, kp: f64) -> Self {
        self.kp = Some(kp);
        self
    }

    /// Critical wavenumber `sqrt(-delta1 / 2)`.
    pub fn kc(&self) -> Result<f64> {
        if self.delta1 < 0.0 && self.delta1.is_finite() {
            Ok((-self.delta1 / 2.0).sqrt())
        } else {
            Err(ModelError::UndefinedCriticalWavenumber {
                delta1: self.delta1,
            })
        }
    }

    /// Photonic-crystal wavenumber, defaulting to `2 kc`.
    pub fn kp(&self) -> Result<f64> {
        match self.kp {
            Some(kp) => Ok(kp),
            None => Ok(2.0 * self.kc()?),
        }
    }

    pub fn is_resonant(&self) -> bool {
        match (self.kp(), self.kc()) {
            (Ok(kp), Ok(kc)) => (kp - 2.0 * kc).abs() <= RESONANCE_TOL * (2.0 * kc).max(1.0),
            _ => false,
        }
    }

    /// Checks sign and finiteness constraints.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("E", self.e),
            ("delta0", self.delta0),
            ("delta1", self.delta1),
            ("M0", self.m0),
            ("M1", self.m1),
        ];
        for (field, v) in finite {
            if !v.is_finite() {
                return Err(ModelError::InvalidParameter {
                    field,
                    reason: format!("must be finite, got {v}"),
                });
            }
        }
        for (field, v) in [("E", self.e), ("M0", self.m0), ("M1", self.m1)] {
            if v < 0.0 {
                return Err(ModelError::InvalidParameter {
                    field,
                    reason: format!("must be >= 0, got {v}"),
                });
            }
        }
        match self.kp {
            Some(kp) if !(kp.is_finite() && kp > 0.0) => Err(ModelError::InvalidParameter {
                field: "kp",
                reason: format!("must be positive and finite, got {kp}"),
            }),
            Some(_) => Ok(()),
            None => self.kc().map(|_| ()),
        }
    }

    /// Validation plus the `kp = 2 kc` requirement of the few-mode closed forms.
    pub fn validate_resonant(&self) -> Result<()> {
        self.validate()?;
        let kc = self.kc()?;
        let kp = self.kp()?;
        if !self.is_resonant() {
            return Err(ModelError::NonResonantPeriod {
                kp,
                two_kc: 2.0 * kc,
            });
        }
        Ok(())
    }

    /// Looks up a field by its configuration name.
    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "E" => Some(self.e),
            "delta0" => Some(self.delta0),
            "delta1" => Some(self.delta1),
            "M0" => Some(self.m0),
            "M1" => Some(self.m1),
            "kp" => self.kp().ok(),
            _ => None,
        }
    }

    /// Sets a field by its configuration name; returns false for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        match name {
            "E" => self.e = value,
            "delta0" => self.delta0 = value,
            "delta1" => self.delta1 = value,
            "M0" => self.m0 = value,
            "M1" => self.m1 = value,
            "kp" => self.kp = Some(value),
            _ => return false,
        }
        true
    }

    pub const FIELD_NAMES: [&'static str; 6] = ["E", "delta0", "delta1", "M0", "M1", "kp"];
}
