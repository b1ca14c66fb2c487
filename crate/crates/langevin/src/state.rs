use std::path::Path;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LangevinError, Result};

/// Pump and signal c-number fields on the transverse grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub alpha0: Vec<C64>,
    pub alpha1: Vec<C64>,
    pub t: f64,
}

impl FieldState {
    pub fn zeros(n: usize) -> Self {
        Self {
            alpha0: vec![C64::new(0.0, 0.0); n],
            alpha1: vec![C64::new(0.0, 0.0); n],
            t: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.alpha0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha0.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.alpha0.iter().chain(&self.alpha1).all(|v| v.is_finite())
    }

    pub fn max_norm(&self) -> f64 {
        self.alpha0
            .iter()
            .chain(&self.alpha1)
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

/// Per-trajectory random stream: ChaCha8 keyed by the seed, stream = trajectory index.
pub fn trajectory_rng(seed: u64, trajectory: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trajectory);
    rng
}

pub const SNAPSHOT_FORMAT: &str = "pcopo-field-state";
pub const SNAPSHOT_VERSION: u32 = 1;

/// Versioned JSON checkpoint of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snapshot {
    pub format: String,
    pub version: u32,
    pub grid_points: usize,
    pub box_length: f64,
    pub t: f64,
    pub seed: u64,
    pub trajectory: u64,
    /// ChaCha word position, decimal.
    pub rng_word_pos: String,
    pub alpha0: Vec<[f64; 2]>,
    pub alpha1: Vec<[f64; 2]>,
}

fn pack(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

fn unpack(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

impl Snapshot {
    pub fn capture(state: &FieldState, box_length: f64, seed: u64, trajectory: u64, rng: &ChaCha8Rng) -> Self {
        Self {
            format: SNAPSHOT_FORMAT.into(),
            version: SNAPSHOT_VERSION,
            grid_points: state.len(),
            box_length,
            t: state.t,
            seed,
            trajectory,
            rng_word_pos: rng.get_word_pos().to_string(),
            alpha0: pack(&state.alpha0),
            alpha1: pack(&state.alpha1),
        }
    }

    /// Field state and the random stream positioned where it was captured.
    pub fn restore(&self) -> Result<(FieldState, ChaCha8Rng)> {
        if self.format != SNAPSHOT_FORMAT {
            return Err(LangevinError::Snapshot(format!("unknown format `{}`", self.format)));
        }
        if self.version != SNAPSHOT_VERSION {
            return Err(LangevinError::Snapshot(format!("unsupported version {}", self.version)));
        }
        if self.alpha0.len() != self.grid_points || self.alpha1.len() != self.grid_points {
            return Err(LangevinError::Snapshot("field length differs from grid_points".into()));
        }
        let pos: u128 = self
            .rng_word_pos
            .parse()
            .map_err(|e| LangevinError::Snapshot(format!("rng_word_pos: {e}")))?;
        let mut rng = trajectory_rng(self.seed, self.trajectory);
        rng.set_word_pos(pos);
        Ok((
            FieldState {
                alpha0: unpack(&self.alpha0),
                alpha1: unpack(&self.alpha1),
                t: self.t,
            },
            rng,
        ))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| LangevinError::Snapshot(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| LangevinError::Snapshot(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
