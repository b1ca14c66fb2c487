use num_complex::Complex64 as C64;
use pcopo_model::ModelParams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::Result;
use crate::grid::Grid;
use crate::state::{trajectory_rng, FieldState};
use crate::stepper::Stepper;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Sampled moments of the `±kc` signal modes in the Q representation
/// (antinormal order for `n_plus`, `n_minus`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ModeMoments {
    pub n_plus: f64,
    pub n_minus: f64,
    pub anom_cross: C64,
    pub anom_plus: C64,
    pub anom_minus: C64,
    pub hop: C64,
}

impl ModeMoments {
    const LEN: usize = 10;

    fn sample(ap: C64, am: C64) -> [f64; Self::LEN] {
        let c = ap * am;
        let pp = ap * ap;
        let mm = am * am;
        let h = am.conj() * ap;
        [ap.norm_sqr(), am.norm_sqr(), c.re, c.im, pp.re, pp.im, mm.re, mm.im, h.re, h.im]
    }

    fn from_array(v: &[f64; Self::LEN]) -> Self {
        Self {
            n_plus: v[0],
            n_minus: v[1],
            anom_cross: C64::new(v[2], v[3]),
            anom_plus: C64::new(v[4], v[5]),
            anom_minus: C64::new(v[6], v[7]),
            hop: C64::new(v[8], v[9]),
        }
    }

    fn to_array(&self) -> [f64; Self::LEN] {
        [
            self.n_plus,
            self.n_minus,
            self.anom_cross.re,
            self.anom_cross.im,
            self.anom_plus.re,
            self.anom_plus.im,
            self.anom_minus.re,
            self.anom_minus.im,
            self.hop.re,
            self.hop.im,
        ]
    }
}

/// Standard errors of [`ModeMoments`]; complex entries combine both parts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ModeMomentErrors {
    pub n_plus: f64,
    pub n_minus: f64,
    pub anom_cross: f64,
    pub anom_plus: f64,
    pub anom_minus: f64,
    pub hop: f64,
}

/// Time- and ensemble-averaged statistics; spectra are in ascending `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub k: Vec<f64>,
    pub far_field_pump: Vec<f64>,
    pub far_field_pump_err: Vec<f64>,
    pub far_field_signal: Vec<f64>,
    pub far_field_signal_err: Vec<f64>,
    pub mode_moments: ModeMoments,
    pub mode_moment_errors: ModeMomentErrors,
    /// One entry per (trajectory, time batch), trajectory-major.
    pub batch_moments: Vec<ModeMoments>,
    pub n_trajectories: usize,
    pub samples_per_batch: usize,
    pub kc: f64,
    pub kp: f64,
    pub dk: f64,
}

impl EnsembleStats {
    /// Position of wavenumber `k` in the ascending spectra.
    pub fn position(&self, k: f64) -> usize {
        let m = (k / self.dk).round() as i64;
        (m + self.k.len() as i64 / 2) as usize
    }

    pub fn batches(&self) -> usize {
        self.batch_moments.len()
    }
}

struct BatchMean {
    far0: Vec<f64>,
    far1: Vec<f64>,
    moments: [f64; ModeMoments::LEN],
}

struct Accumulator {
    far0: Vec<CompensatedSum>,
    far1: Vec<CompensatedSum>,
    moments: [CompensatedSum; ModeMoments::LEN],
    count: usize,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Self {
            far0: vec![CompensatedSum::default(); n],
            far1: vec![CompensatedSum::default(); n],
            moments: [CompensatedSum::default(); ModeMoments::LEN],
            count: 0,
        }
    }

    fn mean(&self) -> BatchMean {
        let c = self.count as f64;
        BatchMean {
            far0: self.far0.iter().map(|s| s.value() / c).collect(),
            far1: self.far1.iter().map(|s| s.value() / c).collect(),
            moments: std::array::from_fn(|i| self.moments[i].value() / c),
        }
    }
}

/// Buffers for mode decomposition of a state.
pub(crate) struct ModeProbe {
    pub modes0: Vec<C64>,
    pub modes1: Vec<C64>,
    pub ip: usize,
    pub im: usize,
}

impl ModeProbe {
    pub fn new(grid: &Grid, kc: f64) -> Self {
        Self {
            modes0: vec![C64::new(0.0, 0.0); grid.n],
            modes1: vec![C64::new(0.0, 0.0); grid.n],
            ip: grid.index_of(kc),
            im: grid.index_of(-kc),
        }
    }

    pub fn load(&mut self, stepper: &mut Stepper, state: &FieldState) {
        stepper.modes(&state.alpha0, &mut self.modes0);
        stepper.modes(&state.alpha1, &mut self.modes1);
    }
}

fn run_trajectory(params: &ModelParams, config: &SimConfig, trajectory: u64) -> Result<Vec<BatchMean>> {
    let mut stepper = Stepper::new(params, config)?;
    stepper.set_trajectory(trajectory);
    let mut rng = trajectory_rng(config.seed, trajectory);
    let n = config.grid_points;
    let mut state = FieldState::zeros(n);
    for _ in 0..config.transient_steps() {
        stepper.step(&mut state, &mut rng)?;
    }
    let spb = config.samples_per_batch().max(1);
    let mut probe = ModeProbe::new(stepper.grid(), params.kc()?);
    let mut out = Vec::with_capacity(config.batches);
    for _ in 0..config.batches {
        let mut acc = Accumulator::new(n);
        for _ in 0..spb {
            for _ in 0..config.sample_every {
                stepper.step(&mut state, &mut rng)?;
            }
            probe.load(&mut stepper, &state);
            for j in 0..n {
                acc.far0[j].add(probe.modes0[j].norm_sqr());
                acc.far1[j].add(probe.modes1[j].norm_sqr());
            }
            let s = ModeMoments::sample(probe.modes1[probe.ip], probe.modes1[probe.im]);
            for (a, v) in acc.moments.iter_mut().zip(s) {
                a.add(v);
            }
            acc.count += 1;
        }
        out.push(acc.mean());
    }
    Ok(out)
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let mut s = CompensatedSum::default();
    let mut n = 0usize;
    for v in values.clone() {
        s.add(v);
        n += 1;
    }
    let mean = s.value() / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let mut ss = CompensatedSum::default();
    for v in values {
        ss.add((v - mean) * (v - mean));
    }
    (mean, (ss.value() / (n - 1) as f64 / n as f64).sqrt())
}

/// Stationary statistics over independent trajectories run on the rayon pool.
///
/// Trajectory `i` draws from stream `i` of the seeded generator and results
/// are reduced in trajectory order, so the output does not depend on the
/// number of worker threads.
pub fn run_ensemble(params: &ModelParams, config: &SimConfig) -> Result<EnsembleStats> {
    config.validate(params)?;
    let grid = Grid::new(config.grid_points, config.box_length(params)?);
    let results: Vec<Result<Vec<BatchMean>>> = (0..config.n_trajectories as u64)
        .into_par_iter()
        .map(|t| run_trajectory(params, config, t))
        .collect();
    let mut batches = Vec::new();
    for r in results {
        batches.extend(r?);
    }
    let order = grid.ascending();
    let field = |sel: fn(&BatchMean) -> &Vec<f64>| -> (Vec<f64>, Vec<f64>) {
        order
            .iter()
            .map(|&j| mean_and_se(batches.iter().map(move |b| sel(b)[j])))
            .unzip()
    };
    let (pump, pump_err) = field(|b| &b.far0);
    let (signal, signal_err) = field(|b| &b.far1);
    let stats: Vec<(f64, f64)> = (0..ModeMoments::LEN)
        .map(|i| mean_and_se(batches.iter().map(move |b| b.moments[i])))
        .collect();
    let means: [f64; ModeMoments::LEN] = std::array::from_fn(|i| stats[i].0);
    let se = |i: usize| stats[i].1;
    let cse = |i: usize| se(i).hypot(se(i + 1));
    Ok(EnsembleStats {
        k: order.iter().map(|&j| grid.k[j]).collect(),
        far_field_pump: pump,
        far_field_pump_err: pump_err,
        far_field_signal: signal,
        far_field_signal_err: signal_err,
        mode_moments: ModeMoments::from_array(&means),
        mode_moment_errors: ModeMomentErrors {
            n_plus: se(0),
            n_minus: se(1),
            anom_cross: cse(2),
            anom_plus: cse(4),
            anom_minus: cse(6),
            hop: cse(8),
        },
        batch_moments: batches.iter().map(|b| ModeMoments::from_array(&b.moments)).collect(),
        n_trajectories: config.n_trajectories,
        samples_per_batch: config.samples_per_batch().max(1),
        kc: params.kc()?,
        kp: params.kp()?,
        dk: grid.dk,
    })
}

impl ModeMoments {
    pub fn mean_of(items: &[ModeMoments]) -> ModeMoments {
        let mut acc = [CompensatedSum::default(); Self::LEN];
        for m in items {
            for (a, v) in acc.iter_mut().zip(m.to_array()) {
                a.add(v);
            }
        }
        ModeMoments::from_array(&std::array::from_fn(|i| acc[i].value() / items.len() as f64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..10 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 10.0);
    }

    #[test]
    fn mean_and_standard_error() {
        let (m, se) = mean_and_se([1.0, 2.0, 3.0, 4.0].into_iter());
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn moment_sample_layout() {
        let ap = C64::new(1.0, 2.0);
        let am = C64::new(-0.5, 0.25);
        let m = ModeMoments::from_array(&ModeMoments::sample(ap, am));
        assert_eq!(m.n_plus, 5.0);
        assert_eq!(m.anom_cross, ap * am);
        assert_eq!(m.hop, am.conj() * ap);
        assert_eq!(ModeMoments::from_array(&m.to_array()), m);
    }
}
