//! Strang-split integrator. Each step applies, in order: half a step of the
//! diagonal linear part (decay, mean detuning, diffraction) in Fourier space;
//! half a step of the detuning modulation as a real-space phase; a stochastic
//! midpoint step of the drive, the nonlinear couplings and the noise; the
//! modulation half step; the linear half step.
//!
//! Noise correlators (Q representation, strength `eta`):
//! `<xi0 xi0*> = 2 eta`, `<xi1 xi1*> = 2 eta`, `<xi1 xi1> = -eta alpha0`,
//! each times `delta(x - x') delta(t - t')`, with `delta(x - x') -> 1/dx`.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use pcopo_model::ModelParams;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};

use crate::config::{Scheme, SimConfig};
use crate::error::{LangevinError, Result};
use crate::grid::Grid;
use crate::state::FieldState;

/// Fields beyond this modulus are treated as diverged.
pub const DIVERGENCE_BOUND: f64 = 1e8;

pub struct Stepper {
    grid: Grid,
    dt: f64,
    e: f64,
    eta: f64,
    noise: bool,
    nonlinear: bool,
    half0: Vec<C64>,
    half1: Vec<C64>,
    phase0: Vec<C64>,
    phase1: Vec<C64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
    zeta0: Vec<C64>,
    zeta1: Vec<C64>,
    trajectory: u64,
}

/// `exp(-rate * tau)` or its Crank-Nicolson approximation.
fn propagator(scheme: Scheme, rate: C64, tau: f64) -> C64 {
    match scheme {
        Scheme::SplitStepExponential => (-rate * tau).exp(),
        Scheme::SemiImplicit => (1.0 - rate * tau / 2.0) / (1.0 + rate * tau / 2.0),
    }
}

impl Stepper {
    pub fn new(params: &ModelParams, config: &SimConfig) -> Result<Self> {
        config.validate(params)?;
        let grid = Grid::new(config.grid_points, config.box_length(params)?);
        let kp = params.kp()?;
        let dt = config.dt;
        let n = grid.n as f64;
        let half = |delta: f64, diff: f64| -> Vec<C64> {
            grid.k
                .iter()
                .map(|&k| propagator(config.scheme, C64::new(1.0, delta + diff * k * k), dt / 2.0) / n)
                .collect()
        };
        let phase = |m: f64| -> Vec<C64> {
            grid.x
                .iter()
                .map(|&x| C64::from_polar(1.0, -m * (kp * x).sin() * dt / 2.0))
                .collect()
        };
        let mut planner = FftPlanner::new();
        Ok(Self {
            half0: half(params.delta0, 1.0),
            half1: half(params.delta1, 2.0),
            phase0: phase(params.m0),
            phase1: phase(params.m1),
            fwd: planner.plan_fft_forward(grid.n),
            inv: planner.plan_fft_inverse(grid.n),
            scratch: vec![C64::new(0.0, 0.0); grid.n],
            zeta0: vec![C64::new(0.0, 0.0); grid.n],
            zeta1: vec![C64::new(0.0, 0.0); grid.n],
            grid,
            dt,
            e: params.e,
            eta: config.noise_strength,
            noise: config.noise && config.noise_strength > 0.0,
            nonlinear: config.nonlinear,
            trajectory: 0,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Trajectory index reported in errors.
    pub fn set_trajectory(&mut self, trajectory: u64) {
        self.trajectory = trajectory;
    }

    fn linear_half(&mut self, field: &mut [C64], factors_pump: bool) {
        self.fwd.process_with_scratch(field, &mut self.scratch);
        let f = if factors_pump { &self.half0 } else { &self.half1 };
        for (v, h) in field.iter_mut().zip(f) {
            *v *= h;
        }
        self.inv.process_with_scratch(field, &mut self.scratch);
    }

    fn modulation_half(&self, state: &mut FieldState) {
        for (v, p) in state.alpha0.iter_mut().zip(&self.phase0) {
            *v *= p;
        }
        for (v, p) in state.alpha1.iter_mut().zip(&self.phase1) {
            *v *= p;
        }
    }

    /// Fills the unit complex Gaussians for one step.
    pub fn draw_noise<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for z in self.zeta0.iter_mut().chain(self.zeta1.iter_mut()) {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *z = C64::new(re * s, im * s);
        }
    }

    pub fn step<R: Rng + ?Sized>(&mut self, state: &mut FieldState, rng: &mut R) -> Result<()> {
        if self.noise {
            self.draw_noise(rng);
        }
        self.advance(state)
    }

    /// One step driven by externally supplied unit Gaussians `zeta0`, `zeta1`.
    pub fn step_with_noise(&mut self, state: &mut FieldState, zeta0: &[C64], zeta1: &[C64]) -> Result<()> {
        self.zeta0.copy_from_slice(zeta0);
        self.zeta1.copy_from_slice(zeta1);
        self.advance(state)
    }

    fn advance(&mut self, state: &mut FieldState) -> Result<()> {
        let mut a0 = std::mem::take(&mut state.alpha0);
        let mut a1 = std::mem::take(&mut state.alpha1);
        self.linear_half(&mut a0, true);
        self.linear_half(&mut a1, false);
        state.alpha0 = a0;
        state.alpha1 = a1;
        self.modulation_half(state);
        self.local_step(state)?;
        self.modulation_half(state);
        let mut a0 = std::mem::take(&mut state.alpha0);
        let mut a1 = std::mem::take(&mut state.alpha1);
        self.linear_half(&mut a0, true);
        self.linear_half(&mut a1, false);
        state.alpha0 = a0;
        state.alpha1 = a1;
        state.t += self.dt;
        Ok(())
    }

    fn local_step(&self, state: &mut FieldState) -> Result<()> {
        let dt = self.dt;
        let e = C64::new(self.e, 0.0);
        let nl = if self.nonlinear { 1.0 } else { 0.0 };
        let amp = (dt / self.grid.dx).sqrt();
        let additive = (2.0 * self.eta).sqrt() * amp;
        for j in 0..state.alpha0.len() {
            let (a0, a1) = (state.alpha0[j], state.alpha1[j]);
            let f0 = e - nl * 0.5 * a1 * a1;
            let f1 = nl * a0 * a1.conj();
            let (w0, w1) = if self.noise {
                let w0 = additive * self.zeta0[j];
                let mid0 = a0 + 0.5 * dt * f0 + 0.5 * w0;
                let r = mid0.norm();
                if r > 2.0 {
                    return Err(LangevinError::NoiseRange {
                        amplitude: r,
                        trajectory: self.trajectory,
                        t: state.t,
                    });
                }
                let s = (1.0 - r * r / 4.0).sqrt();
                let p = (self.eta * (1.0 + s)).sqrt();
                let q = -self.eta * mid0 / (2.0 * p);
                let z = self.zeta1[j];
                (w0, amp * (p * z + q * z.conj()))
            } else {
                (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
            };
            let h0 = a0 + 0.5 * dt * f0 + 0.5 * w0;
            let h1 = a1 + 0.5 * dt * f1 + 0.5 * w1;
            let n0 = a0 + dt * (e - nl * 0.5 * h1 * h1) + w0;
            let n1 = a1 + dt * nl * h0 * h1.conj() + w1;
            if !(n0.norm() < DIVERGENCE_BOUND && n1.norm() < DIVERGENCE_BOUND) {
                return Err(LangevinError::Divergence {
                    trajectory: self.trajectory,
                    t: state.t,
                });
            }
            state.alpha0[j] = n0;
            state.alpha1[j] = n1;
        }
        Ok(())
    }

    /// Mode amplitudes `a_k` in FFT order.
    pub fn modes(&mut self, field: &[C64], out: &mut [C64]) {
        out.copy_from_slice(field);
        self.fwd.process_with_scratch(out, &mut self.scratch);
        let s = self.grid.mode_scale();
        for v in out.iter_mut() {
            *v *= s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::trajectory_rng;

    fn quiet(grid_points: usize, dt: f64) -> SimConfig {
        SimConfig {
            grid_points,
            dt,
            noise: false,
            ..Default::default()
        }
    }

    #[test]
    fn vacuum_fixed_point() {
        let p = ModelParams::new(0.0, 0.5, 0.5);
        let mut st = Stepper::new(&p, &quiet(64, 0.01)).unwrap();
        let mut s = FieldState::zeros(64);
        let mut rng = trajectory_rng(1, 0);
        for _ in 0..100 {
            st.step(&mut s, &mut rng).unwrap();
        }
        assert!(s.alpha0.iter().chain(&s.alpha1).all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn homogeneous_pump_relaxes() {
        let p = ModelParams::new(0.7, 0.0, 0.0);
        let mut st = Stepper::new(&p, &quiet(64, 0.01)).unwrap();
        let mut s = FieldState::zeros(64);
        let mut rng = trajectory_rng(1, 0);
        for _ in 0..4000 {
            st.step(&mut s, &mut rng).unwrap();
        }
        // discrete fixed point of the split step: E dt / (2 sinh(dt / 2))
        let fixed = 0.7 * 0.01 / (2.0 * (0.005f64).sinh());
        assert!(s.alpha0.iter().all(|v| (v - C64::new(fixed, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn noise_range_reported() {
        let p = ModelParams::new(3.0, 0.0, 0.0);
        let cfg = SimConfig {
            grid_points: 64,
            dt: 0.01,
            ..Default::default()
        };
        let mut st = Stepper::new(&p, &cfg).unwrap();
        let mut s = FieldState::zeros(64);
        let mut rng = trajectory_rng(1, 0);
        let mut err = None;
        for _ in 0..2000 {
            if let Err(e) = st.step(&mut s, &mut rng) {
                err = Some(e);
                break;
            }
        }
        assert!(matches!(err, Some(LangevinError::NoiseRange { .. })));
    }
}
