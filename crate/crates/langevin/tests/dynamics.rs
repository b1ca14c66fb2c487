use num_complex::Complex64 as C64;
use pcopo_correlations::relative_pump;
use pcopo_langevin::{trajectory_rng, FieldState, LangevinError, Scheme, SimConfig, Stepper};
use pcopo_model::{pump_harmonics, ModelParams};

fn quiet(grid_points: usize, dt: f64) -> SimConfig {
    SimConfig {
        grid_points,
        dt,
        noise: false,
        ..Default::default()
    }
}

fn plane_waves(x: &[f64], waves: &[(f64, C64)]) -> Vec<C64> {
    x.iter()
        .map(|&x| waves.iter().map(|&(k, c)| c * C64::from_polar(1.0, k * x)).sum())
        .collect()
}

/// Fourier coefficient `(1/N) sum_j f_j e^{-i k x_j}`.
fn coefficient(x: &[f64], f: &[C64], k: f64) -> C64 {
    x.iter().zip(f).map(|(&x, v)| v * C64::from_polar(1.0, -k * x)).sum::<C64>() / x.len() as f64
}

#[test]
fn free_modes_follow_linear_dispersion() {
    let p = ModelParams::new(0.0, 0.0, 0.0).with_delta0(0.3);
    let cfg = SimConfig {
        nonlinear: false,
        ..quiet(64, 0.01)
    };
    let mut st = Stepper::new(&p, &cfg).unwrap();
    let g = st.grid().clone();
    let ks = [0.0, g.dk, -3.0 * g.dk, p.kc().unwrap(), 20.0 * g.dk];
    let waves: Vec<(f64, C64)> = ks.iter().enumerate().map(|(i, &k)| (k, C64::new(1.0, 0.2 * i as f64))).collect();
    let mut s = FieldState {
        alpha0: plane_waves(&g.x, &waves),
        alpha1: plane_waves(&g.x, &waves),
        t: 0.0,
    };
    let mut rng = trajectory_rng(1, 0);
    for n in 1..=50 {
        st.step(&mut s, &mut rng).unwrap();
        let t = n as f64 * cfg.dt;
        for &(k, c) in &waves {
            let pump = c * (-C64::new(1.0, p.delta0 + k * k) * t).exp();
            let signal = c * (-C64::new(1.0, p.delta1 + 2.0 * k * k) * t).exp();
            assert!((coefficient(&g.x, &s.alpha0, k) - pump).norm() < 1e-10 * n as f64);
            assert!((coefficient(&g.x, &s.alpha1, k) - signal).norm() < 1e-10 * n as f64);
        }
    }
}

#[test]
fn pump_relaxes_to_coupled_mode_ladder() {
    let p = ModelParams::new(0.92, 0.5, 0.0);
    let mut st = Stepper::new(&p, &quiet(128, 1e-3)).unwrap();
    let mut s = FieldState::zeros(128);
    let mut rng = trajectory_rng(1, 0);
    for _ in 0..40_000 {
        st.step(&mut s, &mut rng).unwrap();
    }
    let x = st.grid().x.clone();
    let ladder = pump_harmonics(&p, 8).unwrap();
    let kp = p.kp().unwrap();
    for m in -2i32..=2 {
        let sim = coefficient(&x, &s.alpha0, m as f64 * kp);
        let expect = ladder[(8 + m) as usize];
        assert!((sim - expect).norm() < 1e-6, "harmonic {m}: {sim} vs {expect}");
    }
    assert!(s.alpha1.iter().all(|v| *v == C64::new(0.0, 0.0)));
}

fn seeded_growth(params: &ModelParams) -> f64 {
    let mut st = Stepper::new(params, &quiet(64, 0.01)).unwrap();
    let g = st.grid().clone();
    // broadband seed with no special phase relation between +k and -k
    let seed: Vec<C64> = g.x.iter().map(|&x| C64::new(1e-6 * (0.3 * x).sin(), 1e-6 * (1.7 * x).cos())).collect();
    let mut s = FieldState::zeros(64);
    s.alpha1 = seed.clone();
    let mut rng = trajectory_rng(1, 0);
    for _ in 0..30_000 {
        st.step(&mut s, &mut rng).unwrap();
    }
    let norm = |v: &[C64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    norm(&s.alpha1) / norm(&seed)
}

#[test]
fn threshold_separates_growth_from_decay() {
    for (m0, m1) in [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)] {
        let base = ModelParams::new(0.0, m0, m1);
        let above = seeded_growth(&relative_pump(&base, 1.05).unwrap());
        let below = seeded_growth(&relative_pump(&base, 0.95).unwrap());
        assert!(above > 1e2, "({m0}, {m1}) above threshold: {above}");
        assert!(below < 1e-2, "({m0}, {m1}) below threshold: {below}");
    }
}

#[test]
fn exponential_and_semi_implicit_schemes_agree_for_smooth_fields() {
    let p = ModelParams::new(0.8, 0.4, 0.3);
    let run = |scheme: Scheme, dt: f64| {
        let cfg = SimConfig { scheme, ..quiet(64, dt) };
        let mut st = Stepper::new(&p, &cfg).unwrap();
        let g = st.grid().clone();
        let mut s = FieldState::zeros(64);
        s.alpha1 = plane_waves(&g.x, &[(p.kc().unwrap(), C64::new(0.1, 0.0))]);
        let mut rng = trajectory_rng(1, 0);
        for _ in 0..(2.0 / dt).round() as usize {
            st.step(&mut s, &mut rng).unwrap();
        }
        s
    };
    let a = run(Scheme::SplitStepExponential, 1e-3);
    let b = run(Scheme::SemiImplicit, 1e-3);
    let diff = a.alpha0.iter().zip(&b.alpha0).chain(a.alpha1.iter().zip(&b.alpha1)).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
    assert!(diff < 1e-6, "{diff}");
}

#[test]
fn pump_beyond_noise_range_is_reported() {
    let p = ModelParams::new(3.0, 0.0, 0.0);
    let cfg = SimConfig {
        grid_points: 64,
        dt: 0.01,
        t_transient: 20.0,
        t_measure: 1.0,
        n_trajectories: 2,
        ..Default::default()
    };
    match pcopo_langevin::run_ensemble(&p, &cfg) {
        Err(LangevinError::NoiseRange { trajectory, t, .. }) => {
            assert_eq!(trajectory, 0);
            assert!(t > 0.0);
        }
        other => panic!("expected a noise range error, got {other:?}"),
    }
}
