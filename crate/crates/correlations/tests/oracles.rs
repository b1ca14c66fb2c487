use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use pcopo_correlations::covariance::{covariance_min_eigenvalue, physicality_margin};
use pcopo_correlations::*;
use pcopo_model::{build_L, coupling_constants, InversePath, ModelParams};
use proptest::prelude::*;

/// Threshold as the smallest root of the quadratic `sigma_den(x = E^2) = 0`.
fn threshold_oracle(m0: f64, m1: f64) -> f64 {
    let c = coupling_constants(&ModelParams::new(1.0, m0, m1)).unwrap();
    let s2 = c.s.norm_sqr();
    let c5 = 4.0 + m1 * m1;
    let k = c.kappa;
    // leading factor c5 - 4 x s2 (1 + |k|^2 + 2|Im k|)
    (c5 / (4.0 * s2 * (1.0 + k.norm_sqr() + 2.0 * k.im.abs()))).sqrt()
}

/// Output moments from the stationary Lyapunov equation
/// `L0 C + C L0^T = 2 N` (intracavity, normally ordered), doubled.
fn lyapunov_oracle(p: &ModelParams) -> MomentSet {
    let l = build_L(p, 0.0).unwrap();
    let n = 4;
    // unknown c[i][j] -> index i * n + j
    let mut a = vec![vec![C64::new(0.0, 0.0); n * n + 1]; n * n];
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                a[row][k * n + j] += l[(i, k)];
                a[row][i * n + k] += l[(j, k)];
            }
            if (i, j) == (0, 3) || (i, j) == (1, 2) {
                a[row][n * n] = C64::new(2.0, 0.0);
            }
        }
    }
    let m = n * n;
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm())).unwrap();
        a.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for k in col..=m {
                    let v = a[col][k];
                    a[r][k] -= f * v;
                }
            }
        }
    }
    let c = |i: usize, j: usize| 2.0 * a[i * n + j][m] / a[i * n + j][i * n + j];
    MomentSet {
        n_plus: c(3, 0).re,
        n_minus: c(2, 1).re,
        anom_cross: c(0, 1),
        anom_plus: c(0, 0),
        anom_minus: c(1, 1),
        hop: c(2, 0),
    }
}

fn assert_moments_close(a: &MomentSet, b: &MomentSet, rel: f64) {
    let scale = a.n_plus.abs().max(1e-3);
    for ((name, x), (_, y)) in a.entries().iter().zip(b.entries()) {
        assert!((x - y).norm() <= rel * scale, "{name}: {x} vs {y}");
    }
}

#[test]
fn closed_moments_match_lyapunov() {
    for &(e, m0, m1) in &[(0.92, 0.0, 0.0), (0.5, 0.5, 0.0), (0.5, 0.0, 0.5), (0.6, 0.5, 0.7), (0.3, 0.9, 0.2)] {
        let p = ModelParams::new(e, m0, m1);
        assert_moments_close(&MomentSet::closed(&p).unwrap(), &lyapunov_oracle(&p), 1e-11);
    }
}

#[test]
fn signal_modulation_intensity_equals_spectral_integral() {
    let p = ModelParams::new(0.92, 0.0, 0.5);
    let (quad, _) = MomentSet::from_spectra(&p, &QuadratureOptions::default(), InversePath::Numeric).unwrap();
    let n = intensity(&p).unwrap();
    assert!(n.is_finite());
    assert!((quad.n_plus - n).abs() < 1e-8 * n);
}

#[test]
fn threshold_formula_without_pump_modulation() {
    for &m1 in &[0.0, 0.25, 0.5, 1.0] {
        let t = threshold(&ModelParams::new(0.0, 0.0, m1)).unwrap();
        assert!((t - (1.0f64 + m1 * m1 / 4.0).sqrt()).abs() < 1e-6);
    }
}

#[test]
fn pump_modulated_threshold() {
    let t = threshold(&ModelParams::new(0.0, 0.5, 0.0)).unwrap();
    assert!((t - threshold_oracle(0.5, 0.0)).abs() < 1e-9);
    let p = ModelParams::new(t, 0.5, 0.0);
    assert!(sigma_den(&p).unwrap().abs() < 1e-7);
    let just_below = intensity(&p.with_e(t * (1.0 - 1e-4))).unwrap();
    assert!(just_below.is_finite() && just_below > 100.0);
    assert!(intensity(&p.with_e(t * 1.01)).is_err());
}

#[test]
fn opo_spectrum_peaks_at_zero() {
    let p = ModelParams::new(0.9, 0.0, 0.0);
    let s0 = spectral_intensity(&p, 0.0).unwrap();
    for i in 1..=400 {
        let w = -4.0 + 8.0 * i as f64 / 400.0;
        if w != 0.0 {
            assert!(spectral_intensity(&p, w).unwrap() < s0);
        }
    }
}

fn spectral_argmax(p: &ModelParams, span: f64, n: usize) -> f64 {
    let (mut best_w, mut best) = (0.0, spectral_intensity(p, 0.0).unwrap());
    for i in 0..=n {
        let w = -span + 2.0 * span * i as f64 / n as f64;
        let s = spectral_intensity(p, w).unwrap();
        if s > best {
            best = s;
            best_w = w;
        }
    }
    best_w
}

#[test]
fn pump_modulated_spectrum_diverges_at_zero_frequency() {
    // D(omega) = (z^2 + m^2 - r_+)(z^2 + m^2 - r_-) with real r_±, so the
    // zero crossing at threshold sits at omega = 0
    let t = threshold(&ModelParams::new(0.0, 0.5, 0.0)).unwrap();
    for &f in &[0.9, 0.99, 0.999] {
        let p = ModelParams::new(f * t, 0.5, 0.0);
        assert_eq!(spectral_argmax(&p, 2.0, 4000), 0.0);
    }
}

#[test]
fn strong_signal_modulation_splits_spectrum() {
    let p = relative_pump(&ModelParams::new(0.0, 0.5, 3.0), 0.6).unwrap();
    let w = spectral_argmax(&p, 4.0, 800);
    assert!(w.abs() > 0.2, "{w}");
    let a = spectral_intensity(&p, w).unwrap();
    let b = spectral_intensity(&p, -w).unwrap();
    assert!((a - b).abs() < 1e-10 * a);
}

#[test]
fn twin_beams_without_pump_modulation() {
    for &m1 in &[0.0, 0.3, 0.5, 1.0, 1.4] {
        for &e in &[0.2, 0.5, 0.8, 0.92, 1.0] {
            let p = ModelParams::new(e, 0.0, m1);
            if !is_below_threshold(&p).unwrap() {
                continue;
            }
            let r = twin_beams(&p).unwrap();
            let d = 4.0 - 4.0 * e * e + m1 * m1;
            let raw = 8.0 * e * e * (4.0 * e * e + m1 * m1 - 4.0) / (d * d);
            assert!((r.raw_variance - raw).abs() <= 1e-9 * raw.abs().max(1e-3));
            if m1 == 0.0 {
                assert!((r.normalized + 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn twin_sign_boundary() {
    for &m1 in &[0.2, 0.5, 0.9, 1.3] {
        let f = |e: f64| twin_beams(&ModelParams::new(e, 0.0, m1)).unwrap().raw_variance;
        let (mut lo, mut hi) = (0.05, 1.0);
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - (1.0 - m1 * m1 / 4.0).sqrt()).abs() < 1e-6);
    }
}

#[test]
fn opo_minimum_decreases_with_pump() {
    let mut prev = f64::INFINITY;
    for i in 1..40 {
        let e = i as f64 / 40.0;
        let v = min_variance(&ModelParams::new(e, 0.0, 0.0)).unwrap().value;
        assert!(v < prev);
        prev = v;
    }
}

#[test]
fn squeezing_exists_below_threshold() {
    let p = relative_pump(&ModelParams::new(0.0, 0.0, 0.0), 0.95).unwrap();
    assert!(min_variance(&p).unwrap().value < 2.0);
}

#[test]
fn squeezing_parity_across_configurations() {
    let mins: Vec<f64> = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]
        .iter()
        .map(|&(m0, m1)| {
            let p = relative_pump(&ModelParams::new(0.0, m0, m1), 0.95).unwrap();
            min_variance(&p).unwrap().value
        })
        .collect();
    let lo = mins.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = mins.iter().cloned().fold(0.0, f64::max);
    assert!((hi - lo) / lo < 0.02, "{mins:?}");
}

#[test]
fn entanglement_regions_overlap() {
    let (t, f) = angle_grids(91, 91);
    for &(m0, m1) in &[(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)] {
        let p = relative_pump(&ModelParams::new(0.0, m0, m1), 0.95).unwrap();
        let map = entanglement_map(&p, &t, &f).unwrap();
        assert!(map.duan_area() > 0.0);
        assert!(map.reid_area() > 0.0);
        assert!(map.overlap_area() > 0.0);
    }
}

fn below_threshold() -> impl Strategy<Value = ModelParams> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..0.99f64)
        .prop_map(|(m0, m1, frac)| ModelParams::new(frac * threshold_oracle(m0, m1), m0, m1))
}

fn angles() -> impl Strategy<Value = QuadratureSpec> {
    (0.0..PI, 0.0..2.0 * PI).prop_map(|(t, f)| QuadratureSpec::new(t, f))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_moments_equal_spectral_integrals(p in below_threshold()) {
        let closed = MomentSet::closed(&p).unwrap();
        let (quad, _) = MomentSet::from_spectra(&p, &QuadratureOptions::default(), InversePath::Numeric).unwrap();
        let scale = closed.n_plus.abs().max(1e-12);
        for ((name, a), (_, b)) in closed.entries().iter().zip(quad.entries()) {
            prop_assert!((a - b).norm() <= 1e-6 * a.norm().max(1e-3 * scale), "{}: {} vs {}", name, a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn moment_symmetries(p in below_threshold()) {
        let m = MomentSet::closed(&p).unwrap();
        prop_assert!(m.n_plus >= 0.0);
        prop_assert!((m.n_plus - m.n_minus).abs() <= 1e-12 * m.n_plus.max(1.0));
        prop_assert_eq!(m.anom_minus, -m.anom_plus);
    }

    #[test]
    fn hop_vanishes_without_pump_modulation(m1 in 0.0..1.0f64, frac in 0.0..0.99f64) {
        let p = ModelParams::new(frac * threshold_oracle(0.0, m1), 0.0, m1);
        prop_assert_eq!(MomentSet::closed(&p).unwrap().hop.norm(), 0.0);
    }

    #[test]
    fn same_mode_pairs_vanish_without_crystal(frac in 0.0..0.99f64) {
        let m = MomentSet::closed(&ModelParams::new(frac, 0.0, 0.0)).unwrap();
        prop_assert_eq!(m.anom_plus.norm(), 0.0);
        prop_assert_eq!(m.anom_minus.norm(), 0.0);
        prop_assert_eq!(m.hop.norm(), 0.0);
    }

    #[test]
    fn covariance_is_physical(p in below_threshold()) {
        let m = MomentSet::closed(&p).unwrap();
        prop_assert!(physicality_margin(&m) >= -1e-10 * (1.0 + m.n_plus));
        prop_assert!(physicality_margin(&m.intracavity()) >= -1e-10 * (1.0 + m.n_plus));
        prop_assert!(covariance_min_eigenvalue(&m) >= -1e-10);
    }

    #[test]
    fn variance_nonnegative(p in below_threshold(), s in angles()) {
        prop_assert!(quadrature_variance(&p, s).unwrap() >= 0.0);
    }

    #[test]
    fn vacuum_variance_two(m0 in 0.0..1.0f64, m1 in 0.0..1.0f64, s in angles()) {
        prop_assert_eq!(quadrature_variance(&ModelParams::new(0.0, m0, m1), s).unwrap(), 2.0);
    }

    #[test]
    fn conjugate_uncertainty(p in below_threshold(), s in angles()) {
        let m = MomentSet::closed(&p).unwrap();
        let conj = QuadratureSpec::new(s.theta + PI / 2.0, s.phi);
        let prod = sigma_variance(&m, s) * sigma_variance(&m, conj);
        prop_assert!(prod >= 4.0 * (1.0 - 1e-9), "{}", prod);
    }

    #[test]
    fn min_variance_uncertainty(p in below_threshold()) {
        let m = MomentSet::closed(&p).unwrap();
        let r = min_variance_of(&m, &AngleSearch { n_theta: 37, n_phi: 37, ..Default::default() }).unwrap();
        let conj = QuadratureSpec::new(r.theta_star + PI / 2.0, r.phi_star);
        prop_assert!(r.value * sigma_variance(&m, conj) >= 4.0 * (1.0 - 1e-9));
    }

    #[test]
    fn duan_unit_weight_is_sum_of_variances(p in below_threshold(), s in angles()) {
        let d = duan_criterion(&p, s, 1.0).unwrap();
        let want = quadrature_variance(&p, s).unwrap() + quadrature_variance(&p, s.partner()).unwrap();
        prop_assert!((d.duan_sum - want).abs() <= 1e-12 * want);
        prop_assert_eq!(d.entangled_duan, d.duan_sum < d.duan_bound);
    }

    #[test]
    fn duan_periodic_in_phi(p in below_threshold(), s in angles(), w in 0.2..3.0f64) {
        let a = duan_criterion(&p, s, w).unwrap().duan_sum;
        let b = duan_criterion(&p, QuadratureSpec::new(s.theta, s.phi + 2.0 * PI), w).unwrap().duan_sum;
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn reid_lambda_locally_optimal(p in below_threshold(), s in angles()) {
        let m = MomentSet::closed(&p).unwrap();
        let r = reid_of(&m, s).unwrap();
        let q = QuadraturePair::new(&m, s);
        let cond = |l: f64| q.variance(1.0, l);
        let best = cond(r.reid_lambda);
        prop_assert!(cond(r.reid_lambda + 1e-3) >= best);
        prop_assert!(cond(r.reid_lambda - 1e-3) >= best);
        prop_assert_eq!(r.entangled_reid, r.reid_product < 1.0);
    }

    #[test]
    fn threshold_matches_quadratic_root(m0 in 0.0..1.0f64, m1 in 0.0..1.0f64) {
        let t = threshold(&ModelParams::new(0.0, m0, m1)).unwrap();
        prop_assert!((t - threshold_oracle(m0, m1)).abs() < 1e-8);
        prop_assert!(sigma_den(&ModelParams::new(t, m0, m1)).unwrap().abs() < 1e-6);
    }
}
