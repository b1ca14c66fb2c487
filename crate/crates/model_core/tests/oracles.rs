use num_complex::Complex64 as C64;
use pcopo_model::*;
use proptest::prelude::*;

/// Gaussian elimination with partial pivoting, kept separate from the library path.
fn solve_dense(mut a: Vec<Vec<C64>>, mut b: Vec<C64>) -> Vec<C64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Three-harmonic pump balance `(1 + i delta0 + i k^2) A(k) + (M0/2)(A(k-kp) - A(k+kp)) = E delta_k0`.
fn truncated_pump_oracle(p: &ModelParams) -> [C64; 3] {
    let kp = p.kp().unwrap();
    let h = C64::new(p.m0 / 2.0, 0.0);
    let z = C64::new(0.0, 0.0);
    let diag = |k: f64| C64::new(1.0, p.delta0 + k * k);
    // unknowns (A(0), A(kp), A(-kp))
    let a = vec![
        vec![diag(0.0), -h, h],
        vec![h, diag(kp), z],
        vec![-h, z, diag(kp)],
    ];
    let x = solve_dense(a, vec![C64::new(p.e, 0.0), z, z]);
    [x[0], x[1], x[2]]
}

/// Threshold from the smallest root of the quadratic `sigma_den(E^2) = 0`.
fn threshold_oracle(m0: f64, m1: f64) -> f64 {
    let p = ModelParams::new(1.0, m0, m1);
    let c = coupling_constants(&p).unwrap();
    let s2 = c.s.norm_sqr();
    let c5 = 4.0 + m1 * m1;
    let qa = 16.0 * s2 * s2 * (C64::new(1.0, 0.0) + c.kappa * c.kappa).norm_sqr();
    let qb = -8.0 * s2 * (1.0 + c.kappa.norm_sqr()) * c5;
    let qc = c5 * c5;
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    let x = if qa.abs() < 1e-300 {
        -qc / qb
    } else {
        (-qb - disc.sqrt()) / (2.0 * qa)
    };
    x.sqrt()
}

#[test]
fn pump_matches_dense_solve() {
    for &(e, m0, d0) in &[(0.92, 0.5, 0.0), (0.3, 1.0, 0.0), (0.7, 0.2, 0.4), (1.5, 0.9, -0.3)] {
        let p = ModelParams::new(e, m0, 0.0).with_delta0(d0);
        let got = pump_steady_state(&p).unwrap();
        let want = truncated_pump_oracle(&p);
        assert!((got.a0_0 - want[0]).norm() < 1e-14);
        assert!((got.a0_plus - want[1]).norm() < 1e-14);
        assert!((got.a0_minus - want[2]).norm() < 1e-14);
    }
}

#[test]
fn pump_reference_point() {
    let want = truncated_pump_oracle(&ModelParams::new(0.92, 0.5, 0.0));
    let got = pump_steady_state(&ModelParams::new(0.92, 0.5, 0.0)).unwrap();
    assert!((want[0] - C64::new(0.89543, 0.04368)).norm() < 1e-5);
    assert!((got.a0_0 - want[0]).norm() < 1e-14);
}

#[test]
fn coupling_cross_oracle() {
    let p = ModelParams::new(0.92, 0.5, 0.0);
    let c = coupling_constants(&p).unwrap();
    let pump = truncated_pump_oracle(&p);
    assert!((c.s * c.kappa - pump[1]).norm() < 1e-14);
    // direct evaluation of S = E(1 - 2 i delta1)/(1 - 2 i delta1 + M0^2/2), kappa = (-M0/2)/(1 - 2 i delta1)
    let g = C64::new(1.0, 2.0);
    assert!((c.s - 0.92 * g / (g + 0.125)).norm() < 1e-15);
    assert!((c.kappa - (-0.25) / g).norm() < 1e-15);
}

#[test]
fn six_mode_kappa_bar_equals_kappa_on_resonance() {
    for &d1 in &[-1.0, -0.5, -2.0] {
        let p = ModelParams::new(0.6, 0.8, 0.3).with_delta1(d1);
        let c = coupling_constants(&p).unwrap();
        let kc = p.kc().unwrap();
        let l6 = build_L6(&p, kc, 0.0).unwrap();
        // entry (0, 4) carries kappa_bar * S
        assert!((l6[(0, 4)] - c.kappa * c.s).norm() < 1e-14);
    }
}

#[test]
fn six_mode_sub_block_reproduces_four_mode() {
    for &d1 in &[-1.0, -0.3, -3.0] {
        let p = ModelParams::new(0.5, 0.45, 0.9).with_delta1(d1);
        let kc = p.kc().unwrap();
        for &w in &[-3.0, 0.0, 0.8] {
            let l6 = build_L6(&p, kc, w).unwrap();
            let l = build_L(&p, w).unwrap();
            assert!(l6.submatrix(&model::L6_TO_L_INDICES).max_abs_diff(&l) < 1e-14);
        }
    }
}

#[test]
fn empty_cavity_transfer_is_unitary() {
    for &w in &[0.0, 1.0, -2.5] {
        let t = transfer_matrix(&ModelParams::new(0.0, 0.0, 0.0), w).unwrap();
        let phase = C64::new(2.0, 0.0) / C64::new(1.0, -w) - 1.0;
        assert!(t.max_abs_diff(&ComplexMatrix::identity(4).scale(phase)) < 1e-15);
        assert!((phase.norm() - 1.0).abs() < 1e-15);
        assert!((&t.conj_transpose() * &t).identity_defect() < 1e-14);
    }
}

#[test]
fn closed_and_numeric_transfer_agree() {
    let p = ModelParams::new(0.8, 0.4, 0.6);
    for &w in &[-1.0, 0.0, 0.3, 4.0] {
        let a = transfer_matrix_via(&p, w, InversePath::Numeric).unwrap();
        let b = transfer_matrix_via(&p, w, InversePath::Closed).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }
}

#[test]
fn closed_inverse_respects_floor() {
    let p = ModelParams::new(0.999_999, 0.0, 0.0);
    assert!(invert_L_closed(&p, 0.0).is_ok());
    assert!(invert_L_closed_with(&p, 0.0, 1e-3).is_err());
}

fn below_threshold_params() -> impl Strategy<Value = (ModelParams, f64)> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..0.99f64, -5.0..5.0f64).prop_map(|(m0, m1, frac, w)| {
        let e = frac * threshold_oracle(m0, m1);
        (ModelParams::new(e, m0, m1), w)
    })
}

/// Index reflection pairing each operator with its adjoint.
const ADJOINT: [usize; 4] = [3, 2, 1, 0];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn closed_inverse_is_inverse((p, w) in below_threshold_params()) {
        let l = build_L(&p, w).unwrap();
        let inv = invert_L_closed(&p, w).unwrap();
        prop_assert!((&l * &inv).identity_defect() < 1e-10);
        let lu = invert_numeric(&l).unwrap();
        prop_assert!(lu.inverse.max_abs_diff(&inv) < 1e-10);
    }
}

proptest! {
    #[test]
    fn pump_antisymmetry_exact(e in 0.0..3.0f64, m0 in 0.0..2.0f64, d0 in -1.0..1.0f64, d1 in -3.0..-0.1f64) {
        let p = ModelParams::new(e, m0, 0.0).with_delta0(d0).with_delta1(d1);
        let s = pump_steady_state(&p).unwrap();
        prop_assert_eq!(s.a0_plus, -s.a0_minus);
        prop_assert_eq!((s.a0_plus + s.a0_minus).norm(), 0.0);
    }

    #[test]
    fn homogeneous_limit_is_linear(e in 0.1..0.9f64, m1 in 0.0..1.0f64, w in -3.0..3.0f64) {
        let base = build_L(&ModelParams::new(e, 0.0, m1), w).unwrap();
        let d1 = build_L(&ModelParams::new(e, 1e-4, m1), w).unwrap().max_abs_diff(&base);
        let d2 = build_L(&ModelParams::new(e, 2e-4, m1), w).unwrap().max_abs_diff(&base);
        prop_assert!(d1 > 0.0 || e == 0.0);
        prop_assert!((d2 / d1 - 2.0).abs() < 1e-3);
    }

    #[test]
    fn transfer_bogoliubov_symmetry((p, w) in below_threshold_params()) {
        let t = transfer_matrix(&p, w).unwrap();
        let tm = transfer_matrix(&p, -w).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let mirror = tm[(ADJOINT[i], ADJOINT[j])].conj();
                prop_assert!((t[(i, j)] - mirror).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn empty_cavity_singular_values_one(w in -5.0..5.0f64) {
        let t = transfer_matrix(&ModelParams::new(0.0, 0.0, 0.0), w).unwrap();
        prop_assert!((&t.conj_transpose() * &t).identity_defect() < 1e-13);
    }
}
