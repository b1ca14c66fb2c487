//! Physicality of a moment set: the matrix `<R_k R_l>` of the quadrature
//! vector `R = (x1, p1, x2, p2)` equals `V + i Omega` and must be positive
//! semidefinite.

use nalgebra::{DMatrix, SymmetricEigen};
use pcopo_model::{ComplexMatrix, C64};

use crate::moments::MomentSet;

/// `<o_i o_j>` for `o = (a1, a1†, a2, a2†)`, `a1 = a(kc)`, `a2 = a(-kc)`.
pub fn operator_moments(m: &MomentSet) -> ComplexMatrix {
    let one = C64::new(1.0, 0.0);
    let n1 = C64::new(m.n_plus, 0.0);
    let n2 = C64::new(m.n_minus, 0.0);
    let (a1, a2, c, h) = (m.anom_plus, m.anom_minus, m.anom_cross, m.hop);
    ComplexMatrix::from_rows([
        [a1, n1 + one, c, h],
        [n1, a1.conj(), h.conj(), c.conj()],
        [c, h.conj(), a2, n2 + one],
        [h, c.conj(), n2, a2.conj()],
    ])
}

/// `<R_k R_l>` with `x = a + a†`, `p = -i (a - a†)`.
pub fn quadrature_moments(m: &MomentSet) -> ComplexMatrix {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let t = ComplexMatrix::from_rows([
        [one, one, zero, zero],
        [-i, i, zero, zero],
        [zero, zero, one, one],
        [zero, zero, -i, i],
    ]);
    let o = operator_moments(m);
    let mut out = ComplexMatrix::zeros(4);
    for k in 0..4 {
        for l in 0..4 {
            let mut acc = zero;
            for a in 0..4 {
                for b in 0..4 {
                    acc += t[(k, a)] * t[(l, b)] * o[(a, b)];
                }
            }
            out[(k, l)] = acc;
        }
    }
    out
}

/// Symmetrized real covariance `V` of `R`; the identity in vacuum.
pub fn covariance_matrix(m: &MomentSet) -> [[f64; 4]; 4] {
    let q = quadrature_moments(m);
    let mut v = [[0.0; 4]; 4];
    for (k, row) in v.iter_mut().enumerate() {
        for (l, x) in row.iter_mut().enumerate() {
            *x = 0.5 * (q[(k, l)] + q[(l, k)]).re;
        }
    }
    v
}

/// Smallest eigenvalue of `V + i Omega`; nonnegative for physical states.
pub fn physicality_margin(m: &MomentSet) -> f64 {
    let q = quadrature_moments(m);
    let h = q.add(&q.conj_transpose()).scale(C64::new(0.5, 0.0));
    let d = DMatrix::from_row_slice(4, 4, h.entries());
    SymmetricEigen::new(d).eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b))
}

/// Smallest eigenvalue of the symmetrized covariance `V`.
pub fn covariance_min_eigenvalue(m: &MomentSet) -> f64 {
    let v = covariance_matrix(m);
    let d = DMatrix::from_fn(4, 4, |i, j| v[i][j]);
    SymmetricEigen::new(d).eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b))
}
