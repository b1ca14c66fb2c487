//! Adaptive 15-point Gauss-Kronrod quadrature for vector-valued integrands.

use std::collections::BinaryHeap;

use crate::error::{CorrelationError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Integral<const N: usize> {
    pub value: [f64; N],
    pub error: f64,
    pub intervals: usize,
}

struct Piece<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Piece<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const N: usize> Eq for Piece<N> {}
impl<const N: usize> PartialOrd for Piece<N> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Piece<N> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<const N: usize, F: FnMut(f64) -> Result<[f64; N]>>(f: &mut F, a: f64, b: f64) -> Result<Piece<N>> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = [0.0; N];
    let mut g = [0.0; N];
    let fc = f(c)?;
    for n in 0..N {
        k[n] = WGK[7] * fc[n];
        g[n] = WG[3] * fc[n];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx)?;
        let f2 = f(c + dx)?;
        for n in 0..N {
            let s = f1[n] + f2[n];
            k[n] += WGK[j] * s;
            if j % 2 == 1 {
                g[n] += WG[j / 2] * s;
            }
        }
    }
    let mut value = [0.0; N];
    let mut error: f64 = 0.0;
    for n in 0..N {
        value[n] = k[n] * h;
        error = error.max(((k[n] - g[n]) * h).abs());
    }
    Ok(Piece { a, b, value, error })
}

/// Integrates every component of `f` over `[a, b]` on a shared subdivision.
///
/// Convergence requires the summed error estimate to fall below
/// `max(abs_tol, rel_tol * max_n |I_n|)`.
pub fn integrate<const N: usize, F>(mut f: F, a: f64, b: f64, opts: &QuadratureOptions) -> Result<Integral<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let mut heap = BinaryHeap::new();
    heap.push(kronrod(&mut f, a, b)?);
    loop {
        let mut total = [0.0; N];
        let mut err = 0.0;
        for p in heap.iter() {
            for n in 0..N {
                total[n] += p.value[n];
            }
            err += p.error;
        }
        let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if err <= opts.abs_tol.max(opts.rel_tol * scale) {
            // deterministic summation order
            let mut pieces: Vec<_> = heap.into_vec();
            pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
            let mut value = [0.0; N];
            for p in &pieces {
                for n in 0..N {
                    value[n] += p.value[n];
                }
            }
            return Ok(Integral {
                value,
                error: err,
                intervals: pieces.len(),
            });
        }
        if heap.len() >= opts.max_intervals {
            return Err(CorrelationError::Quadrature {
                estimate: err,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("nonempty heap");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(kronrod(&mut f, worst.a, mid)?);
        heap.push(kronrod(&mut f, mid, worst.b)?);
    }
}

/// Integral over the whole real line through `x = tan(u)`.
pub fn integrate_real_line<const N: usize, F>(mut f: F, opts: &QuadratureOptions) -> Result<Integral<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let half_pi = std::f64::consts::FRAC_PI_2;
    integrate(
        |u| {
            let x = u.tan();
            let jac = 1.0 + x * x;
            let mut v = f(x)?;
            for c in v.iter_mut() {
                *c *= jac;
            }
            Ok(v)
        },
        -half_pi,
        half_pi,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| Ok([x.powi(4), 1.0]), 0.0, 2.0, &QuadratureOptions::default()).unwrap();
        assert!((r.value[0] - 32.0 / 5.0).abs() < 1e-13);
        assert!((r.value[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn lorentzian_on_real_line() {
        let r = integrate_real_line(
            |x| Ok([1.0 / (1.0 + x * x), 1.0 / (1.0 + (x - 3.0).powi(2) * 1e4)]),
            &QuadratureOptions::default(),
        )
        .unwrap();
        assert!((r.value[0] - std::f64::consts::PI).abs() < 1e-12);
        assert!((r.value[1] - std::f64::consts::PI / 100.0).abs() < 1e-11);
    }

    #[test]
    fn nonconvergence_reported() {
        let opts = QuadratureOptions {
            max_intervals: 3,
            rel_tol: 1e-15,
            abs_tol: 0.0,
        };
        let r = integrate(|x: f64| Ok([x.abs().sqrt()]), -1.0, 1.0, &opts);
        assert!(matches!(r, Err(CorrelationError::Quadrature { .. })));
    }
}
