use std::f64::consts::PI;

/// Periodic transverse grid; wavenumbers are stored in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub length: f64,
    pub dx: f64,
    pub dk: f64,
    pub x: Vec<f64>,
    pub k: Vec<f64>,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Self {
        let dx = length / n as f64;
        let dk = 2.0 * PI / length;
        let k = (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
                m as f64 * dk
            })
            .collect();
        Self {
            n,
            length,
            dx,
            dk,
            x: (0..n).map(|j| j as f64 * dx).collect(),
            k,
        }
    }

    /// FFT index of the grid wavenumber nearest to `k`.
    pub fn index_of(&self, k: f64) -> usize {
        let m = (k / self.dk).round() as i64;
        m.rem_euclid(self.n as i64) as usize
    }

    /// Permutation listing FFT indices in ascending wavenumber order.
    pub fn ascending(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n).collect();
        idx.sort_by(|&a, &b| self.k[a].total_cmp(&self.k[b]));
        idx
    }

    /// Factor turning a raw FFT coefficient into a mode amplitude,
    /// `a_k = (dx / sqrt(L)) sum_x alpha(x) e^{-i k x}`.
    pub fn mode_scale(&self) -> f64 {
        self.dx / self.length.sqrt()
    }
}
