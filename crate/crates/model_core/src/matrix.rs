use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{ModelError, Result};

pub type C64 = Complex64;

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self {
            dim: N,
            entries: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn conj_transpose(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    /// Square matrix restricted to the given row/column indices.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = self[(i, j)];
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `self - I`.
    pub fn identity_defect(&self) -> f64 {
        self.max_abs_diff(&Self::identity(self.dim))
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.entries.iter().position(|v| !v.is_finite()) {
            Some(p) => Err(ModelError::NonFinite {
                row: p / self.dim,
                col: p % self.dim,
            }),
            None => Ok(()),
        }
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(ModelError::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let dim = m.nrows();
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] = m[(i, j)];
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.dim && j < self.dim);
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.dim && j < self.dim);
        &mut self.entries[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|v| format!("{:+.6e}{:+.6e}i", v.re, v.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct InversionOptions {
    /// Upper bound on the 1-norm condition estimate.
    pub max_condition: f64,
}

impl Default for InversionOptions {
    fn default() -> Self {
        Self {
            max_condition: 1e12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NumericInverse {
    pub inverse: ComplexMatrix,
    /// `max |m * m^-1 - I|`.
    pub residual: f64,
    pub condition_estimate: f64,
}

/// Inverse by partially pivoted LU.
pub fn invert_numeric(m: &ComplexMatrix) -> Result<NumericInverse> {
    invert_numeric_with(m, InversionOptions::default())
}

pub fn invert_numeric_with(m: &ComplexMatrix, opts: InversionOptions) -> Result<NumericInverse> {
    m.check_finite()?;
    let inv = m
        .to_nalgebra()
        .lu()
        .try_inverse()
        .ok_or(ModelError::Singular)?;
    let inverse = ComplexMatrix::from_nalgebra(&inv)?;
    inverse.check_finite().map_err(|_| ModelError::Singular)?;
    let condition_estimate = m.norm_one() * inverse.norm_one();
    if !(condition_estimate <= opts.max_condition) {
        return Err(ModelError::IllConditioned {
            estimate: condition_estimate,
            bound: opts.max_condition,
        });
    }
    let residual = (m * &inverse).identity_defect();
    Ok(NumericInverse {
        inverse,
        residual,
        condition_estimate,
    })
}
