//! Dense complex matrices in row-major order.
//!
//! `ComplexMatrix` is a plain square matrix; `HermitianMatrix` wraps it and
//! keeps the Hermiticity invariant through its constructors and setters.

use num_complex::Complex64 as C64;

use super::NumericsError;

/// Hermiticity acceptance threshold, relative to the matrix scale.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Square complex matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_data(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim, "data length must be dim^2");
        Self { dim, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn conjugate(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let rrow = &rhs.data[k * n..(k + 1) * n];
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, r) in orow.iter_mut().zip(rrow) {
                    *o += a * r;
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// max |U U† − 1| entry; zero for a unitary matrix.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.mul(&self.adjoint());
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                worst = worst.max((prod.data[i * n + j] - expect).norm());
            }
        }
        worst
    }
}

/// Complex Hermitian matrix: `entries[i][j] == conj(entries[j][i])`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: ComplexMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(dim),
        }
    }

    /// Validates Hermiticity of raw row-major entries within
    /// `HERMITICITY_TOL` relative to the matrix scale.
    pub fn from_entries(dim: usize, data: Vec<C64>) -> Result<Self, NumericsError> {
        if dim == 0 {
            return Err(NumericsError::EmptyMatrix);
        }
        let m = ComplexMatrix::from_data(dim, data);
        let defect = hermiticity_defect(&m);
        let scale = m.max_abs().max(1.0);
        if defect > HERMITICITY_TOL * scale {
            return Err(NumericsError::NotHermitian {
                defect,
                tol: HERMITICITY_TOL * scale,
            });
        }
        Ok(Self { inner: m })
    }

    /// Symmetrizes the off-diagonal pair; the diagonal keeps only its real part.
    pub fn set_pair(&mut self, i: usize, j: usize, v: C64) {
        if i == j {
            self.inner.set(i, i, C64::new(v.re, 0.0));
        } else {
            self.inner.set(i, j, v);
            self.inner.set(j, i, v.conj());
        }
    }

    pub fn add_pair(&mut self, i: usize, j: usize, v: C64) {
        let cur = self.inner.get(i, j);
        self.set_pair(i, j, cur + v);
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner.get(i, j)
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_complex(self) -> ComplexMatrix {
        self.inner
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.inner)
    }

    /// A + c·B, keeping the real diagonal convention when `c` is real.
    pub fn axpy(&mut self, c: f64, rhs: &HermitianMatrix) {
        assert_eq!(self.dim(), rhs.dim());
        for (a, b) in self.inner.data_mut().iter_mut().zip(rhs.inner.data()) {
            *a += c * b;
        }
    }
}

pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        worst = worst.max(m.get(i, i).im.abs());
        for j in (i + 1)..n {
            worst = worst.max((m.get(i, j) - m.get(j, i).conj()).norm());
        }
    }
    worst
}
