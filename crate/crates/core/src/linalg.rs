//! Dense complex matrices and the handful of decompositions the oracles need.
//!
//! Storage and the eigen/singular-value routines are delegated to `nalgebra`;
//! this module pins down the contract (finiteness on construction, Hermiticity
//! tolerance, sort order of spectra) that the rest of the crate relies on.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum entry-wise deviation `|m - m^dagger|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                found: entries.len(),
            });
        }
        if let Some(pos) = entries
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    /// Builds a matrix entry by entry. Callers are trusted to produce finite values.
    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.diagonal().iter().sum()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest entry-wise modulus of `self - other`. Panics on a shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            self.0.shape(),
            other.0.shape(),
            "shape mismatch in max_abs_diff"
        );
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry-wise deviation from Hermiticity.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn determinant(&self) -> Result<Complex64> {
        self.require_square()?;
        Ok(self.0.clone().determinant())
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NonSquare {
                rows: self.rows(),
                cols: self.cols(),
            })
        }
    }
}

impl From<DMatrix<Complex64>> for ComplexMatrix {
    fn from(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// The input is symmetrized as `(m + m^dagger) / 2` before decomposition.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    m.require_square()?;
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = (&m.0 + &m.0.adjoint()) * Complex64::new(0.5, 0.0);
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Singular values in descending order; `min(rows, cols)` of them.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = m.0.clone().singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Eigenvalues of a general square matrix, read off the diagonal of its complex
/// Schur form. Sorted by real part, then imaginary part.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    m.require_square()?;
    let (_, t) = Schur::new(m.0.clone()).unpack();
    let mut values: Vec<Complex64> = t.diagonal().iter().copied().collect();
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(values)
}

/// The unitary DFT matrix `F[i][j] = w^(-ij) / sqrt(d)` with `w = exp(2 pi i / d)`.
pub fn dft_matrix(d: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let norm = 1.0 / (d as f64).sqrt();
    Ok(ComplexMatrix::from_fn(d, d, |i, j| {
        // Reduce the exponent first so the phase is taken from the principal table.
        let m = (d - (i * j) % d) % d;
        Complex64::from_polar(norm, 2.0 * PI * m as f64 / d as f64)
    }))
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Partial trace over the second factor of a `(da*db) x (da*db)` matrix.
pub fn partial_trace_second(m: &ComplexMatrix, da: usize, db: usize) -> Result<ComplexMatrix> {
    if m.rows() != da * db || m.cols() != da * db {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            found: m.rows(),
        });
    }
    Ok(ComplexMatrix::from_fn(da, da, |i, j| {
        (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
    }))
}
