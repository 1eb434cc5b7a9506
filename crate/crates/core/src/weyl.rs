//! Weyl-Heisenberg operators, the Bell basis they generate, and the dense maps
//! (partial transpose, realignment, flip) that the oracle paths act with.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Entries in `[-CLAMP_TOL, 0)` are treated as round-off and clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;
/// Allowed deviation of the coefficient sum from one.
pub const SUM_TOL: f64 = 1e-10;

/// A point `(k, l)` of the phase space `Z_d x Z_d`. `k` indexes the phase,
/// `l` the shift. Components are always reduced to `[0, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhaseIndex {
    pub k: usize,
    pub l: usize,
}

impl PhaseIndex {
    pub const ORIGIN: PhaseIndex = PhaseIndex { k: 0, l: 0 };

    /// Reduces arbitrary integers mod `d`.
    pub fn wrap(k: i64, l: i64, d: usize) -> Self {
        let d = d as i64;
        Self {
            k: k.rem_euclid(d) as usize,
            l: l.rem_euclid(d) as usize,
        }
    }

    pub fn add(self, other: Self, d: usize) -> Self {
        Self {
            k: (self.k + other.k) % d,
            l: (self.l + other.l) % d,
        }
    }

    pub fn sub(self, other: Self, d: usize) -> Self {
        Self {
            k: (self.k + d - other.k) % d,
            l: (self.l + d - other.l) % d,
        }
    }

    pub fn scale(self, n: usize, d: usize) -> Self {
        Self {
            k: (self.k * n) % d,
            l: (self.l * n) % d,
        }
    }

    /// Row-major position in a `d x d` grid.
    pub fn flat(self, d: usize) -> usize {
        self.k * d + self.l
    }

    pub fn from_flat(i: usize, d: usize) -> Self {
        Self { k: i / d, l: i % d }
    }

    /// All `d^2` points in row-major order.
    pub fn all(d: usize) -> impl Iterator<Item = PhaseIndex> {
        (0..d * d).map(move |i| Self::from_flat(i, d))
    }
}

impl From<(usize, usize)> for PhaseIndex {
    fn from((k, l): (usize, usize)) -> Self {
        Self { k, l }
    }
}

/// The probability weights `c[k][l]` of a Bell-diagonal state
/// `rho = sum c[k][l] P[k][l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    d: usize,
    values: Vec<f64>,
}

impl CoefficientMatrix {
    /// Validates and normalizes row-major coefficients.
    ///
    /// Entries slightly below zero (within [`CLAMP_TOL`]) are clamped and the
    /// matrix renormalized; anything more negative is rejected, as is a sum
    /// off by more than [`SUM_TOL`].
    pub fn new(d: usize, mut values: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        if values.len() != d * d {
            return Err(Error::ShapeMismatch {
                rows: d,
                cols: d,
                found: values.len(),
            });
        }
        let mut clamped = false;
        for (i, v) in values.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: i / d,
                    col: i % d,
                });
            }
            if *v < -CLAMP_TOL {
                return Err(Error::NegativeCoefficient {
                    k: i / d,
                    l: i % d,
                    value: *v,
                });
            }
            if *v < 0.0 {
                *v = 0.0;
                clamped = true;
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::NotNormalized { sum });
        }
        if clamped {
            values.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(Self { d, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::ShapeMismatch {
                rows: d,
                cols: d,
                found: bad.len() * d,
            });
        }
        Self::new(d, rows.concat())
    }

    /// The maximally mixed state, `c = 1/d^2` everywhere.
    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(d, vec![1.0 / (d * d) as f64; d * d])
    }

    /// The single Bell projector `P[idx]`.
    pub fn delta(d: usize, idx: PhaseIndex) -> Result<Self> {
        let mut values = vec![0.0; d * d];
        if idx.k >= d || idx.l >= d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: idx.k.max(idx.l) + 1,
            });
        }
        values[idx.flat(d)] = 1.0;
        Self::new(d, values)
    }

    pub(crate) fn from_raw(d: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), d * d);
        Self { d, values }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.values[k * self.d + l]
    }

    pub fn at(&self, idx: PhaseIndex) -> f64 {
        self.values[idx.flat(self.d)]
    }

    /// Row-major coefficients.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.d).map(<[f64]>::to_vec).collect()
    }

    /// Relabels phase-space points: the weight at `x` moves to `perm[x]`
    /// (flat row-major indices).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.values.len(), "permutation length mismatch");
        let mut values = vec![0.0; self.values.len()];
        for (x, &target) in perm.iter().enumerate() {
            values[target] = self.values[x];
        }
        Self { d: self.d, values }
    }
}

/// `w^m` for `m = 0..d`, with `w = exp(2 pi i / d)`.
pub fn omega_powers(d: usize) -> Vec<Complex64> {
    (0..d)
        .map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / d as f64))
        .collect()
}

fn require_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::DimensionTooSmall(d))
    } else {
        Ok(())
    }
}

/// `W[k][l] = sum_j w^(jk) |j><j+l|`.
pub fn weyl_operator(d: usize, idx: PhaseIndex) -> Result<ComplexMatrix> {
    require_dim(d)?;
    let w = omega_powers(d);
    let (k, l) = (idx.k % d, idx.l % d);
    Ok(ComplexMatrix::from_fn(d, d, |r, c| {
        if c == (r + l) % d {
            w[(r * k) % d]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// `|Omega[k][l]> = (W[k][l] (x) 1) |Omega[0][0]>`, equivalently `vec(W[k][l]) / sqrt(d)`
/// with `vec(|i><j|) = |i>|j>`.
pub fn bell_state(d: usize, idx: PhaseIndex) -> Result<Vec<Complex64>> {
    let w = weyl_operator(d, idx)?;
    let norm = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    Ok(w.to_row_major().into_iter().map(|z| z * norm).collect())
}

pub fn bell_projector(d: usize, idx: PhaseIndex) -> Result<ComplexMatrix> {
    let v = bell_state(d, idx)?;
    Ok(ComplexMatrix::outer(&v, &v))
}

/// Dense `d^2 x d^2` density matrix of a Bell-diagonal state.
///
/// Uses the expansion `rho = (1/d) sum c[k][l] w^(k(i-j)) |i-l><j-l| (x) |i><j|`.
pub fn density_from_coefficients(c: &CoefficientMatrix) -> ComplexMatrix {
    let d = c.d();
    let w = omega_powers(d);
    let n = d * d;
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    let inv_d = 1.0 / d as f64;
    for k in 0..d {
        for l in 0..d {
            let weight = c.get(k, l);
            if weight == 0.0 {
                continue;
            }
            for i in 0..d {
                let row = ((i + d - l) % d) * d + i;
                for j in 0..d {
                    let col = ((j + d - l) % d) * d + j;
                    let phase = w[(k * ((i + d - j) % d)) % d];
                    entries[row * n + col] += phase * (weight * inv_d);
                }
            }
        }
    }
    ComplexMatrix::from_fn(n, n, |r, s| entries[r * n + s])
}

fn require_bipartite(rho: &ComplexMatrix, da: usize, db: usize) -> Result<()> {
    let n = da * db;
    if rho.rows() != n || rho.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rho.rows().max(rho.cols()),
        });
    }
    Ok(())
}

/// Transpose on the second factor: `|i><j| (x) |k><l|  ->  |i><j| (x) |l><k|`.
pub fn partial_transpose(rho: &ComplexMatrix, da: usize, db: usize) -> Result<ComplexMatrix> {
    require_bipartite(rho, da, db)?;
    let n = da * db;
    Ok(ComplexMatrix::from_fn(n, n, |r, s| {
        let (i, k) = (r / db, r % db);
        let (j, l) = (s / db, s % db);
        rho[(i * db + l, j * db + k)]
    }))
}

/// Realignment: `|i><j| (x) |k><l|  ->  |i><k| (x) |j><l|`. The result is
/// `da^2 x db^2`.
pub fn realign(rho: &ComplexMatrix, da: usize, db: usize) -> Result<ComplexMatrix> {
    require_bipartite(rho, da, db)?;
    Ok(ComplexMatrix::from_fn(da * da, db * db, |r, s| {
        let (i, j) = (r / da, r % da);
        let (k, l) = (s / db, s % db);
        rho[(i * db + k, j * db + l)]
    }))
}

/// The swap `sum_{i,j} |i><j| (x) |j><i|`.
pub fn flip_operator(d: usize) -> Result<ComplexMatrix> {
    require_dim(d)?;
    let n = d * d;
    Ok(ComplexMatrix::from_fn(n, n, |r, s| {
        let (i, k) = (r / d, r % d);
        let (j, l) = (s / d, s % d);
        if i == l && k == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}
