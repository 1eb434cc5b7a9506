//! Entanglement criteria for Bell-diagonal states.
//!
//! Each criterion comes in two forms: a fast one working on the `d x d`
//! coefficient or Bloch matrix, and a dense oracle that builds the full
//! `d^2 x d^2` density matrix. The fast forms are what [`classify`] and the
//! Monte-Carlo estimator use; the oracles exist to cross-check them.
//!
//! All thresholds are strict, with a small guard band, so boundary states
//! (subgroup states, for instance) report "not detected".

mod ppt;
mod realignment;
mod witness;

pub use ppt::{
    partial_transpose_sectors, ppt_blocks, ppt_det_qutrit, ppt_oracle, ppt_sector_min_eigenvalue,
    DetCriterion, PptOracle, PPT_EIGEN_TOL,
};
pub use realignment::{
    realigned_spectrum, realignment_fast, realignment_oracle, realignment_qutrit_subgroup_form,
    Detection,
};
pub use witness::{
    choi_map_apply, choi_map_partial_trace, witness_kappa, witness_operator, witness_value,
    WitnessMatrix,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weyl::{omega_powers, CoefficientMatrix};

/// Guard band for the strict inequalities of the fast criteria.
pub const DETECTION_GUARD: f64 = 1e-12;

/// Tolerance on `B[0][0] = 1`, on `|B| <= 1` and on imaginary parts when
/// inverting the Fourier transform.
pub const BLOCH_TOL: f64 = 1e-10;

/// The Bloch matrix `B[j][i] = sum_{k,l} c[k][l] w^(il - jk)`, i.e. `d F C F^dagger`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochMatrix {
    d: usize,
    entries: Vec<Complex64>,
}

impl BlochMatrix {
    /// Wraps row-major entries `B[j][i]`. Only shape and finiteness are checked;
    /// use [`coefficients_from_bloch`] to validate that `B` describes a state.
    pub fn from_entries(d: usize, entries: Vec<Complex64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        if entries.len() != d * d {
            return Err(Error::ShapeMismatch {
                rows: d,
                cols: d,
                found: entries.len(),
            });
        }
        if let Some(pos) = entries
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: pos / d,
                col: pos % d,
            });
        }
        Ok(Self { d, entries })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Entry `B[j][i]`.
    pub fn get(&self, j: usize, i: usize) -> Complex64 {
        self.entries[j * self.d + i]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Entry-wise 1-norm `sum |B[j][i]|`.
    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).sum()
    }
}

/// Computes `B` as a two-stage discrete Fourier transform of `c`, `O(d^3)`.
pub fn bloch_from_coefficients(c: &CoefficientMatrix) -> BlochMatrix {
    let d = c.d();
    let w = omega_powers(d);
    // partial[k][i] = sum_l c[k][l] w^(il)
    let mut partial = vec![Complex64::new(0.0, 0.0); d * d];
    for k in 0..d {
        for i in 0..d {
            partial[k * d + i] = (0..d).map(|l| w[(i * l) % d] * c.get(k, l)).sum();
        }
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
    for j in 0..d {
        for i in 0..d {
            entries[j * d + i] = (0..d)
                .map(|k| w[(d - (j * k) % d) % d] * partial[k * d + i])
                .sum();
        }
    }
    BlochMatrix { d, entries }
}

/// Inverts the transform: `C = F^dagger B F / d`.
pub fn coefficients_from_bloch(b: &BlochMatrix) -> Result<CoefficientMatrix> {
    let d = b.d;
    let origin = b.get(0, 0);
    if (origin - Complex64::new(1.0, 0.0)).norm() > BLOCH_TOL {
        return Err(Error::InvalidBloch(format!(
            "B[0][0] = {origin}, expected 1"
        )));
    }
    if let Some(z) = b.entries.iter().find(|z| z.norm() > 1.0 + BLOCH_TOL) {
        return Err(Error::InvalidBloch(format!(
            "entry modulus {} exceeds 1",
            z.norm()
        )));
    }
    let w = omega_powers(d);
    let norm = 1.0 / (d * d) as f64;
    let mut values = Vec::with_capacity(d * d);
    for k in 0..d {
        for l in 0..d {
            let z: Complex64 = (0..d)
                .flat_map(|j| (0..d).map(move |i| (j, i)))
                .map(|(j, i)| w[(j * k) % d] * b.get(j, i) * w[(d - (i * l) % d) % d])
                .sum::<Complex64>()
                * norm;
            if z.im.abs() > BLOCH_TOL {
                return Err(Error::InvalidBloch(format!(
                    "c[{k}][{l}] has imaginary part {}",
                    z.im
                )));
            }
            values.push(z.re);
        }
    }
    CoefficientMatrix::new(d, values).map_err(|e| Error::InvalidBloch(e.to_string()))
}

/// Verdict of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "NPT-entangled")]
    NptEntangled,
    #[serde(rename = "PPT-entangled (detected)")]
    PptEntangledDetected,
    #[serde(rename = "undetected")]
    Undetected,
    /// Only for `d = 2`, where PPT is equivalent to separability.
    #[serde(rename = "separable")]
    Separable,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::NptEntangled => "NPT-entangled",
            Label::PptEntangledDetected => "PPT-entangled (detected)",
            Label::Undetected => "undetected",
            Label::Separable => "separable",
        }
    }
}

/// Per-state verdicts, with the raw values behind every flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub d: usize,
    /// `||B||_1`.
    pub realignment_value: f64,
    /// `||B||_1 / d`, the trace norm of the realigned matrix.
    pub realignment_normalized: f64,
    pub realignment_detected: bool,
    /// `d = 3` only: `rhs - lhs` of the determinant criterion; positive means NPT.
    pub ppt_value: Option<f64>,
    /// `d != 3`: smallest eigenvalue of the partial transpose.
    pub ppt_min_eigenvalue: Option<f64>,
    pub is_ppt: bool,
    pub label: Label,
}

/// Runs the fast realignment test and the fast PPT test and assigns a label.
///
/// For `d = 3` the PPT test is the cubic determinant criterion. Otherwise the
/// partial transpose is diagonalized sector by sector (`d` blocks of size `d`).
/// Separability is only claimed for `d = 2`.
pub fn classify(c: &CoefficientMatrix) -> ClassificationRecord {
    let d = c.d();
    let realignment = realignment_fast(c);
    let (ppt_value, ppt_min_eigenvalue, is_ppt) = if d == 3 {
        let det = ppt_det_qutrit(c).expect("d = 3");
        (Some(det.rhs - det.lhs), None, !det.is_npt)
    } else {
        let min = ppt_sector_min_eigenvalue(c);
        (None, Some(min), min >= -PPT_EIGEN_TOL)
    };
    let label = match (is_ppt, realignment.detected) {
        (false, _) => Label::NptEntangled,
        (true, true) => Label::PptEntangledDetected,
        (true, false) if d == 2 => Label::Separable,
        (true, false) => Label::Undetected,
    };
    ClassificationRecord {
        d,
        realignment_value: realignment.value,
        realignment_normalized: realignment.value / d as f64,
        realignment_detected: realignment.detected,
        ppt_value,
        ppt_min_eigenvalue,
        is_ppt,
        label,
    }
}

/// Dense-oracle values for the same state, plus whether they agree with [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub oracle_trace_norm: f64,
    pub oracle_min_eigenvalue: f64,
    pub oracle_is_npt: bool,
    pub agreement: bool,
}

/// Runs both dense oracles and compares with the fast record.
pub fn oracle_check(c: &CoefficientMatrix, record: &ClassificationRecord) -> OracleCheck {
    let trace_norm = realignment_oracle(c);
    let ppt = ppt_oracle(c);
    let realignment_agrees = (trace_norm - record.realignment_normalized).abs() < 1e-9
        && (trace_norm > 1.0 + DETECTION_GUARD) == record.realignment_detected;
    OracleCheck {
        oracle_trace_norm: trace_norm,
        oracle_min_eigenvalue: ppt.min_eigenvalue,
        oracle_is_npt: ppt.is_npt,
        agreement: realignment_agrees && ppt.is_npt == !record.is_ppt,
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::weyl::CoefficientMatrix;

    /// Deterministic flat-simplex draws for unit tests (xorshift + exponentials).
    pub fn random_coefficients(d: usize, salt: u64) -> CoefficientMatrix {
        let mut x = salt.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03;
        x |= 1;
        let raw: Vec<f64> = (0..d * d)
            .map(|_| {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                -(((x >> 11) as f64 + 0.5) / (1u64 << 53) as f64).ln()
            })
            .collect();
        let s: f64 = raw.iter().sum();
        CoefficientMatrix::new(d, raw.iter().map(|v| v / s).collect()).unwrap()
    }

    pub fn qutrit(rows: [[f64; 3]; 3]) -> CoefficientMatrix {
        CoefficientMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }
}
