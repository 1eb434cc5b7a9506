use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{bloch_from_coefficients, DETECTION_GUARD};
use crate::error::{Error, Result};
use crate::linalg::trace_norm;
use crate::phase_space::all_striations;
use crate::weyl::{density_from_coefficients, realign, CoefficientMatrix};

/// A criterion value together with its thresholded verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub value: f64,
    pub detected: bool,
}

/// `||B||_1`, detected when it exceeds `d`.
pub fn realignment_fast(c: &CoefficientMatrix) -> Detection {
    let value = bloch_from_coefficients(c).l1_norm();
    Detection {
        value,
        detected: value > c.d() as f64 + DETECTION_GUARD,
    }
}

/// Trace norm of the dense realigned density matrix.
pub fn realignment_oracle(c: &CoefficientMatrix) -> f64 {
    let d = c.d();
    let rho = density_from_coefficients(c);
    trace_norm(&realign(&rho, d, d).expect("square d^2 x d^2 density"))
}

/// Eigenvalues `B[j][i] / d` of the realigned matrix, sorted by real then
/// imaginary part.
pub fn realigned_spectrum(c: &CoefficientMatrix) -> Vec<Complex64> {
    let b = bloch_from_coefficients(c);
    let scale = 1.0 / c.d() as f64;
    let mut values: Vec<Complex64> = b.entries().iter().map(|z| z * scale).collect();
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    values
}

/// The qutrit realignment test in coset-mass form:
/// `sum_S sqrt(6 sum_{l in C(S)} mass(l)^2 - 2) > 2`.
pub fn realignment_qutrit_subgroup_form(c: &CoefficientMatrix) -> Result<Detection> {
    if c.d() != 3 {
        return Err(Error::WrongDimension {
            expected: 3,
            found: c.d(),
        });
    }
    let value = all_striations(3)?
        .iter()
        .map(|st| {
            let squares: f64 = st.cosets().iter().map(|ell| ell.mass(c).powi(2)).sum();
            // The radicand is non-negative by Cauchy-Schwarz; clamp round-off.
            (6.0 * squares - 2.0).max(0.0).sqrt()
        })
        .sum();
    Ok(Detection {
        value,
        detected: value > 2.0 + DETECTION_GUARD,
    })
}
