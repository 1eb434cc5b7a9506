use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ppt::qutrit_lines;
use crate::error::{Error, Result};
use crate::linalg::{partial_trace_second, ComplexMatrix};
use crate::weyl::{bell_projector, weyl_operator, CoefficientMatrix, PhaseIndex};

/// Coefficients `kappa[i][j]` of the qutrit witness `W = sum kappa[i][j] P[i][j]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessMatrix {
    pub kappa: [[f64; 3]; 3],
}

impl WitnessMatrix {
    pub fn is_zero(&self, tol: f64) -> bool {
        self.kappa.iter().flatten().all(|k| k.abs() <= tol)
    }

    /// All coefficients non-negative: `W` is then a positive operator and
    /// cannot witness anything.
    pub fn is_positive(&self, tol: f64) -> bool {
        self.kappa.iter().flatten().all(|k| *k >= -tol)
    }
}

/// `kappa[i][j] = -c[i][j]^2 + sum over the four cosets through (i, j) of the
/// product of the two other coefficients on that coset`.
pub fn witness_kappa(c: &CoefficientMatrix) -> Result<WitnessMatrix> {
    if c.d() != 3 {
        return Err(Error::WrongDimension {
            expected: 3,
            found: c.d(),
        });
    }
    let v = c.as_slice();
    let mut kappa = [[0.0; 3]; 3];
    for p in PhaseIndex::all(3) {
        let x = p.flat(3);
        let through: f64 = qutrit_lines()
            .iter()
            .filter(|line| line.contains(&x))
            .map(|line| {
                line.iter()
                    .filter(|&&q| q != x)
                    .map(|&q| v[q])
                    .product::<f64>()
            })
            .sum();
        kappa[p.k][p.l] = -v[x].powi(2) + through;
    }
    Ok(WitnessMatrix { kappa })
}

/// `tr(rho W) = sum kappa[i][j] c[i][j]`.
pub fn witness_value(c: &CoefficientMatrix, w: &WitnessMatrix) -> Result<f64> {
    if c.d() != 3 {
        return Err(Error::WrongDimension {
            expected: 3,
            found: c.d(),
        });
    }
    Ok(PhaseIndex::all(3)
        .map(|p| w.kappa[p.k][p.l] * c.at(p))
        .sum())
}

/// The dense `9 x 9` operator `sum kappa[i][j] P[i][j]`.
pub fn witness_operator(w: &WitnessMatrix) -> ComplexMatrix {
    PhaseIndex::all(3).fold(ComplexMatrix::zeros(9, 9), |acc, p| {
        let proj = bell_projector(3, p).expect("d = 3");
        &acc + &proj.scale(Complex64::new(w.kappa[p.k][p.l], 0.0))
    })
}

fn require_qutrit_operator(sigma: &ComplexMatrix) -> Result<()> {
    if sigma.rows() != 3 || sigma.cols() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: sigma.rows().max(sigma.cols()),
        });
    }
    Ok(())
}

/// The Weyl-covariant map `sigma -> sum kappa[i][j] W[i][j] sigma W[i][j]^dagger`.
pub fn choi_map_apply(w: &WitnessMatrix, sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_qutrit_operator(sigma)?;
    Ok(
        PhaseIndex::all(3).fold(ComplexMatrix::zeros(3, 3), |acc, p| {
            let op = weyl_operator(3, p).expect("d = 3");
            let term = &(&op * sigma) * &op.adjoint();
            &acc + &term.scale(Complex64::new(w.kappa[p.k][p.l], 0.0))
        }),
    )
}

/// The same map through the Choi-Jamiolkowski form `3 tr_B(W (1 (x) sigma^T))`.
pub fn choi_map_partial_trace(w: &WitnessMatrix, sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_qutrit_operator(sigma)?;
    let lifted = crate::linalg::kron(&ComplexMatrix::identity(3), &sigma.transpose());
    let traced = partial_trace_second(&(&witness_operator(w) * &lifted), 3, 3)?;
    Ok(traced.scale(Complex64::new(3.0, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::ppt::ppt_det_qutrit;
    use crate::detection::test_support::random_coefficients;
    use crate::phase_space::{all_cosets, subgroup_state};

    /// The nine closed-form coefficients, written out term by term.
    fn closed_form(c: &CoefficientMatrix) -> [[f64; 3]; 3] {
        let g = |k, l| c.get(k, l);
        [
            [
                -g(0, 0).powi(2)
                    + g(0, 1) * g(0, 2)
                    + g(1, 0) * g(2, 0)
                    + g(1, 1) * g(2, 2)
                    + g(1, 2) * g(2, 1),
                -g(0, 1).powi(2)
                    + g(0, 0) * g(0, 2)
                    + g(1, 1) * g(2, 1)
                    + g(1, 2) * g(2, 0)
                    + g(1, 0) * g(2, 2),
                -g(0, 2).powi(2)
                    + g(0, 0) * g(0, 1)
                    + g(1, 2) * g(2, 2)
                    + g(1, 0) * g(2, 1)
                    + g(1, 1) * g(2, 0),
            ],
            [
                -g(1, 0).powi(2)
                    + g(1, 1) * g(1, 2)
                    + g(0, 0) * g(2, 0)
                    + g(0, 2) * g(2, 1)
                    + g(0, 1) * g(2, 2),
                -g(1, 1).powi(2)
                    + g(1, 0) * g(1, 2)
                    + g(0, 1) * g(2, 1)
                    + g(0, 0) * g(2, 2)
                    + g(0, 2) * g(2, 0),
                -g(1, 2).powi(2)
                    + g(1, 0) * g(1, 1)
                    + g(0, 2) * g(2, 2)
                    + g(0, 1) * g(2, 0)
                    + g(0, 0) * g(2, 1),
            ],
            [
                -g(2, 0).powi(2)
                    + g(2, 1) * g(2, 2)
                    + g(0, 0) * g(1, 0)
                    + g(0, 1) * g(1, 2)
                    + g(0, 2) * g(1, 1),
                -g(2, 1).powi(2)
                    + g(2, 0) * g(2, 2)
                    + g(0, 1) * g(1, 1)
                    + g(0, 2) * g(1, 0)
                    + g(0, 0) * g(1, 2),
                -g(2, 2).powi(2)
                    + g(2, 0) * g(2, 1)
                    + g(0, 2) * g(1, 2)
                    + g(0, 0) * g(1, 1)
                    + g(0, 1) * g(1, 0),
            ],
        ]
    }

    #[test]
    fn kappa_matches_closed_form() {
        for salt in 0..100 {
            let c = random_coefficients(3, salt);
            let kappa = witness_kappa(&c).unwrap().kappa;
            let expected = closed_form(&c);
            for i in 0..3 {
                for j in 0..3 {
                    assert!((kappa[i][j] - expected[i][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn kappa_examples() {
        for ell in all_cosets(3).unwrap() {
            let w = witness_kappa(&subgroup_state(&ell)).unwrap();
            assert!(w.is_zero(0.0), "{:?}", w.kappa);
        }
        let w = witness_kappa(&CoefficientMatrix::uniform(3).unwrap()).unwrap();
        assert!(w
            .kappa
            .iter()
            .flatten()
            .all(|k| (k - 1.0 / 27.0).abs() < 1e-15));
        assert!(w.is_positive(0.0));
        let delta = CoefficientMatrix::delta(3, PhaseIndex::ORIGIN).unwrap();
        let w = witness_kappa(&delta).unwrap();
        assert_eq!(w.kappa, [[-1.0, 0.0, 0.0], [0.0; 3], [0.0; 3]]);
        assert_eq!(witness_value(&delta, &w).unwrap(), -1.0);
        assert!(witness_kappa(&CoefficientMatrix::uniform(2).unwrap()).is_err());
    }

    #[test]
    fn witness_values() {
        let mixed = CoefficientMatrix::uniform(3).unwrap();
        let v = witness_value(&mixed, &witness_kappa(&mixed).unwrap()).unwrap();
        assert!((v - 1.0 / 27.0).abs() < 1e-15);
        for ell in all_cosets(3).unwrap() {
            let c = subgroup_state(&ell);
            assert!(
                witness_value(&c, &witness_kappa(&c).unwrap())
                    .unwrap()
                    .abs()
                    < 1e-12
            );
        }
        let dense = witness_operator(&witness_kappa(&mixed).unwrap());
        let rho = crate::weyl::density_from_coefficients(&mixed);
        assert!(((&rho * &dense).trace().re - v).abs() < 1e-14);
    }

    #[test]
    fn matched_witness_equals_det_difference() {
        for salt in 0..200 {
            let c = random_coefficients(3, salt);
            let v = witness_value(&c, &witness_kappa(&c).unwrap()).unwrap();
            let crit = ppt_det_qutrit(&c).unwrap();
            assert!((v - (crit.lhs - crit.rhs)).abs() < 1e-14);
        }
    }

    #[test]
    fn choi_map_examples() {
        let sigma = ComplexMatrix::from_fn(3, 3, |i, j| {
            Complex64::new((i + 2 * j) as f64 * 0.1, i as f64 - j as f64)
        });
        let mut kappa = [[0.0; 3]; 3];
        kappa[0][0] = 1.0;
        let id = WitnessMatrix { kappa };
        assert!(choi_map_apply(&id, &sigma).unwrap().max_abs_diff(&sigma) < 1e-14);
        assert!(
            choi_map_partial_trace(&id, &sigma)
                .unwrap()
                .max_abs_diff(&sigma)
                < 1e-14
        );

        let zero = WitnessMatrix {
            kappa: [[0.0; 3]; 3],
        };
        assert_eq!(
            choi_map_apply(&zero, &sigma)
                .unwrap()
                .max_abs_diff(&ComplexMatrix::zeros(3, 3)),
            0.0
        );

        let mixed = witness_kappa(&CoefficientMatrix::uniform(3).unwrap()).unwrap();
        let third = ComplexMatrix::identity(3).scale(Complex64::new(1.0 / 3.0, 0.0));
        let out = choi_map_apply(&mixed, &third).unwrap();
        assert!(
            out.max_abs_diff(&ComplexMatrix::identity(3).scale(Complex64::new(1.0 / 9.0, 0.0)))
                < 1e-15
        );

        assert!(choi_map_apply(&mixed, &ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn choi_forms_agree() {
        for salt in 0..20 {
            let w = witness_kappa(&random_coefficients(3, salt)).unwrap();
            let sigma = ComplexMatrix::from_fn(3, 3, |i, j| {
                Complex64::new(
                    ((salt as usize + 3 * i + j) % 7) as f64 * 0.1,
                    ((i * j + salt as usize) % 5) as f64 * 0.05,
                )
            });
            let a = choi_map_apply(&w, &sigma).unwrap();
            let b = choi_map_partial_trace(&w, &sigma).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }
}
