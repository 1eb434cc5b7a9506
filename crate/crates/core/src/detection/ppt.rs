use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DETECTION_GUARD;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};
use crate::phase_space::all_cosets;
use crate::weyl::{
    density_from_coefficients, omega_powers, partial_transpose, weyl_operator, CoefficientMatrix,
    PhaseIndex,
};

/// A partial-transpose eigenvalue below `-PPT_EIGEN_TOL` counts as negative.
pub const PPT_EIGEN_TOL: f64 = 1e-10;

/// Both sides of the qutrit determinant criterion `3 sum_l prod_l c < sum c^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetCriterion {
    pub lhs: f64,
    pub rhs: f64,
    pub is_npt: bool,
}

/// Minimum eigenvalue of the dense partial transpose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptOracle {
    pub min_eigenvalue: f64,
    pub is_npt: bool,
}

fn require_qutrit(c: &CoefficientMatrix) -> Result<()> {
    if c.d() == 3 {
        Ok(())
    } else {
        Err(Error::WrongDimension {
            expected: 3,
            found: c.d(),
        })
    }
}

/// The three `3 x 3` diagonal blocks `A_m` of the partial transpose in the Bell basis:
/// `A_m = (1/9) sum_{i,j,k,l} w^(j(m-k) - i(l+j)) c[k][l] W[i][j]`.
pub fn ppt_blocks(c: &CoefficientMatrix) -> Result<Vec<ComplexMatrix>> {
    require_qutrit(c)?;
    let d = 3;
    let w = omega_powers(d);
    let weyl: Vec<ComplexMatrix> = PhaseIndex::all(d)
        .map(|p| weyl_operator(d, p).expect("d = 3"))
        .collect();
    let blocks = (0..d)
        .map(|m| {
            let mut acc = ComplexMatrix::zeros(d, d);
            for p in PhaseIndex::all(d) {
                let (i, j) = (p.k, p.l);
                let weight: Complex64 = PhaseIndex::all(d)
                    .map(|q| {
                        let (k, l) = (q.k, q.l);
                        let exponent =
                            (j * ((m + d - k) % d) + d * d - (i * ((l + j) % d)) % d) % d;
                        w[exponent] * c.get(k, l)
                    })
                    .sum();
                acc = &acc + &weyl[p.flat(d)].scale(weight / 9.0);
            }
            acc
        })
        .collect();
    Ok(blocks)
}

/// Flat indices of the 12 qutrit cosets, in canonical order.
pub(crate) fn qutrit_lines() -> &'static [[usize; 3]] {
    static LINES: OnceLock<Vec<[usize; 3]>> = OnceLock::new();
    LINES.get_or_init(|| {
        all_cosets(3)
            .expect("d = 3")
            .iter()
            .map(|ell| {
                let e = ell.elements();
                [e[0].flat(3), e[1].flat(3), e[2].flat(3)]
            })
            .collect()
    })
}

/// `lhs = 3 sum over the 12 cosets of the product of their coefficients`,
/// `rhs = sum c^3`; NPT exactly when `lhs < rhs`.
pub fn ppt_det_qutrit(c: &CoefficientMatrix) -> Result<DetCriterion> {
    require_qutrit(c)?;
    let v = c.as_slice();
    let lhs = 3.0
        * qutrit_lines()
            .iter()
            .map(|[a, b, e]| v[*a] * v[*b] * v[*e])
            .sum::<f64>();
    let rhs = c.as_slice().iter().map(|v| v.powi(3)).sum();
    Ok(DetCriterion {
        lhs,
        rhs,
        is_npt: lhs < rhs - DETECTION_GUARD,
    })
}

/// Dense PPT test: builds `rho^Gamma` and takes its smallest eigenvalue.
pub fn ppt_oracle(c: &CoefficientMatrix) -> PptOracle {
    let d = c.d();
    let pt = partial_transpose(&density_from_coefficients(c), d, d).expect("square density");
    let min_eigenvalue = hermitian_eigenvalues(&pt).expect("partial transpose is Hermitian")[0];
    PptOracle {
        min_eigenvalue,
        is_npt: min_eigenvalue < -PPT_EIGEN_TOL,
    }
}

/// The partial transpose of a Bell-diagonal state only couples `|a>|b>` with
/// `|a'>|b'>` when `a + b = a' + b' (mod d)`. Block `s` has entries
/// `M[a][a'] = (1/d) sum_k c[k][s - a - a'] w^(k(a - a'))`.
pub fn partial_transpose_sectors(c: &CoefficientMatrix) -> Vec<ComplexMatrix> {
    let d = c.d();
    let w = omega_powers(d);
    let inv_d = 1.0 / d as f64;
    (0..d)
        .map(|s| {
            ComplexMatrix::from_fn(d, d, |a, b| {
                let shift = (s + 2 * d - a - b) % d;
                let diff = (a + d - b) % d;
                (0..d)
                    .map(|k| w[(k * diff) % d] * c.get(k, shift))
                    .sum::<Complex64>()
                    * inv_d
            })
        })
        .collect()
}

/// Smallest eigenvalue of `rho^Gamma`, computed from the `d` sector blocks.
pub fn ppt_sector_min_eigenvalue(c: &CoefficientMatrix) -> f64 {
    partial_transpose_sectors(c)
        .iter()
        .map(|block| hermitian_eigenvalues(block).expect("sector blocks are Hermitian")[0])
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::test_support::{qutrit, random_coefficients};
    use crate::phase_space::{all_cosets, subgroup_state};

    fn sorted_union(blocks: &[ComplexMatrix]) -> Vec<f64> {
        let mut all: Vec<f64> = blocks
            .iter()
            .flat_map(|b| hermitian_eigenvalues(b).unwrap())
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }

    #[test]
    fn blocks_of_maximally_mixed_state() {
        let blocks = ppt_blocks(&CoefficientMatrix::uniform(3).unwrap()).unwrap();
        let expected = ComplexMatrix::identity(3).scale(Complex64::new(1.0 / 9.0, 0.0));
        for b in &blocks {
            assert!(b.max_abs_diff(&expected) < 1e-14);
        }
        assert!(ppt_blocks(&CoefficientMatrix::uniform(2).unwrap()).is_err());
    }

    #[test]
    fn blocks_structure_and_spectrum() {
        let w10 = weyl_operator(3, PhaseIndex { k: 1, l: 0 }).unwrap();
        for salt in 0..30 {
            let coeffs = random_coefficients(3, salt);
            let blocks = ppt_blocks(&coeffs).unwrap();
            assert!((blocks[0].trace() - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-12);
            let mut wm = ComplexMatrix::identity(3);
            for block in &blocks {
                assert!(block.hermitian_deviation() < 1e-14);
                let conj = &(&wm.adjoint() * &blocks[0]) * &wm;
                assert!(block.max_abs_diff(&conj) < 1e-12);
                wm = &wm * &w10;
            }
            let pt = partial_transpose(&density_from_coefficients(&coeffs), 3, 3).unwrap();
            let dense = hermitian_eigenvalues(&pt).unwrap();
            for (a, b) in dense.iter().zip(sorted_union(&blocks)) {
                assert!((a - b).abs() < 1e-9);
            }
            let det_dense = pt.determinant().unwrap();
            let det0 = blocks[0].determinant().unwrap();
            assert!((det_dense - det0.powi(3)).norm() < 1e-9);
            let crit = ppt_det_qutrit(&coeffs).unwrap();
            assert!((det0.re - (crit.lhs - crit.rhs) / 27.0).abs() < 1e-14);
        }
    }

    #[test]
    fn det_criterion_examples() {
        let crit =
            ppt_det_qutrit(&CoefficientMatrix::delta(3, PhaseIndex::ORIGIN).unwrap()).unwrap();
        assert_eq!((crit.lhs, crit.rhs, crit.is_npt), (0.0, 1.0, true));
        let crit = ppt_det_qutrit(&CoefficientMatrix::uniform(3).unwrap()).unwrap();
        assert!((crit.lhs - 36.0 / 729.0).abs() < 1e-15);
        assert!((crit.rhs - 9.0 / 729.0).abs() < 1e-15);
        assert!(!crit.is_npt);
        for ell in all_cosets(3).unwrap() {
            let crit = ppt_det_qutrit(&subgroup_state(&ell)).unwrap();
            assert!((crit.lhs - 1.0 / 9.0).abs() < 1e-15 && (crit.rhs - 1.0 / 9.0).abs() < 1e-15);
            assert!(!crit.is_npt);
        }
        assert!(ppt_det_qutrit(&CoefficientMatrix::uniform(4).unwrap()).is_err());
    }

    #[test]
    fn oracle_examples() {
        let o = ppt_oracle(&CoefficientMatrix::delta(2, PhaseIndex::ORIGIN).unwrap());
        assert!((o.min_eigenvalue + 0.5).abs() < 1e-12 && o.is_npt);
        for d in 2..=5 {
            let o = ppt_oracle(&CoefficientMatrix::uniform(d).unwrap());
            assert!((o.min_eigenvalue - 1.0 / (d * d) as f64).abs() < 1e-12 && !o.is_npt);
        }
    }

    #[test]
    fn qutrit_spectrum_bounds_and_negative_count() {
        for salt in 0..200 {
            let coeffs = random_coefficients(3, salt);
            let pt = partial_transpose(&density_from_coefficients(&coeffs), 3, 3).unwrap();
            let ev = hermitian_eigenvalues(&pt).unwrap();
            assert!(ev[0] >= -1.0 / 3.0 - 1e-9 && ev[8] <= 1.0 / 3.0 + 1e-9);
            let negatives = ev.iter().filter(|v| **v < -1e-9).count();
            assert!(negatives == 0 || negatives == 3);
            let crit = ppt_det_qutrit(&coeffs).unwrap();
            if (crit.rhs - crit.lhs).abs() > 1e-9 {
                assert_eq!(crit.is_npt, ppt_oracle(&coeffs).is_npt);
            }
        }
    }

    #[test]
    fn sectors_reproduce_dense_spectrum() {
        for d in 2..=6 {
            for salt in 0..8 {
                let coeffs = random_coefficients(d, salt + 100);
                let sectors = partial_transpose_sectors(&coeffs);
                assert_eq!(sectors.len(), d);
                let pt = partial_transpose(&density_from_coefficients(&coeffs), d, d).unwrap();
                let dense = hermitian_eigenvalues(&pt).unwrap();
                for (a, b) in dense.iter().zip(sorted_union(&sectors)) {
                    assert!((a - b).abs() < 1e-10, "d = {d}");
                }
                assert!(
                    (ppt_sector_min_eigenvalue(&coeffs) - ppt_oracle(&coeffs).min_eigenvalue).abs()
                        < 1e-10
                );
            }
        }
    }

    #[test]
    fn worked_families() {
        for x in [0.05, 0.1, 1.0 / 3.0] {
            let t = 1.0 / 3.0 - x;
            let crit = ppt_det_qutrit(&qutrit([[t, t, t], [2.0 * x, x, 0.0], [0.0; 3]])).unwrap();
            assert!(crit.is_npt, "x = {x}");
        }
        let t = 1.0 / 3.0;
        let crit = ppt_det_qutrit(&qutrit([[t, t, t], [0.0; 3], [0.0; 3]])).unwrap();
        assert!((crit.rhs - crit.lhs).abs() < 1e-15 && !crit.is_npt);
    }

    /// Support patterns of the six families with one full row of zeros.
    const ZERO_ROW_FAMILIES: [&[(usize, usize)]; 8] = [
        &[(0, 0)],
        &[(0, 0), (0, 1)],
        &[(0, 0), (0, 1), (1, 0)],
        &[(0, 0), (0, 1), (0, 2)],
        &[(0, 0), (0, 1), (0, 2), (1, 0)],
        &[(0, 0), (0, 1), (1, 0), (1, 1)],
        &[(0, 0), (0, 1), (0, 2), (1, 0), (1, 1)],
        &[(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)],
    ];

    #[test]
    fn zero_row_families_are_npt() {
        for support in ZERO_ROW_FAMILIES {
            for salt in 0..50 {
                let weights = random_coefficients(3, salt + 900);
                let mut rows = [[0.0; 3]; 3];
                let mut total = 0.0;
                for (n, &(k, l)) in support.iter().enumerate() {
                    rows[k][l] = weights.as_slice()[n] + 0.01;
                    total += rows[k][l];
                }
                rows.iter_mut().flatten().for_each(|v| *v /= total);
                let crit = ppt_det_qutrit(&qutrit(rows)).unwrap();
                assert!(crit.is_npt, "{support:?}: {crit:?}");
            }
        }
        // Equality cases: one flat row, or two flat rows, sit on the boundary.
        let t = 1.0 / 3.0;
        for rows in [
            [[t, t, t], [0.0; 3], [0.0; 3]],
            [[0.2; 3], [0.4 / 3.0; 3], [0.0; 3]],
        ] {
            let crit = ppt_det_qutrit(&qutrit(rows)).unwrap();
            assert!(!crit.is_npt && (crit.rhs - crit.lhs).abs() < 1e-15);
        }
    }
}
