use bellsimplex::detection::{
    ppt_det_qutrit, ppt_oracle, realignment_fast, realignment_oracle,
    realignment_qutrit_subgroup_form,
};
use bellsimplex::linalg::hermitian_eigenvalues;
use bellsimplex::montecarlo::{sample_uniform, SamplerConfig};
use bellsimplex::statefile::StateFile;
use bellsimplex::weyl::{density_from_coefficients, partial_transpose};
use bellsimplex::{classify, CoefficientMatrix};
use serde_json::json;

use crate::format::round_floats;
use crate::Failure;

const ORACLE_TOL: f64 = 1e-9;

#[derive(Default)]
struct Check {
    name: &'static str,
    checked: u64,
    violations: u64,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            ..Self::default()
        }
    }

    /// Records one outcome; returns true on a violation.
    fn record(&mut self, ok: bool) -> bool {
        self.checked += 1;
        if !ok {
            self.violations += 1;
        }
        !ok
    }
}

fn qutrit_checks(c: &CoefficientMatrix, checks: &mut [Check]) -> bool {
    let det = ppt_det_qutrit(c).expect("d = 3");
    let pt = partial_transpose(&density_from_coefficients(c), 3, 3).expect("square density");
    let spectrum = hermitian_eigenvalues(&pt).expect("Hermitian partial transpose");
    let oracle_npt = spectrum[0] < -bellsimplex::detection::PPT_EIGEN_TOL;
    let mut bad = false;
    // States within the tolerance band of the boundary are not decidable by either side.
    if (det.rhs - det.lhs).abs() > ORACLE_TOL {
        bad |= checks[0].record(det.is_npt == oracle_npt);
    }
    let negatives = spectrum.iter().filter(|v| **v < -ORACLE_TOL).count();
    bad |= checks[1].record(negatives == 0 || negatives == 3);
    let bound = 1.0 / 3.0 + ORACLE_TOL;
    bad |= checks[2].record(spectrum.iter().all(|v| v.abs() <= bound));
    let sub = realignment_qutrit_subgroup_form(c).expect("d = 3");
    bad |= checks[3].record((realignment_fast(c).value - 1.0 - sub.value).abs() < ORACLE_TOL);
    bad
}

pub fn cmd_verify(d: usize, n: u64, seed: u64) -> Result<String, Failure> {
    let cfg = SamplerConfig::new(d, n, seed);
    let mut checks = vec![Check::new("realignment_fast_vs_dense")];
    match d {
        2 => checks.extend([
            Check::new("ppt_vs_dense"),
            Check::new("ppt_iff_realignment"),
        ]),
        3 => checks.extend([
            Check::new("det_criterion_vs_dense"),
            Check::new("negative_count_0_or_3"),
            Check::new("spectrum_within_third"),
            Check::new("subgroup_form_vs_bloch_norm"),
        ]),
        _ => {}
    }
    let mut first_violation: Option<CoefficientMatrix> = None;
    for c in sample_uniform(&cfg)? {
        let fast = realignment_fast(&c).value;
        let mut bad =
            checks[0].record((d as f64 * realignment_oracle(&c) - fast).abs() < ORACLE_TOL);
        match d {
            2 => {
                let record = classify(&c);
                let oracle = ppt_oracle(&c);
                if oracle.min_eigenvalue.abs() > ORACLE_TOL {
                    bad |= checks[1].record(oracle.is_npt != record.is_ppt);
                }
                bad |= checks[2].record(record.is_ppt != record.realignment_detected);
            }
            3 => bad |= qutrit_checks(&c, &mut checks[1..]),
            _ => {}
        }
        if bad && first_violation.is_none() {
            first_violation = Some(c);
        }
    }
    let total: u64 = checks.iter().map(|c| c.violations).sum();
    let summary = json!({
        "d": d,
        "n": n,
        "seed": seed,
        "checks": checks
            .iter()
            .map(|c| json!({"name": c.name, "checked": c.checked, "violations": c.violations}))
            .collect::<Vec<_>>(),
        "violations": total,
    });
    let payload = serde_json::to_string_pretty(&round_floats(summary)).expect("summary serializes");
    match first_violation {
        None => Ok(payload),
        Some(c) => {
            crate::emit(&payload);
            Err(Failure::numerical(format!(
                "{total} violation(s); first violating state:\n{}",
                StateFile::from_coefficients(&c, None).to_json()
            )))
        }
    }
}
