//! Measurement-cost model: optimal shot allocation and l1-norm bounds
//! before and after partitioning.
//!
//! The shot allocation follows the variance-weighted optimum
//! `M_j = |a_j| s_j (sum_k |a_k| s_k) / eps^2`, with `s_j <= 1` for
//! self-inverse operators when no state is supplied. Partitioning replaces
//! the l1 norm `L = sum |a_j|` by `L_c = sum_l gamma_l`, which satisfies
//! `L / sqrt(s_max) <= L_c <= L`. Shot counts are reported as reals; any
//! rounding policy is presentation and left to callers.

use serde::Serialize;
use thiserror::Error;

use crate::hamiltonian::PauliHamiltonian;
use crate::partition::{AnticommutingPartition, PartitionError};
use crate::rotation::{plans_for_partition, RotationError, RotationMode};
use crate::simulator::{self, SimulatorError};

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("epsilon must be positive, got {epsilon}")]
    InvalidEpsilon { epsilon: f64 },
    #[error("sigma[{index}] = {value} outside [0, 1]")]
    SigmaOutOfRange { index: usize, value: f64 },
    #[error("{coeffs} coefficients but {sigmas} sigmas")]
    LengthMismatch { coeffs: usize, sigmas: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(#[from] PartitionError),
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
    #[error(transparent)]
    Rotation(#[from] RotationError),
}

/// l1 norms and measurement bounds before and after partitioning.
#[derive(Debug, Clone, Serialize)]
pub struct CostReport {
    pub lambda_before: f64,
    pub lambda_after: f64,
    pub s_max: usize,
    pub shot_bound_before: f64,
    pub shot_bound_after: f64,
    pub epsilon: f64,
}

/// Optimal (real-valued) measurement counts per term at precision `epsilon`.
/// `sigmas` defaults to all ones, the bound for self-inverse operators.
pub fn shot_allocation(
    coeffs: &[f64],
    sigmas: Option<&[f64]>,
    epsilon: f64,
) -> Result<Vec<f64>, MeasureError> {
    if epsilon <= 0.0 {
        return Err(MeasureError::InvalidEpsilon { epsilon });
    }
    let ones;
    let sigmas = match sigmas {
        Some(s) => {
            if s.len() != coeffs.len() {
                return Err(MeasureError::LengthMismatch { coeffs: coeffs.len(), sigmas: s.len() });
            }
            s
        }
        None => {
            ones = vec![1.0; coeffs.len()];
            &ones
        }
    };
    for (index, &value) in sigmas.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(MeasureError::SigmaOutOfRange { index, value });
        }
    }
    let total: f64 = coeffs.iter().zip(sigmas).map(|(a, s)| a.abs() * s).sum();
    Ok(coeffs
        .iter()
        .zip(sigmas)
        .map(|(a, s)| a.abs() * s * total / (epsilon * epsilon))
        .collect())
}

/// Norms and shot bounds for a partitioned Hamiltonian. The identity offset
/// needs no measurement and is excluded from every norm.
pub fn cost_report(
    h: &PauliHamiltonian,
    partition: &AnticommutingPartition,
    epsilon: f64,
) -> Result<CostReport, MeasureError> {
    if epsilon <= 0.0 {
        return Err(MeasureError::InvalidEpsilon { epsilon });
    }
    partition.check(h)?;
    let lambda_before = h.l1_norm();
    let lambda_after: f64 = partition.gammas().iter().sum();
    Ok(CostReport {
        lambda_before,
        lambda_after,
        s_max: partition.s_max(),
        shot_bound_before: (lambda_before / epsilon).powi(2),
        shot_bound_after: (lambda_after / epsilon).powi(2),
        epsilon,
    })
}

/// Per-set standard deviations `sigma_l = sqrt(1 - <R^† P_s R>^2)` in the
/// given state; self-inverse rotated sinks have unit second moment.
pub fn variance_given_state(
    h: &PauliHamiltonian,
    partition: &AnticommutingPartition,
    state: &[num_complex::Complex64],
) -> Result<Vec<f64>, MeasureError> {
    simulator::ensure_dense_cap(h.n_qubits())?;
    let dim = 1usize << h.n_qubits();
    if state.len() != dim {
        return Err(SimulatorError::DimensionMismatch { expected: dim, found: state.len() }.into());
    }
    let norm = state.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(SimulatorError::NotNormalized { norm }.into());
    }
    partition.check(h)?;
    let plans = plans_for_partition(h, partition, RotationMode::Sequence)?;
    let mut sigmas = Vec::with_capacity(plans.len());
    for plan in &plans {
        let rotated = simulator::apply_plan(plan, state);
        let sink_applied = simulator::apply_pauli(&plan.sink, &rotated);
        let expectation: f64 = rotated
            .iter()
            .zip(&sink_applied)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        sigmas.push((1.0 - expectation * expectation).max(0.0).sqrt());
    }
    Ok(sigmas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::greedy_color;
    use crate::simulator::{apply_pauli, random_state};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_term_allocation() {
        let shots = shot_allocation(&[1.0], None, 0.1).unwrap();
        assert!((shots[0] - 100.0).abs() < 1e-9);
    }

    #[test]
    fn two_term_allocation_by_hand() {
        // coeffs (3, 4), eps = 1: M = (3*7, 4*7), total 49 = Lambda^2.
        let shots = shot_allocation(&[3.0, 4.0], None, 1.0).unwrap();
        assert_eq!(shots, vec![21.0, 28.0]);
        assert_eq!(shots.iter().sum::<f64>(), 49.0);
    }

    #[test]
    fn zero_sigma_means_zero_shots() {
        let shots = shot_allocation(&[2.0, 5.0], Some(&[0.0, 1.0]), 0.5).unwrap();
        assert_eq!(shots[0], 0.0);
        assert!(shots[1] > 0.0);
    }

    #[test]
    fn allocation_input_validation() {
        assert!(matches!(
            shot_allocation(&[1.0], None, 0.0),
            Err(MeasureError::InvalidEpsilon { .. })
        ));
        assert!(matches!(
            shot_allocation(&[1.0], Some(&[1.5]), 0.1),
            Err(MeasureError::SigmaOutOfRange { index: 0, .. })
        ));
        assert!(matches!(
            shot_allocation(&[1.0, 2.0], Some(&[1.0]), 0.1),
            Err(MeasureError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn allocation_total_is_closed_form() {
        let coeffs = [0.3, -1.7, 0.4, 2.2];
        let sigmas = [0.9, 0.2, 1.0, 0.7];
        let eps = 0.05;
        let shots = shot_allocation(&coeffs, Some(&sigmas), eps).unwrap();
        let weighted: f64 = coeffs.iter().zip(&sigmas).map(|(a, s)| a.abs() * s).sum();
        let expected = (weighted / eps).powi(2);
        assert!((shots.iter().sum::<f64>() - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn singleton_partition_saturates_lambda() {
        let h = PauliHamiltonian::parse("1.0 ZI\n1.0 IZ\n1.0 ZZ\n").unwrap();
        let partition = greedy_color(&h, None);
        let report = cost_report(&h, &partition, 0.1).unwrap();
        assert_eq!(report.lambda_after, report.lambda_before);
        assert_eq!(report.s_max, 1);
    }

    #[test]
    fn one_set_three_four_five() {
        let h = PauliHamiltonian::parse("3.0 X\n4.0 Y\n").unwrap();
        let partition = greedy_color(&h, None);
        let report = cost_report(&h, &partition, 1.0).unwrap();
        assert_eq!(report.lambda_before, 7.0);
        assert!((report.lambda_after - 5.0).abs() < 1e-12);
        assert_eq!(report.shot_bound_before, 49.0);
        assert!((report.shot_bound_after - 25.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_coefficients_saturate_lower_bound() {
        // Unit-coefficient Ising pairs: every set has size 2 and uniform
        // magnitudes, so Lambda_c = Lambda / sqrt(2) exactly.
        let g = crate::generators::GraphSpec::ring(6);
        let (h, partition) = crate::generators::tim_pair_partition(&g, 1.0).unwrap();
        assert!(partition.sets().iter().all(|s| s.len() == 2));
        let report = cost_report(&h, &partition, 1.0).unwrap();
        assert!(
            (report.lambda_after - report.lambda_before / 2.0_f64.sqrt()).abs() < 1e-12
        );
    }

    #[test]
    fn sink_eigenstate_has_zero_variance() {
        let h = PauliHamiltonian::parse("1.0 Z\n").unwrap();
        let partition = greedy_color(&h, None);
        let zero = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let sigmas = variance_given_state(&h, &partition, &zero).unwrap();
        assert!(sigmas[0].abs() < 1e-12);
    }

    #[test]
    fn balanced_state_has_unit_variance() {
        let h = PauliHamiltonian::parse("1.0 Z\n").unwrap();
        let partition = greedy_color(&h, None);
        let inv = 1.0 / 2f64.sqrt();
        let plus = vec![Complex64::new(inv, 0.0), Complex64::new(inv, 0.0)];
        let sigmas = variance_given_state(&h, &partition, &plus).unwrap();
        assert!((sigmas[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn variance_matches_independent_expectation() {
        // sigma^2 = 1 - <H_S/gamma>^2 with the expectation computed
        // term-by-term, independent of the rotation path.
        let h = PauliHamiltonian::parse("0.8 XYZ\n-0.5 ZII\n0.2 YXI\n").unwrap();
        let partition = greedy_color(&h, None);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let state = random_state(3, &mut rng);
        let sigmas = variance_given_state(&h, &partition, &state).unwrap();
        for (s, set) in partition.sets().iter().enumerate() {
            let mut expectation = 0.0;
            for (&i, &beta) in set.iter().zip(&partition.betas()[s]) {
                let applied = apply_pauli(h.operator(i), &state);
                let term: f64 =
                    state.iter().zip(&applied).map(|(a, b)| (a.conj() * b).re).sum();
                expectation += beta * term;
            }
            let expected_sigma = (1.0 - expectation * expectation).max(0.0).sqrt();
            assert!((sigmas[s] - expected_sigma).abs() < 1e-10);
        }
    }

    #[test]
    fn variance_rejects_bad_states() {
        let h = PauliHamiltonian::parse("1.0 Z\n").unwrap();
        let partition = greedy_color(&h, None);
        let wrong_dim = vec![Complex64::new(1.0, 0.0); 4];
        assert!(variance_given_state(&h, &partition, &wrong_dim).is_err());
        let unnormalized = vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)];
        assert!(variance_given_state(&h, &partition, &unnormalized).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn lambda_bounds_hold(seed in 0u64..1000) {
                let h = crate::generators::random_klocal(6, 16, 2, seed).unwrap();
                if h.term_count() == 0 {
                    return Ok(());
                }
                let partition = greedy_color(&h, Some(seed));
                let report = cost_report(&h, &partition, 0.1).unwrap();
                prop_assert!(report.lambda_after <= report.lambda_before + 1e-9);
                let lower = report.lambda_before / (report.s_max as f64).sqrt();
                prop_assert!(lower <= report.lambda_after + 1e-9);
                let all_singletons = partition.s_max() == 1;
                let saturated =
                    (report.lambda_after - report.lambda_before).abs() < 1e-9;
                prop_assert_eq!(all_singletons, saturated);
            }
        }
    }
}
