//! Synthesis of the unitary rotations that collapse a completely
//! anticommuting set to a single Pauli operator.
//!
//! Two constructions are provided. The sequence plan eliminates one
//! operator per step: step k conjugates by `exp(-i theta_k/2 * G_k)` with
//! generator `G_k = i P_sink P_k`, and the arctangent angles are chosen on
//! the positive-root branch so the surviving coefficient grows to exactly 1.
//! The single plan rotates once around the axis `X = i sum_k beta'_k P_k
//! P_sink` (the renormalized complement of the sink), a Hermitian
//! self-inverse operator, by the angle `arccos(beta_sink)`.
//!
//! For a singleton set with a negative normalized coefficient there is no
//! rotation to perform and no rotation can repair the sign, so the plan's
//! sink carries it: conjugating the normalized set sum by the composed
//! steps always reproduces the stored sink exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::PauliHamiltonian;
use crate::partition::AnticommutingPartition;
use crate::pauli::PauliString;

/// Steps below this |beta| are emitted with angle zero.
const BETA_SKIP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RotationError {
    #[error("operators {first} and {second} commute; the set is not completely anticommuting")]
    NotAnticommuting { first: usize, second: usize },
    #[error("betas are not l2-normalized: sum of squares is {sum}")]
    BetaNotNormalized { sum: f64 },
    #[error("{ops} operators but {betas} coefficients")]
    LengthMismatch { ops: usize, betas: usize },
    #[error("empty operator set")]
    EmptySet,
    #[error("sink index {sink} out of range for {size} operators")]
    SinkOutOfRange { sink: usize, size: usize },
    #[error("single-rotation plans have no direct gate compilation")]
    SingleModeGateCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationMode {
    Sequence,
    Single,
}

/// One rotation `exp(-i angle/2 * generator)`; the generator is a
/// self-inverse real-weighted Pauli sum (a single Pauli in sequence mode).
#[derive(Debug, Clone, PartialEq)]
pub struct RotationStep {
    pub generator: Vec<(f64, PauliString)>,
    pub angle: f64,
}

/// Ordered rotation sequence reducing one anticommuting set to its sink
/// operator; steps apply first-to-last under conjugation.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationPlan {
    pub set_index: usize,
    pub sink: PauliString,
    pub mode: RotationMode,
    pub steps: Vec<RotationStep>,
}

impl RotationPlan {
    pub fn step_count(&self) -> usize {
        self.steps.len()
    }
}

fn validate_set(ops: &[PauliString], betas: &[f64]) -> Result<(), RotationError> {
    if ops.is_empty() {
        return Err(RotationError::EmptySet);
    }
    if ops.len() != betas.len() {
        return Err(RotationError::LengthMismatch { ops: ops.len(), betas: betas.len() });
    }
    for a in 0..ops.len() {
        for b in (a + 1)..ops.len() {
            if ops[a].commutes(&ops[b]).unwrap() {
                return Err(RotationError::NotAnticommuting { first: a, second: b });
            }
        }
    }
    let sum: f64 = betas.iter().map(|b| b * b).sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(RotationError::BetaNotNormalized { sum });
    }
    Ok(())
}

fn default_sink(betas: &[f64]) -> usize {
    let mut best = 0;
    for (i, beta) in betas.iter().enumerate() {
        if beta.abs() > betas[best].abs() {
            best = i;
        }
    }
    best
}

fn signed_sink(op: &PauliString, coefficient: f64) -> PauliString {
    if coefficient < 0.0 {
        op.times_i_pow(2)
    } else {
        op.clone()
    }
}

/// Builds the step-by-step elimination plan with the sink chosen as the
/// operator of largest |beta|.
pub fn build_sequence_plan(
    ops: &[PauliString],
    betas: &[f64],
) -> Result<RotationPlan, RotationError> {
    build_sequence_plan_with_sink(ops, betas, default_sink(betas))
}

/// Sequence plan with an explicit sink operator.
///
/// Angles satisfy `tan theta_k = beta_k / r_{k-1}` with `r` the running
/// (positive-root) sink coefficient, via the two-argument arctangent; the
/// first step sees the raw, possibly negative, sink coefficient and rotates
/// through the larger angle when needed.
pub fn build_sequence_plan_with_sink(
    ops: &[PauliString],
    betas: &[f64],
    sink: usize,
) -> Result<RotationPlan, RotationError> {
    validate_set(ops, betas)?;
    if sink >= ops.len() {
        return Err(RotationError::SinkOutOfRange { sink, size: ops.len() });
    }
    let mut steps = Vec::with_capacity(ops.len() - 1);
    let mut running = betas[sink];
    for (k, op) in ops.iter().enumerate() {
        if k == sink {
            continue;
        }
        let generator = ops[sink].multiply(op).unwrap().times_i_pow(1);
        debug_assert!(generator.is_hermitian_selfinverse());
        let angle = if betas[k].abs() < BETA_SKIP_TOLERANCE {
            0.0
        } else {
            let theta = betas[k].atan2(running);
            running = running.hypot(betas[k]);
            theta
        };
        steps.push(RotationStep { generator: vec![(1.0, generator)], angle });
    }
    Ok(RotationPlan {
        set_index: 0,
        sink: signed_sink(&ops[sink], running),
        mode: RotationMode::Sequence,
        steps,
    })
}

/// Builds the one-step plan generated by the self-inverse axis operator,
/// with the sink chosen as the operator of largest |beta|.
pub fn build_single_rotation_plan(
    ops: &[PauliString],
    betas: &[f64],
) -> Result<RotationPlan, RotationError> {
    build_single_rotation_plan_with_sink(ops, betas, default_sink(betas))
}

/// Single-rotation plan with an explicit sink operator.
///
/// The generator gathers `i P_k P_sink` weighted by `beta_k /
/// sqrt(1 - beta_sink^2)`. Conjugation by `exp(-i a/2 X)` advances the
/// mixing angle of the set sum by `a`, so collapsing onto the sink takes
/// `a = -arccos(beta_sink)`. A set whose sink coefficient is already +-1
/// needs no rotation and yields an empty plan.
pub fn build_single_rotation_plan_with_sink(
    ops: &[PauliString],
    betas: &[f64],
    sink: usize,
) -> Result<RotationPlan, RotationError> {
    validate_set(ops, betas)?;
    if sink >= ops.len() {
        return Err(RotationError::SinkOutOfRange { sink, size: ops.len() });
    }
    let beta_sink = betas[sink];
    // Summing the complement directly keeps the generator normalization and
    // the angle well conditioned when the sink coefficient is close to 1.
    let norm = betas
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != sink)
        .map(|(_, b)| b * b)
        .sum::<f64>()
        .sqrt();
    if ops.len() == 1 || norm < BETA_SKIP_TOLERANCE {
        return Ok(RotationPlan {
            set_index: 0,
            sink: signed_sink(&ops[sink], beta_sink),
            mode: RotationMode::Single,
            steps: vec![],
        });
    }
    let mut generator = Vec::with_capacity(ops.len() - 1);
    for (k, op) in ops.iter().enumerate() {
        if k == sink || betas[k].abs() < BETA_SKIP_TOLERANCE {
            continue;
        }
        let term = op.multiply(&ops[sink]).unwrap().times_i_pow(1);
        debug_assert!(term.is_hermitian_selfinverse());
        generator.push((betas[k] / norm, term));
    }
    // atan2(norm, beta_sink) is arccos(beta_sink) on the unit circle.
    let angle = -norm.atan2(beta_sink);
    Ok(RotationPlan {
        set_index: 0,
        sink: ops[sink].clone(),
        mode: RotationMode::Single,
        steps: vec![RotationStep { generator, angle }],
    })
}

/// Builds one plan per partition set in the requested mode, with default
/// sink selection.
pub fn plans_for_partition(
    h: &PauliHamiltonian,
    partition: &AnticommutingPartition,
    mode: RotationMode,
) -> Result<Vec<RotationPlan>, RotationError> {
    partition
        .sets()
        .iter()
        .zip(partition.betas())
        .enumerate()
        .map(|(l, (set, betas))| {
            let ops: Vec<PauliString> =
                set.iter().map(|&i| h.operator(i).clone()).collect();
            let mut plan = match mode {
                RotationMode::Sequence => build_sequence_plan(&ops, betas)?,
                RotationMode::Single => build_single_rotation_plan(&ops, betas)?,
            };
            plan.set_index = l;
            Ok(plan)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{
        apply_plan, apply_plan_dagger, conjugation_residual, frobenius_distance, pauli_sum_matrix,
        plan_matrix, random_state, to_matrix, unitarity_residual,
    };
    use num_complex::Complex64;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn set_terms(ops: &[PauliString], betas: &[f64]) -> Vec<(f64, PauliString)> {
        betas.iter().copied().zip(ops.iter().cloned()).collect()
    }

    /// Random completely anticommuting set grown by rejection sampling,
    /// restarting whenever the partial set turns out to be maximal.
    pub(crate) fn random_anticommuting_set(
        n_qubits: usize,
        size: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<PauliString> {
        'restart: loop {
            let mut ops: Vec<PauliString> = Vec::new();
            let mut stalls = 0;
            while ops.len() < size {
                let word: String = (0..n_qubits)
                    .map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)])
                    .collect();
                let candidate = word.parse::<PauliString>().unwrap();
                let extends = !candidate.is_identity_word()
                    && ops.iter().all(|op| !op.commutes(&candidate).unwrap())
                    && ops.iter().all(|op| op.bits_key() != candidate.bits_key());
                if extends {
                    ops.push(candidate);
                    stalls = 0;
                } else {
                    stalls += 1;
                    if stalls > 400 {
                        continue 'restart;
                    }
                }
            }
            return ops;
        }
    }

    pub(crate) fn random_betas(size: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        loop {
            let raw: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = raw.iter().map(|b| b * b).sum::<f64>().sqrt();
            if norm > 1e-3 {
                return raw.into_iter().map(|b| b / norm).collect();
            }
        }
    }

    #[test]
    fn singleton_set_has_no_steps() {
        let plan = build_sequence_plan(&[p("XY")], &[1.0]).unwrap();
        assert_eq!(plan.step_count(), 0);
        assert_eq!(plan.sink, p("XY"));
    }

    #[test]
    fn negative_singleton_sink_carries_the_sign() {
        let plan = build_sequence_plan(&[p("XY")], &[-1.0]).unwrap();
        assert_eq!(plan.step_count(), 0);
        assert_eq!(plan.sink.to_string(), "-XY");
        assert_eq!(conjugation_residual(2, &plan, &[(-1.0, p("XY"))]), 0.0);
    }

    #[test]
    fn equal_pair_angle_is_pi_over_four() {
        let inv = 1.0 / 2f64.sqrt();
        let plan = build_sequence_plan(&[p("X"), p("Z")], &[inv, inv]).unwrap();
        assert_eq!(plan.step_count(), 1);
        assert!((plan.steps[0].angle.abs() - FRAC_PI_4).abs() < 1e-14);
    }

    #[test]
    fn tim_pair_angle_matches_field_strength() {
        // ZZ + x*XI at x = 1, normalized: tan(theta) = x, so theta = pi/4.
        let x: f64 = 1.0;
        let norm = (1.0 + x * x).sqrt();
        let plan =
            build_sequence_plan_with_sink(&[p("ZZ"), p("XI")], &[1.0 / norm, x / norm], 0)
                .unwrap();
        assert!((plan.steps[0].angle - FRAC_PI_4).abs() < 1e-14);
        assert_eq!(plan.sink, p("ZZ"));
    }

    #[test]
    fn sequence_plan_rotates_set_to_sink() {
        let ops = [p("ZZ"), p("XI"), p("YZ")];
        let betas = random_betas(3, &mut ChaCha8Rng::seed_from_u64(5));
        let plan = build_sequence_plan(&ops, &betas).unwrap();
        assert!(conjugation_residual(2, &plan, &set_terms(&ops, &betas)) < 1e-10);
    }

    #[test]
    fn rejects_commuting_and_unnormalized_inputs() {
        assert!(matches!(
            build_sequence_plan(&[p("ZI"), p("IZ")], &[0.6, 0.8]),
            Err(RotationError::NotAnticommuting { first: 0, second: 1 })
        ));
        assert!(matches!(
            build_sequence_plan(&[p("X"), p("Z")], &[0.9, 0.9]),
            Err(RotationError::BetaNotNormalized { .. })
        ));
    }

    #[test]
    fn single_rotation_two_term_example() {
        // beta = (sin phi, cos phi) at phi = pi/6: axis i P_1 P_2, rotation
        // magnitude pi/6; the oracle fixes the sense of the rotation.
        let phi = FRAC_PI_6;
        let ops = [p("X"), p("Z")];
        let betas = [phi.sin(), phi.cos()];
        let plan = build_single_rotation_plan(&ops, &betas).unwrap();
        assert_eq!(plan.mode, RotationMode::Single);
        assert_eq!(plan.step_count(), 1);
        assert!((plan.steps[0].angle.abs() - phi).abs() < 1e-14);
        assert_eq!(plan.steps[0].generator.len(), 1);
        assert!(conjugation_residual(1, &plan, &set_terms(&ops, &betas)) < 1e-10);
    }

    #[test]
    fn single_rotation_degenerate_sink() {
        let plan = build_single_rotation_plan(&[p("X"), p("Z")], &[0.0, 1.0]).unwrap();
        assert_eq!(plan.step_count(), 0);
        assert_eq!(plan.sink, p("Z"));
    }

    #[test]
    fn single_rotation_three_terms() {
        let b = 1.0 / 3f64.sqrt();
        let ops = [p("X"), p("Y"), p("Z")];
        let betas = [b, b, b];
        let plan = build_single_rotation_plan(&ops, &betas).unwrap();
        assert_eq!(plan.steps[0].generator.len(), 2);
        assert!((plan.steps[0].angle.abs() - b.acos()).abs() < 1e-14);
        assert!(conjugation_residual(1, &plan, &set_terms(&ops, &betas)) < 1e-10);
    }

    #[test]
    fn generator_commutes_with_spectators() {
        // i P_s P_k commutes with every set member other than P_s, P_k.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ops = random_anticommuting_set(5, 6, &mut rng);
        let sink = 0;
        for k in 1..ops.len() {
            let generator = ops[sink].multiply(&ops[k]).unwrap().times_i_pow(1);
            for (j, op) in ops.iter().enumerate() {
                let commutes = generator.commutes(op).unwrap();
                assert_eq!(commutes, j != sink && j != k);
            }
        }
    }

    #[test]
    fn modes_agree_on_the_sink() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let size = rng.gen_range(2..=6);
            let ops = random_anticommuting_set(6, size, &mut rng);
            let betas = random_betas(size, &mut rng);
            let seq = build_sequence_plan(&ops, &betas).unwrap();
            let single = build_single_rotation_plan(&ops, &betas).unwrap();
            assert_eq!(seq.sink.bits_key(), single.sink.bits_key());
            let terms = set_terms(&ops, &betas);
            assert!(conjugation_residual(6, &seq, &terms) < 1e-10);
            assert!(conjugation_residual(6, &single, &terms) < 1e-10);
        }
    }

    #[test]
    fn negative_sink_coefficient_still_reaches_positive_root() {
        let ops = [p("X"), p("Z")];
        let betas = [0.6, -0.8];
        // Largest |beta| is the negative one; sink must come out +Z.
        let plan = build_sequence_plan(&ops, &betas).unwrap();
        assert_eq!(plan.sink.to_string(), "+Z");
        assert!(conjugation_residual(1, &plan, &set_terms(&ops, &betas)) < 1e-12);
    }

    #[test]
    fn plan_matrices_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..10 {
            let size = rng.gen_range(2..=5);
            let ops = random_anticommuting_set(4, size, &mut rng);
            let betas = random_betas(size, &mut rng);
            for plan in [
                build_sequence_plan(&ops, &betas).unwrap(),
                build_single_rotation_plan(&ops, &betas).unwrap(),
            ] {
                assert!(unitarity_residual(&plan_matrix(4, &plan)) < 1e-10);
            }
        }
    }

    #[test]
    fn single_mode_axis_squares_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let ops = random_anticommuting_set(5, 5, &mut rng);
        let betas = random_betas(5, &mut rng);
        let plan = build_single_rotation_plan(&ops, &betas).unwrap();
        let axis = pauli_sum_matrix(5, &plan.steps[0].generator);
        let identity = crate::simulator::identity_matrix(5);
        assert!(frobenius_distance(&axis.dot(&axis), &identity) < 1e-10);
    }

    #[test]
    fn apply_plan_matches_plan_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let ops = random_anticommuting_set(3, 3, &mut rng);
        let betas = random_betas(3, &mut rng);
        let plan = build_sequence_plan(&ops, &betas).unwrap();
        let u = plan_matrix(3, &plan);
        let state = random_state(3, &mut rng);
        let direct = apply_plan(&plan, &state);
        for (r, amp) in direct.iter().enumerate() {
            let mut row = Complex64::new(0.0, 0.0);
            for (c, v) in state.iter().enumerate() {
                row += u[[r, c]] * v;
            }
            assert!((row - amp).norm() < 1e-12);
        }
        // R then R dagger is the identity on states.
        let back = apply_plan_dagger(&plan, &direct);
        for (orig, round) in state.iter().zip(back) {
            assert!((orig - round).norm() < 1e-12);
        }
        let _ = to_matrix(&plan.sink);
    }
}
