//! Dense statevector/matrix oracle for desk-scale verification.
//!
//! Matrices are built by Kronecker accumulation of 2x2 factors with qubit 0
//! as the most significant index bit. The module also provides matrix-free
//! application of Pauli strings, Pauli sums, and rotation plans to state
//! vectors; residual norms over all basis columns give Frobenius distances
//! without ever forming an operator product, which keeps the oracle usable
//! at ten qubits inside large verification loops.
//!
//! The dense size cap is twelve qubits. Everything here is pure
//! construction; callers may parallelize across independent checks.

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

use crate::hamiltonian::PauliHamiltonian;
use crate::pauli::{PauliLetter, PauliString};
use crate::rotation::{RotationPlan, RotationStep};

/// Hard cap on dense operator size (matrices are 2^n x 2^n).
pub const MAX_DENSE_QUBITS: usize = 12;

pub type DenseOperator = Array2<Complex64>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SimulatorError {
    #[error("{n_qubits} qubits exceed the dense cap of {MAX_DENSE_QUBITS}")]
    TooManyQubits { n_qubits: usize },
    #[error("state dimension {found} does not match operator dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state norm {norm} is not 1 within 1e-10")]
    NotNormalized { norm: f64 },
    #[error("imaginary residue {value} in expectation of Hermitian operator")]
    ImaginaryResidue { value: f64 },
}

/// Checks the dense size cap, for callers that need a recoverable error.
pub fn ensure_dense_cap(n_qubits: usize) -> Result<(), SimulatorError> {
    if n_qubits > MAX_DENSE_QUBITS {
        return Err(SimulatorError::TooManyQubits { n_qubits });
    }
    Ok(())
}

fn phase_factor(exp: u8) -> Complex64 {
    match exp % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn letter_matrix(letter: PauliLetter) -> Array2<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match letter {
        PauliLetter::I => ndarray::array![[one, z], [z, one]],
        PauliLetter::X => ndarray::array![[z, one], [one, z]],
        PauliLetter::Y => ndarray::array![[z, -i], [i, z]],
        PauliLetter::Z => ndarray::array![[one, z], [z, -one]],
    }
}

fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    ndarray::linalg::kron(a, b)
}

/// Exact matrix of a Pauli string, phase included.
///
/// Panics if the string exceeds [`MAX_DENSE_QUBITS`].
pub fn to_matrix(p: &PauliString) -> DenseOperator {
    assert!(
        p.n_qubits() <= MAX_DENSE_QUBITS,
        "dense cap exceeded: {} qubits",
        p.n_qubits()
    );
    let mut m = Array2::from_elem((1, 1), phase_factor(p.phase_rel()));
    for q in 0..p.n_qubits() {
        m = kron(&m, &letter_matrix(p.letter(q)));
    }
    m
}

pub fn identity_matrix(n_qubits: usize) -> DenseOperator {
    Array2::from_diag_elem(1 << n_qubits, Complex64::new(1.0, 0.0))
}

/// Matrix of a real-weighted Pauli sum.
pub fn pauli_sum_matrix(n_qubits: usize, terms: &[(f64, PauliString)]) -> DenseOperator {
    let dim = 1usize << n_qubits;
    let mut m = Array2::from_elem((dim, dim), Complex64::new(0.0, 0.0));
    for (coeff, op) in terms {
        m = m + to_matrix(op).mapv(|v| v * *coeff);
    }
    m
}

/// Matrix of a Hamiltonian including its identity offset.
pub fn hamiltonian_matrix(h: &PauliHamiltonian) -> DenseOperator {
    let mut m = pauli_sum_matrix(h.n_qubits(), h.terms());
    let offset = Complex64::new(h.identity_offset(), 0.0);
    for d in 0..m.nrows() {
        m[[d, d]] += offset;
    }
    m
}

fn step_matrix(n_qubits: usize, step: &RotationStep) -> DenseOperator {
    let half = step.angle / 2.0;
    let generator = pauli_sum_matrix(n_qubits, &step.generator);
    let mut m = generator.mapv(|v| v * Complex64::new(0.0, -half.sin()));
    let c = Complex64::new(half.cos(), 0.0);
    for d in 0..m.nrows() {
        m[[d, d]] += c;
    }
    m
}

/// Matrix of a rotation plan: steps compose right-to-left, the first listed
/// step acting first, each as `exp(-i angle/2 * generator)` with a
/// self-inverse generator.
pub fn plan_matrix(n_qubits: usize, plan: &RotationPlan) -> DenseOperator {
    let mut m = identity_matrix(n_qubits);
    for step in &plan.steps {
        m = step_matrix(n_qubits, step).dot(&m);
    }
    m
}

pub fn frobenius_norm(m: &DenseOperator) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_distance(a: &DenseOperator, b: &DenseOperator) -> f64 {
    frobenius_norm(&(a - b))
}

/// `||U^† U - I||_F`, zero for unitary plans.
pub fn unitarity_residual(u: &DenseOperator) -> f64 {
    let udag = u.t().mapv(|v| v.conj());
    frobenius_distance(&udag.dot(u), &identity_matrix_like(u))
}

fn identity_matrix_like(u: &DenseOperator) -> DenseOperator {
    Array2::from_diag_elem(u.nrows(), Complex64::new(1.0, 0.0))
}

/// Real part of `<psi|O|psi>`; errors if the state is unnormalized, the
/// dimensions disagree, or the imaginary residue exceeds 1e-8.
pub fn expectation(op: &DenseOperator, state: &[Complex64]) -> Result<f64, SimulatorError> {
    if op.nrows() != state.len() {
        return Err(SimulatorError::DimensionMismatch {
            expected: op.nrows(),
            found: state.len(),
        });
    }
    check_normalized(state)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (r, amp) in state.iter().enumerate() {
        let mut row = Complex64::new(0.0, 0.0);
        for (c, v) in state.iter().enumerate() {
            row += op[[r, c]] * v;
        }
        acc += amp.conj() * row;
    }
    if acc.im.abs() > 1e-8 {
        return Err(SimulatorError::ImaginaryResidue { value: acc.im });
    }
    Ok(acc.re)
}

fn check_normalized(state: &[Complex64]) -> Result<(), SimulatorError> {
    let norm = state.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(SimulatorError::NotNormalized { norm });
    }
    Ok(())
}

fn index_masks(p: &PauliString) -> (usize, usize) {
    // Qubit q occupies index bit (n-1-q): qubit 0 is most significant.
    let n = p.n_qubits();
    let mut x_mask = 0usize;
    let mut z_mask = 0usize;
    for q in 0..n {
        if p.x_bit(q) {
            x_mask |= 1 << (n - 1 - q);
        }
        if p.z_bit(q) {
            z_mask |= 1 << (n - 1 - q);
        }
    }
    (x_mask, z_mask)
}

/// Applies a Pauli string to a state vector without forming its matrix.
pub fn apply_pauli(p: &PauliString, state: &[Complex64]) -> Vec<Complex64> {
    let (x_mask, z_mask) = index_masks(p);
    let phase = phase_factor(p.phase_exp());
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for (target, slot) in out.iter_mut().enumerate() {
        let source = target ^ x_mask;
        let sign = if ((source & z_mask).count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
        *slot = phase * sign * state[source];
    }
    out
}

pub fn apply_pauli_sum(terms: &[(f64, PauliString)], state: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for (coeff, op) in terms {
        let applied = apply_pauli(op, state);
        for (o, a) in out.iter_mut().zip(applied) {
            *o += a * *coeff;
        }
    }
    out
}

fn apply_step(step: &RotationStep, sign: f64, state: &[Complex64]) -> Vec<Complex64> {
    let half = sign * step.angle / 2.0;
    let rotated = apply_pauli_sum(&step.generator, state);
    let c = Complex64::new(half.cos(), 0.0);
    let s = Complex64::new(0.0, -half.sin());
    state
        .iter()
        .zip(rotated)
        .map(|(orig, rot)| c * orig + s * rot)
        .collect()
}

/// Applies the plan unitary `R` to a state.
pub fn apply_plan(plan: &RotationPlan, state: &[Complex64]) -> Vec<Complex64> {
    let mut s = state.to_vec();
    for step in &plan.steps {
        s = apply_step(step, 1.0, &s);
    }
    s
}

/// Applies `R^†` to a state.
pub fn apply_plan_dagger(plan: &RotationPlan, state: &[Complex64]) -> Vec<Complex64> {
    let mut s = state.to_vec();
    for step in plan.steps.iter().rev() {
        s = apply_step(step, -1.0, &s);
    }
    s
}

/// `||R H_S R^† - sink||_F` computed column by column, where `H_S` is the
/// weighted sum of the set operators. Exact up to float rounding and never
/// materializes an operator product.
pub fn conjugation_residual(
    n_qubits: usize,
    plan: &RotationPlan,
    set_terms: &[(f64, PauliString)],
) -> f64 {
    let dim = 1usize << n_qubits;
    let mut acc = 0.0;
    let mut basis = vec![Complex64::new(0.0, 0.0); dim];
    for col in 0..dim {
        basis[col] = Complex64::new(1.0, 0.0);
        let back = apply_plan_dagger(plan, &basis);
        let mid = apply_pauli_sum(set_terms, &back);
        let fwd = apply_plan(plan, &mid);
        let sink_col = apply_pauli(&plan.sink, &basis);
        acc += fwd
            .iter()
            .zip(sink_col)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>();
        basis[col] = Complex64::new(0.0, 0.0);
    }
    acc.sqrt()
}

/// `||sum_l gamma_l R_l^† P_l R_l - H||_F`: the rebuilt operator of a
/// partition-plus-plans bundle against the original Hamiltonian, column by
/// column. The identity offset carries over unchanged and is excluded.
pub fn reconstruction_residual(
    h: &PauliHamiltonian,
    partition: &crate::partition::AnticommutingPartition,
    plans: &[RotationPlan],
) -> f64 {
    let dim = 1usize << h.n_qubits();
    let mut acc = 0.0;
    let mut basis = vec![Complex64::new(0.0, 0.0); dim];
    for col in 0..dim {
        basis[col] = Complex64::new(1.0, 0.0);
        let mut rebuilt = vec![Complex64::new(0.0, 0.0); dim];
        for (plan, &gamma) in plans.iter().zip(partition.gammas()) {
            let fwd = apply_plan(plan, &basis);
            let sunk = apply_pauli(&plan.sink, &fwd);
            let back = apply_plan_dagger(plan, &sunk);
            for (slot, v) in rebuilt.iter_mut().zip(back) {
                *slot += v * gamma;
            }
        }
        let original = apply_pauli_sum(h.terms(), &basis);
        acc += rebuilt
            .iter()
            .zip(original)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>();
        basis[col] = Complex64::new(0.0, 0.0);
    }
    acc.sqrt()
}

/// Uniformly seeded normalized random state, for verification paths.
pub fn random_state(n_qubits: usize, rng: &mut impl rand::Rng) -> Vec<Complex64> {
    let dim = 1usize << n_qubits;
    let mut state: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = state.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    for v in &mut state {
        *v /= norm;
    }
    state
}
