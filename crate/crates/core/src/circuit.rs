//! Gate-count accounting for sequence plans and budget-driven set splitting.
//!
//! Each sequence step `exp(-i theta/2 P)` compiles to the standard template:
//! basis changes onto the Z axis for X/Y factors, a CNOT ladder onto the
//! last support qubit, one Z rotation, then the mirror image. A step whose
//! generator has weight w therefore costs `2(w-1)` CNOTs, one rotation, and
//! two basis-change gates per non-Z factor. [`budgeted_split`] counts gates
//! after a peephole pass that cancels adjacent inverse pairs, moving through
//! commuting gates where necessary, and halves any set whose circuit
//! exceeds the budget until every plan fits or the sets are singletons.

use serde::Serialize;

use crate::hamiltonian::PauliHamiltonian;
use crate::partition::{chunk_evenly, AnticommutingPartition, PartitionError};
use crate::pauli::{PauliLetter, PauliString};
use crate::rotation::{build_sequence_plan, RotationError, RotationMode, RotationPlan};

/// Gate totals for one plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircuitEstimate {
    pub per_step_gates: Vec<usize>,
    pub total_gates: usize,
    pub cnot_count: usize,
    pub single_qubit_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    /// Hadamard, the X-basis change; self-inverse.
    H(usize),
    /// Y-basis change and its inverse.
    YIn(usize),
    YOut(usize),
    /// (control, target).
    Cnot(usize, usize),
    /// Z rotation; angles are arbitrary so it never cancels.
    Rz(usize),
}

impl Gate {
    fn is_cnot(self) -> bool {
        matches!(self, Gate::Cnot(_, _))
    }

    fn qubits(self) -> (usize, Option<usize>) {
        match self {
            Gate::H(q) | Gate::YIn(q) | Gate::YOut(q) | Gate::Rz(q) => (q, None),
            Gate::Cnot(c, t) => (c, Some(t)),
        }
    }

    fn touches(self, q: usize) -> bool {
        let (a, b) = self.qubits();
        a == q || b == Some(q)
    }
}

fn inverse_pair(a: Gate, b: Gate) -> bool {
    match (a, b) {
        (Gate::H(p), Gate::H(q)) => p == q,
        (Gate::YIn(p), Gate::YOut(q)) | (Gate::YOut(p), Gate::YIn(q)) => p == q,
        (Gate::Cnot(c1, t1), Gate::Cnot(c2, t2)) => c1 == c2 && t1 == t2,
        _ => false,
    }
}

fn gates_commute(a: Gate, b: Gate) -> bool {
    let disjoint = {
        let (a0, a1) = a.qubits();
        !b.touches(a0) && a1.map_or(true, |q| !b.touches(q))
    };
    if disjoint {
        return true;
    }
    match (a, b) {
        // CNOTs commute unless a control meets a target.
        (Gate::Cnot(c1, t1), Gate::Cnot(c2, t2)) => t1 != c2 && c1 != t2,
        // A Z rotation is diagonal on a CNOT control.
        (Gate::Rz(q), Gate::Cnot(c, _)) | (Gate::Cnot(c, _), Gate::Rz(q)) => q == c,
        (Gate::Rz(_), Gate::Rz(_)) => true,
        _ => false,
    }
}

/// Gate sequence of a sequence-mode plan, each gate tagged with the index of
/// the step that emitted it. Zero-angle steps emit nothing.
pub fn plan_gates(plan: &RotationPlan) -> Result<Vec<(usize, Gate)>, RotationError> {
    if plan.mode != RotationMode::Sequence {
        return Err(RotationError::SingleModeGateCount);
    }
    let mut gates = Vec::new();
    for (step_idx, step) in plan.steps.iter().enumerate() {
        let generator = &step.generator[0].1;
        let support = generator.support();
        if support.is_empty() || step.angle == 0.0 {
            continue;
        }
        emit_step(generator, &support, step_idx, &mut gates);
    }
    Ok(gates)
}

fn emit_step(
    generator: &PauliString,
    support: &[usize],
    step_idx: usize,
    gates: &mut Vec<(usize, Gate)>,
) {
    let basis_in = |q: usize| match generator.letter(q) {
        PauliLetter::X => Some(Gate::H(q)),
        PauliLetter::Y => Some(Gate::YIn(q)),
        _ => None,
    };
    for &q in support {
        if let Some(g) = basis_in(q) {
            gates.push((step_idx, g));
        }
    }
    let target = *support.last().unwrap();
    for pair in support.windows(2) {
        gates.push((step_idx, Gate::Cnot(pair[0], pair[1])));
    }
    gates.push((step_idx, Gate::Rz(target)));
    for pair in support.windows(2).rev() {
        gates.push((step_idx, Gate::Cnot(pair[0], pair[1])));
    }
    for &q in support {
        match generator.letter(q) {
            PauliLetter::X => gates.push((step_idx, Gate::H(q))),
            PauliLetter::Y => gates.push((step_idx, Gate::YOut(q))),
            _ => {}
        }
    }
}

/// Peephole pass: cancels adjacent inverse pairs, scanning back through
/// commuting gates.
pub fn cancel_adjacent(gates: &[(usize, Gate)]) -> Vec<(usize, Gate)> {
    let mut out: Vec<(usize, Gate)> = Vec::with_capacity(gates.len());
    for &(step, gate) in gates {
        let mut cancelled = false;
        let mut i = out.len();
        while i > 0 {
            let (_, prev) = out[i - 1];
            if inverse_pair(prev, gate) {
                out.remove(i - 1);
                cancelled = true;
                break;
            }
            if gates_commute(prev, gate) {
                i -= 1;
                continue;
            }
            break;
        }
        if !cancelled {
            out.push((step, gate));
        }
    }
    out
}

fn estimate_from_gates(step_count: usize, gates: &[(usize, Gate)]) -> CircuitEstimate {
    let mut per_step_gates = vec![0usize; step_count];
    let mut cnot_count = 0;
    let mut single_qubit_count = 0;
    for &(step, gate) in gates {
        per_step_gates[step] += 1;
        if gate.is_cnot() {
            cnot_count += 1;
        } else {
            single_qubit_count += 1;
        }
    }
    CircuitEstimate {
        per_step_gates,
        total_gates: gates.len(),
        cnot_count,
        single_qubit_count,
    }
}

/// Template gate counts without cancellation: a weight-w generator costs
/// `2(w-1)` CNOTs, one rotation, and two basis gates per non-Z factor.
/// Errors on single-mode plans, which have no direct compilation here.
pub fn gate_count(plan: &RotationPlan) -> Result<CircuitEstimate, RotationError> {
    if plan.mode != RotationMode::Sequence {
        return Err(RotationError::SingleModeGateCount);
    }
    let mut per_step_gates = Vec::with_capacity(plan.steps.len());
    let mut cnot_count = 0;
    let mut single_qubit_count = 0;
    for step in &plan.steps {
        let generator = &step.generator[0].1;
        let w = generator.weight();
        if w == 0 {
            per_step_gates.push(0);
            continue;
        }
        let non_z = generator
            .support()
            .iter()
            .filter(|&&q| generator.letter(q) != PauliLetter::Z)
            .count();
        let cnots = 2 * (w - 1);
        let singles = 1 + 2 * non_z;
        cnot_count += cnots;
        single_qubit_count += singles;
        per_step_gates.push(cnots + singles);
    }
    Ok(CircuitEstimate {
        per_step_gates,
        total_gates: cnot_count + single_qubit_count,
        cnot_count,
        single_qubit_count,
    })
}

/// Gate counts after the cancellation pass; this is what budgets compare
/// against.
pub fn cancelled_gate_count(plan: &RotationPlan) -> Result<CircuitEstimate, RotationError> {
    let gates = cancel_adjacent(&plan_gates(plan)?);
    Ok(estimate_from_gates(plan.steps.len(), &gates))
}

#[derive(Debug, Error)]
pub enum BudgetError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Rotation(#[from] RotationError),
}

use thiserror::Error;

/// Recursively halves every set whose cancelled sequence-plan gate count
/// exceeds `max_gates` until all plans fit or the sets are singletons.
/// Returns the refined partition with one plan and one estimate per set.
pub fn budgeted_split(
    partition: &AnticommutingPartition,
    h: &PauliHamiltonian,
    max_gates: usize,
) -> Result<(AnticommutingPartition, Vec<RotationPlan>, Vec<CircuitEstimate>), BudgetError> {
    let mut final_sets: Vec<Vec<usize>> = Vec::new();
    let mut plans: Vec<RotationPlan> = Vec::new();
    let mut estimates: Vec<CircuitEstimate> = Vec::new();

    for set in partition.sets() {
        split_recursive(set, h, max_gates, &mut final_sets, &mut plans, &mut estimates)?;
    }
    for (index, plan) in plans.iter_mut().enumerate() {
        plan.set_index = index;
    }
    let refined = AnticommutingPartition::from_index_sets(h, final_sets)?;
    Ok((refined, plans, estimates))
}

fn split_recursive(
    set: &[usize],
    h: &PauliHamiltonian,
    max_gates: usize,
    final_sets: &mut Vec<Vec<usize>>,
    plans: &mut Vec<RotationPlan>,
    estimates: &mut Vec<CircuitEstimate>,
) -> Result<(), BudgetError> {
    let ops: Vec<PauliString> = set.iter().map(|&i| h.operator(i).clone()).collect();
    let gamma = set.iter().map(|&i| h.coefficient(i).powi(2)).sum::<f64>().sqrt();
    let betas: Vec<f64> = set.iter().map(|&i| h.coefficient(i) / gamma).collect();
    let plan = build_sequence_plan(&ops, &betas)?;
    let estimate = cancelled_gate_count(&plan)?;
    if estimate.total_gates <= max_gates || set.len() == 1 {
        final_sets.push(set.to_vec());
        plans.push(plan);
        estimates.push(estimate);
        return Ok(());
    }
    for half in chunk_evenly(set, 2) {
        split_recursive(&half, h, max_gates, final_sets, plans, estimates)?;
    }
    Ok(())
}
