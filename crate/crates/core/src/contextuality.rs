//! Noncontextuality test and reduction of noncontextual Hamiltonians to
//! effective commuting Hamiltonians.
//!
//! A term set is noncontextual when, after removing the terms that commute
//! with everything (the Z class), commutation is an equivalence relation on
//! the remainder: it then splits into cliques with pairwise anticommutation
//! across cliques. Selecting one remaining element per clique yields the
//! completely anticommuting hitting sets D_j, each of which is rotated onto
//! its representative in a largest clique C_1. The resulting Hamiltonian has
//! terms Z u C_1, all pairwise commuting. It is not unitarily equivalent to
//! the input (each D_j gets its own rotation); the contract is the
//! per-set prepare-and-measure expectation identity.

use thiserror::Error;

use crate::hamiltonian::{HamiltonianError, PauliHamiltonian};
use crate::rotation::{
    build_sequence_plan_with_sink, build_single_rotation_plan_with_sink, RotationError,
    RotationMode, RotationPlan,
};

#[derive(Debug, Error)]
pub enum ContextualityError {
    #[error(
        "Hamiltonian is contextual: terms {a}, {b}, {c} violate transitivity of commutation"
    )]
    Contextual { a: usize, b: usize, c: usize },
    #[error(transparent)]
    Rotation(#[from] RotationError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

/// Clique structure of a noncontextual term set.
#[derive(Debug, Clone)]
pub struct NoncontextualStructure {
    /// Terms commuting with all other terms.
    pub z_terms: Vec<usize>,
    /// Commutation cliques of the remainder; `cliques[0]` is a largest one.
    pub cliques: Vec<Vec<usize>>,
    /// Hitting sets D_j, one remaining element per clique; all pairwise
    /// anticommuting, disjoint, covering the union of the cliques.
    pub hitting_sets: Vec<Vec<usize>>,
}

fn commute_matrix(h: &PauliHamiltonian) -> Vec<Vec<bool>> {
    let m = h.term_count();
    let mut rows = vec![vec![false; m]; m];
    for a in 0..m {
        rows[a][a] = true;
        for b in (a + 1)..m {
            let commutes = h.operator(a).commutes(h.operator(b)).unwrap();
            rows[a][b] = commutes;
            rows[b][a] = commutes;
        }
    }
    rows
}

fn z_class(rows: &[Vec<bool>]) -> Vec<bool> {
    rows.iter().map(|row| row.iter().all(|&c| c)).collect()
}

/// First triple of non-Z terms violating transitivity of commutation, if
/// any: a ~ b and b ~ c but not a ~ c.
pub fn find_violating_triple(h: &PauliHamiltonian) -> Option<(usize, usize, usize)> {
    let rows = commute_matrix(h);
    let in_z = z_class(&rows);
    let t: Vec<usize> = (0..h.term_count()).filter(|&i| !in_z[i]).collect();
    for &a in &t {
        for &b in &t {
            if b == a || !rows[a][b] {
                continue;
            }
            for &c in &t {
                if c == a || c == b {
                    continue;
                }
                if rows[b][c] && !rows[a][c] {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// True iff commutation restricted to the non-universal terms is an
/// equivalence relation, checked over all triples.
pub fn is_noncontextual(h: &PauliHamiltonian) -> bool {
    find_violating_triple(h).is_none()
}

/// Splits a noncontextual term set into the Z class, commutation cliques,
/// and hitting sets. The largest clique comes first (ties broken toward
/// the lowest canonical index) and elements are taken in index order.
pub fn decompose(h: &PauliHamiltonian) -> Result<NoncontextualStructure, ContextualityError> {
    if let Some((a, b, c)) = find_violating_triple(h) {
        return Err(ContextualityError::Contextual { a, b, c });
    }
    let rows = commute_matrix(h);
    let in_z = z_class(&rows);
    let z_terms: Vec<usize> = (0..h.term_count()).filter(|&i| in_z[i]).collect();

    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let mut assigned = vec![false; h.term_count()];
    for i in 0..h.term_count() {
        if in_z[i] || assigned[i] {
            continue;
        }
        let mut clique = vec![i];
        assigned[i] = true;
        for j in (i + 1)..h.term_count() {
            if !in_z[j] && !assigned[j] && rows[i][j] {
                clique.push(j);
                assigned[j] = true;
            }
        }
        cliques.push(clique);
    }
    // Largest clique first; ties go to the lowest leading index.
    cliques.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));

    let hitting_sets = match cliques.first() {
        None => vec![],
        Some(largest) => (0..largest.len())
            .map(|j| cliques.iter().filter_map(|c| c.get(j).copied()).collect())
            .collect(),
    };
    Ok(NoncontextualStructure { z_terms, cliques, hitting_sets })
}

/// Rotates every hitting set onto its representative in the largest clique
/// and returns the commuting Hamiltonian (terms Z u C_1) with the rotation
/// plans, one per hitting set.
///
/// The coefficient attached to each C_1 representative is the signed l2
/// weight of its hitting set, so the expectation identity
/// `<H> = sum_Z alpha <P> + sum_j gamma_j <R_j^† C_1j R_j>` holds exactly.
pub fn reduce_to_commuting(
    h: &PauliHamiltonian,
    mode: RotationMode,
) -> Result<(PauliHamiltonian, Vec<RotationPlan>), ContextualityError> {
    let structure = decompose(h)?;
    let mut out_terms: Vec<(f64, crate::pauli::PauliString)> = structure
        .z_terms
        .iter()
        .map(|&i| (h.coefficient(i), h.operator(i).clone()))
        .collect();
    let mut plans = Vec::with_capacity(structure.hitting_sets.len());
    for (j, d) in structure.hitting_sets.iter().enumerate() {
        let representative = structure.cliques[0][j];
        let ops: Vec<crate::pauli::PauliString> =
            d.iter().map(|&i| h.operator(i).clone()).collect();
        let gamma = d.iter().map(|&i| h.coefficient(i).powi(2)).sum::<f64>().sqrt();
        let betas: Vec<f64> = d.iter().map(|&i| h.coefficient(i) / gamma).collect();
        let sink_position = d.iter().position(|&i| i == representative).unwrap();
        let mut plan = match mode {
            RotationMode::Sequence => build_sequence_plan_with_sink(&ops, &betas, sink_position)?,
            RotationMode::Single => {
                build_single_rotation_plan_with_sink(&ops, &betas, sink_position)?
            }
        };
        plan.set_index = j;
        // The plan's sink may carry a sign (a one-element set with a
        // negative coefficient); fold it into gamma so that
        // gamma_j * C_1j == gamma * sink as operators.
        let signed_gamma = if plan.sink.phase_rel() == 2 { -gamma } else { gamma };
        out_terms.push((signed_gamma, h.operator(representative).clone()));
        plans.push(plan);
    }
    let reduced = PauliHamiltonian::new(h.n_qubits(), out_terms, h.identity_offset())?;
    Ok((reduced, plans))
}
