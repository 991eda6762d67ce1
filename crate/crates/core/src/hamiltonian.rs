//! Hamiltonian container, text IO, norms, and term bookkeeping.
//!
//! A [`PauliHamiltonian`] is a canonicalized list of real-weighted Hermitian
//! Pauli words: duplicate words are merged, signs are folded into the
//! coefficients, the identity is routed to a separate offset, terms with
//! |coefficient| below [`DROP_TOLERANCE`] are removed, and the remaining
//! terms are ordered by descending |coefficient| with lexicographic
//! tie-breaking so downstream coloring is deterministic.
//!
//! The text interchange format is one `coefficient word` pair per line,
//! `#` comments and blank lines allowed.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::pauli::{PauliError, PauliString};

/// Coefficients at or below this magnitude are dropped after merging.
pub const DROP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum HamiltonianError {
    #[error("line {line}: malformed coefficient {token:?}")]
    MalformedCoefficient { line: usize, token: String },
    #[error("line {line}: {source}")]
    InvalidWord { line: usize, source: PauliError },
    #[error("line {line}: word has {found} qubits, expected {expected}")]
    InconsistentLength { line: usize, expected: usize, found: usize },
    #[error("line {line}: imaginary phase prefix is not allowed on Hamiltonian terms")]
    ImaginaryPhase { line: usize },
    #[error("line {line}: expected `coefficient word`")]
    MalformedLine { line: usize },
    #[error("input contains no terms; qubit count cannot be inferred")]
    EmptyInput,
    #[error("term operator carries an imaginary phase and cannot be made Hermitian")]
    NonHermitianTerm,
    #[error("term on {found} qubits in a {expected}-qubit Hamiltonian")]
    MixedQubitCounts { expected: usize, found: usize },
}

/// Ordered list of real-weighted Pauli terms plus an identity offset.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliHamiltonian {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
    identity_offset: f64,
}

impl PauliHamiltonian {
    /// Canonicalizes an arbitrary term list: folds signs, merges duplicate
    /// words, routes identities to the offset, drops dust, sorts.
    pub fn new(
        n_qubits: usize,
        terms: Vec<(f64, PauliString)>,
        identity_offset: f64,
    ) -> Result<Self, HamiltonianError> {
        let mut offset = identity_offset;
        let mut merged: HashMap<(Vec<u64>, Vec<u64>), (f64, PauliString)> = HashMap::new();
        for (coeff, op) in terms {
            if op.n_qubits() != n_qubits {
                return Err(HamiltonianError::MixedQubitCounts {
                    expected: n_qubits,
                    found: op.n_qubits(),
                });
            }
            let signed = match op.phase_rel() {
                0 => coeff,
                2 => -coeff,
                _ => return Err(HamiltonianError::NonHermitianTerm),
            };
            if op.is_identity_word() {
                offset += signed;
                continue;
            }
            let entry = merged
                .entry(op.bits_key())
                .or_insert_with(|| (0.0, op.canonical()));
            entry.0 += signed;
        }
        let mut terms: Vec<(f64, PauliString)> = merged
            .into_values()
            .filter(|(c, _)| c.abs() >= DROP_TOLERANCE)
            .collect();
        terms.sort_by(|a, b| {
            b.0.abs()
                .partial_cmp(&a.0.abs())
                .unwrap()
                .then_with(|| a.1.cmp_bits(&b.1))
        });
        Ok(PauliHamiltonian { n_qubits, terms, identity_offset: offset })
    }

    /// Parses the line-based text format; qubit count is inferred from the
    /// first word.
    pub fn parse(text: &str) -> Result<Self, HamiltonianError> {
        let mut terms: Vec<(f64, PauliString)> = Vec::new();
        let mut n_qubits: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut parts = content.split_whitespace();
            let (coeff_token, word_token) = match (parts.next(), parts.next(), parts.next()) {
                (Some(c), Some(w), None) => (c, w),
                _ => return Err(HamiltonianError::MalformedLine { line }),
            };
            let coeff: f64 = coeff_token
                .parse()
                .map_err(|_| HamiltonianError::MalformedCoefficient {
                    line,
                    token: coeff_token.to_string(),
                })?;
            let op: PauliString = word_token
                .parse()
                .map_err(|source| HamiltonianError::InvalidWord { line, source })?;
            if op.phase_rel() % 2 != 0 {
                return Err(HamiltonianError::ImaginaryPhase { line });
            }
            let expected = *n_qubits.get_or_insert(op.n_qubits());
            if op.n_qubits() != expected {
                return Err(HamiltonianError::InconsistentLength {
                    line,
                    expected,
                    found: op.n_qubits(),
                });
            }
            terms.push((coeff, op));
        }
        let n_qubits = n_qubits.ok_or(HamiltonianError::EmptyInput)?;
        PauliHamiltonian::new(n_qubits, terms, 0.0)
    }

    /// Text form that round-trips bit-exactly through [`parse`].
    ///
    /// [`parse`]: PauliHamiltonian::parse
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if self.identity_offset != 0.0 {
            let identity = PauliString::identity(self.n_qubits);
            writeln!(out, "{:.16e} {}", self.identity_offset, identity.word()).unwrap();
        }
        for (coeff, op) in &self.terms {
            writeln!(out, "{:.16e} {}", coeff, op.word()).unwrap();
        }
        out
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Non-identity terms in canonical order.
    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn identity_offset(&self) -> f64 {
        self.identity_offset
    }

    pub fn coefficient(&self, index: usize) -> f64 {
        self.terms[index].0
    }

    pub fn operator(&self, index: usize) -> &PauliString {
        &self.terms[index].1
    }

    /// l1 norm of the non-identity coefficients.
    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// Map from phase-insensitive bit keys to canonical term indices.
    pub fn bits_index(&self) -> HashMap<(Vec<u64>, Vec<u64>), usize> {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, (_, op))| (op.bits_key(), i))
            .collect()
    }

    /// Canonical index of the term with the same bits, if present.
    pub fn find_term(&self, op: &PauliString) -> Option<usize> {
        let key = op.bits_key();
        self.terms.iter().position(|(_, t)| t.bits_key() == key)
    }
}
