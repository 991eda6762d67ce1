//! Exact n-qubit Pauli algebra over a packed symplectic binary representation.
//!
//! A [`PauliString`] stores the X and Z components of an n-qubit Pauli
//! operator as packed bit vectors together with a global phase exponent:
//! the represented operator is `i^phase_exp · X^x Z^z` (qubit-wise product,
//! X applied after Z). A Y factor on qubit q is `x_q = z_q = 1` with one
//! factor of i absorbed into the exponent, so the Hermitian word `Y` is
//! stored with `phase_exp = 1`. This keeps multiplication a single
//! word-wise rule with no per-qubit case analysis.
//!
//! Strings are immutable after construction and all operations are pure,
//! so values can be shared freely across threads.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

const WORD_BITS: usize = 64;

/// Errors from Pauli-string construction and arithmetic.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PauliError {
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid Pauli character {found:?} at position {position}")]
    InvalidCharacter { found: char, position: usize },
    #[error("empty Pauli word")]
    EmptyWord,
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliLetter::I),
            'X' => Some(PauliLetter::X),
            'Y' => Some(PauliLetter::Y),
            'Z' => Some(PauliLetter::Z),
            _ => None,
        }
    }

    fn to_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    /// (x bit, z bit) of the letter.
    fn bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }
}

/// An n-qubit Pauli operator `i^phase_exp · X^x Z^z` with packed bit vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x_bits: Vec<u64>,
    z_bits: Vec<u64>,
    phase_exp: u8,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// Number of positions set in both packed vectors.
fn and_popcount(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

impl PauliString {
    /// The identity on `n_qubits` qubits.
    pub fn identity(n_qubits: usize) -> Self {
        let words = words_for(n_qubits);
        PauliString {
            n_qubits,
            x_bits: vec![0; words],
            z_bits: vec![0; words],
            phase_exp: 0,
        }
    }

    /// Builds the canonical (positive-phase Hermitian) word from letters.
    pub fn from_letters(letters: &[PauliLetter]) -> Result<Self, PauliError> {
        if letters.is_empty() {
            return Err(PauliError::EmptyWord);
        }
        let mut p = PauliString::identity(letters.len());
        for (q, &letter) in letters.iter().enumerate() {
            let (x, z) = letter.bits();
            p.set_bit_x(q, x);
            p.set_bit_z(q, z);
            if letter == PauliLetter::Y {
                p.phase_exp = (p.phase_exp + 1) % 4;
            }
        }
        Ok(p)
    }

    /// Single non-identity letter on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, letter: PauliLetter) -> Result<Self, PauliError> {
        if qubit >= n_qubits {
            return Err(PauliError::QubitOutOfRange { index: qubit, n_qubits });
        }
        let mut letters = vec![PauliLetter::I; n_qubits];
        letters[qubit] = letter;
        PauliString::from_letters(&letters)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Phase exponent of the stored `i^phase_exp · X^x Z^z` form.
    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    fn set_bit_x(&mut self, q: usize, v: bool) {
        if v {
            self.x_bits[q / WORD_BITS] |= 1u64 << (q % WORD_BITS);
        }
    }

    fn set_bit_z(&mut self, q: usize, v: bool) {
        if v {
            self.z_bits[q / WORD_BITS] |= 1u64 << (q % WORD_BITS);
        }
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.x_bits[q / WORD_BITS] >> (q % WORD_BITS) & 1 != 0
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.z_bits[q / WORD_BITS] >> (q % WORD_BITS) & 1 != 0
    }

    pub fn letter(&self, q: usize) -> PauliLetter {
        match (self.x_bit(q), self.z_bit(q)) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    /// Number of qubits carrying a Y factor.
    pub fn y_count(&self) -> usize {
        and_popcount(&self.x_bits, &self.z_bits) as usize
    }

    /// Number of qubits with a non-identity factor.
    pub fn weight(&self) -> usize {
        self.x_bits
            .iter()
            .zip(&self.z_bits)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity_word(&self) -> bool {
        self.x_bits.iter().all(|&w| w == 0) && self.z_bits.iter().all(|&w| w == 0)
    }

    /// Phase exponent relative to the canonical Hermitian word with the same
    /// bits, i.e. the k in `self = i^k · (+word)`.
    pub fn phase_rel(&self) -> u8 {
        (self.phase_exp + 4 - (self.y_count() % 4) as u8) % 4
    }

    /// The positive-phase Hermitian word with the same bit vectors.
    pub fn canonical(&self) -> PauliString {
        let mut p = self.clone();
        p.phase_exp = (self.y_count() % 4) as u8;
        p
    }

    /// Same bits, phase multiplied by `i^k`.
    pub fn times_i_pow(&self, k: u8) -> PauliString {
        let mut p = self.clone();
        p.phase_exp = (p.phase_exp + k) % 4;
        p
    }

    /// Exact operator product `self · rhs`, phase included.
    ///
    /// The bit vectors of the result are the XOR of the operands; the phase
    /// picks up `i^2` for every qubit where a Z of `self` passes an X of
    /// `rhs`.
    pub fn multiply(&self, rhs: &PauliString) -> Result<PauliString, PauliError> {
        if self.n_qubits != rhs.n_qubits {
            return Err(PauliError::DimensionMismatch {
                left: self.n_qubits,
                right: rhs.n_qubits,
            });
        }
        let swaps = and_popcount(&self.z_bits, &rhs.x_bits) as u8;
        let x_bits = self.x_bits.iter().zip(&rhs.x_bits).map(|(a, b)| a ^ b).collect();
        let z_bits = self.z_bits.iter().zip(&rhs.z_bits).map(|(a, b)| a ^ b).collect();
        Ok(PauliString {
            n_qubits: self.n_qubits,
            x_bits,
            z_bits,
            phase_exp: (self.phase_exp + rhs.phase_exp + 2 * (swaps % 2)) % 4,
        })
    }

    /// True iff the operators commute; phases never affect the result.
    pub fn commutes(&self, rhs: &PauliString) -> Result<bool, PauliError> {
        if self.n_qubits != rhs.n_qubits {
            return Err(PauliError::DimensionMismatch {
                left: self.n_qubits,
                right: rhs.n_qubits,
            });
        }
        let s = and_popcount(&self.x_bits, &rhs.z_bits) + and_popcount(&self.z_bits, &rhs.x_bits);
        Ok(s % 2 == 0)
    }

    /// True iff the operator is Hermitian and squares to `+I`, which for the
    /// stored form holds exactly when `phase_exp ≡ y_count (mod 2)`.
    pub fn is_hermitian_selfinverse(&self) -> bool {
        (self.phase_exp as usize + self.y_count()) % 2 == 0
    }

    /// Qubits with a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|&q| self.x_bit(q) || self.z_bit(q)).collect()
    }

    /// Letter string without the phase prefix, qubit 0 leftmost.
    pub fn word(&self) -> String {
        (0..self.n_qubits).map(|q| self.letter(q).to_char()).collect()
    }

    /// Total order on the bit vectors: x component first, qubit 0 most
    /// significant, then the z component. Phase is ignored.
    pub fn cmp_bits(&self, rhs: &PauliString) -> std::cmp::Ordering {
        let cmp_vec = |a: &[u64], b: &[u64]| {
            a.iter()
                .map(|w| w.reverse_bits())
                .cmp(b.iter().map(|w| w.reverse_bits()))
        };
        cmp_vec(&self.x_bits, &rhs.x_bits).then_with(|| cmp_vec(&self.z_bits, &rhs.z_bits))
    }

    /// Bit-vector pair usable as a phase-insensitive map key.
    pub fn bits_key(&self) -> (Vec<u64>, Vec<u64>) {
        (self.x_bits.clone(), self.z_bits.clone())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase_rel() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{}{}", prefix, self.word())
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    /// Parses `[+|-|+i|-i]WORD`, qubit 0 leftmost.
    fn from_str(s: &str) -> Result<Self, PauliError> {
        let (rel, word) = if let Some(rest) = s.strip_prefix("+i") {
            (1u8, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (3u8, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0u8, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2u8, rest)
        } else {
            (0u8, s)
        };
        let mut letters = Vec::with_capacity(word.len());
        for (position, c) in word.chars().enumerate() {
            let letter = PauliLetter::from_char(c)
                .ok_or(PauliError::InvalidCharacter { found: c, position })?;
            letters.push(letter);
        }
        Ok(PauliString::from_letters(&letters)?.times_i_pow(rel))
    }
}
