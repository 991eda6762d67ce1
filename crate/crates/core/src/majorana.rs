//! Electronic-structure front end: integral tables, the Majorana form of
//! the electronic Hamiltonian, Jordan-Wigner mapping, and the analytic
//! anticommuting partition of the quartic terms.
//!
//! A [`MajoranaPolynomial`] stores monomials as strictly sorted mode-index
//! sets with real coefficients. A stored pair `(A, c)` denotes the
//! Hermitian operator `c * i^k * gamma_{a1} ... gamma_{a|A|}` with
//! `k = (|A|/2) mod 2`, so quadratics carry one factor of i and quartics
//! none. Two even-parity Majorana monomials anticommute exactly when their
//! supports overlap an odd number of times, which is what the analytic
//! partition exploits: quartics `g_2p g_2q g_2r+1 g_2s+1` (p < q) grouped
//! by the triple `(q, r, s)` share three indices pairwise. The `q = 1` and
//! `q = 2` groups merge, and quadratic terms are absorbed into compatible
//! quartic groups where one exists.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::hamiltonian::{HamiltonianError, PauliHamiltonian, DROP_TOLERANCE};
use crate::partition::{AnticommutingPartition, PartitionError};
use crate::pauli::{PauliLetter, PauliString};

#[derive(Debug, Error)]
pub enum MajoranaError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: orbital index {index} out of range for {n_orbitals} orbitals")]
    IndexOutOfRange { line: usize, index: usize, n_orbitals: usize },
    #[error("missing `norb` header")]
    MissingNorb,
    #[error(
        "integral ({p},{q},{r},{s}) = {value} conflicts with symmetry image value {existing}"
    )]
    SymmetryConflict { p: usize, q: usize, r: usize, s: usize, value: f64, existing: f64 },
    #[error("one-body integral ({p},{q}) = {value} conflicts with existing value {existing}")]
    OneBodyConflict { p: usize, q: usize, value: f64, existing: f64 },
    #[error("monomial {indices:?} is not strictly sorted or has odd cardinality")]
    BadMonomial { indices: Vec<usize> },
    #[error("monomial index {index} out of range for {n_modes} modes")]
    ModeOutOfRange { index: usize, n_modes: usize },
    #[error("monomial {indices:?} is outside the electronic form")]
    NotElectronicForm { indices: Vec<usize> },
    #[error("Jordan-Wigner image of {indices:?} has an imaginary coefficient")]
    ImaginaryCoefficient { indices: Vec<usize> },
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Sparse one- and two-body integrals over N spin orbitals with the full
/// real-orbital permutational symmetries completed on insertion.
#[derive(Debug, Clone, Default)]
pub struct IntegralTable {
    n_orbitals: usize,
    one_body: HashMap<(usize, usize), f64>,
    two_body: HashMap<(usize, usize, usize, usize), f64>,
}

const SYMMETRY_TOLERANCE: f64 = 1e-10;

impl IntegralTable {
    pub fn new(n_orbitals: usize) -> Self {
        IntegralTable { n_orbitals, ..Default::default() }
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn one(&self, p: usize, q: usize) -> f64 {
        self.one_body.get(&(p, q)).copied().unwrap_or(0.0)
    }

    pub fn two(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.two_body.get(&(p, q, r, s)).copied().unwrap_or(0.0)
    }

    /// Inserts `h_pq`, mirroring to `h_qp`; conflicting values beyond 1e-10
    /// are rejected.
    pub fn set_one(&mut self, p: usize, q: usize, value: f64) -> Result<(), MajoranaError> {
        for key in [(p, q), (q, p)] {
            if let Some(&existing) = self.one_body.get(&key) {
                if (existing - value).abs() > SYMMETRY_TOLERANCE {
                    return Err(MajoranaError::OneBodyConflict { p, q, value, existing });
                }
            }
            self.one_body.insert(key, value);
        }
        Ok(())
    }

    /// Inserts `h_pqrs` and its seven permutational images.
    pub fn set_two(
        &mut self,
        p: usize,
        q: usize,
        r: usize,
        s: usize,
        value: f64,
    ) -> Result<(), MajoranaError> {
        for &(a, b, c, d) in &symmetry_images(p, q, r, s) {
            if let Some(&existing) = self.two_body.get(&(a, b, c, d)) {
                if (existing - value).abs() > SYMMETRY_TOLERANCE {
                    return Err(MajoranaError::SymmetryConflict { p, q, r, s, value, existing });
                }
            }
            self.two_body.insert((a, b, c, d), value);
        }
        Ok(())
    }

    /// Parses `norb N` followed by `1 p q v` and `2 p q r s v` lines;
    /// `#` comments and blank lines allowed.
    pub fn parse(text: &str) -> Result<Self, MajoranaError> {
        let mut table: Option<IntegralTable> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if tokens[0] == "norb" {
                let n = parse_index(&tokens, 1, line, usize::MAX)?;
                table = Some(IntegralTable::new(n));
                continue;
            }
            let table = table.as_mut().ok_or(MajoranaError::MissingNorb)?;
            let n = table.n_orbitals;
            match tokens[0] {
                "1" if tokens.len() == 4 => {
                    let p = parse_index(&tokens, 1, line, n)?;
                    let q = parse_index(&tokens, 2, line, n)?;
                    let v = parse_value(&tokens, 3, line)?;
                    table.set_one(p, q, v)?;
                }
                "2" if tokens.len() == 6 => {
                    let p = parse_index(&tokens, 1, line, n)?;
                    let q = parse_index(&tokens, 2, line, n)?;
                    let r = parse_index(&tokens, 3, line, n)?;
                    let s = parse_index(&tokens, 4, line, n)?;
                    let v = parse_value(&tokens, 5, line)?;
                    table.set_two(p, q, r, s, v)?;
                }
                _ => {
                    return Err(MajoranaError::Malformed {
                        line,
                        message: format!("unrecognized record {content:?}"),
                    })
                }
            }
        }
        table.ok_or(MajoranaError::MissingNorb)
    }
}

fn parse_index(
    tokens: &[&str],
    pos: usize,
    line: usize,
    n: usize,
) -> Result<usize, MajoranaError> {
    let token = tokens.get(pos).ok_or(MajoranaError::Malformed {
        line,
        message: "missing field".into(),
    })?;
    let index: usize = token.parse().map_err(|_| MajoranaError::Malformed {
        line,
        message: format!("bad index {token:?}"),
    })?;
    if n != usize::MAX && index >= n {
        return Err(MajoranaError::IndexOutOfRange { line, index, n_orbitals: n });
    }
    Ok(index)
}

fn parse_value(tokens: &[&str], pos: usize, line: usize) -> Result<f64, MajoranaError> {
    let token = tokens.get(pos).ok_or(MajoranaError::Malformed {
        line,
        message: "missing value".into(),
    })?;
    token.parse().map_err(|_| MajoranaError::Malformed {
        line,
        message: format!("bad value {token:?}"),
    })
}

/// The eight permutational images of a two-body index quadruple.
pub fn symmetry_images(p: usize, q: usize, r: usize, s: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut images = vec![(p, q, r, s)];
    let mut grown = true;
    while grown {
        grown = false;
        for idx in 0..images.len() {
            let (a, b, c, d) = images[idx];
            for img in [(d, b, c, a), (a, c, b, d), (b, a, d, c)] {
                if !images.contains(&img) {
                    images.push(img);
                    grown = true;
                }
            }
        }
    }
    images
}

/// Sum of real-weighted Majorana monomials over 2N modes; see the module
/// docs for the phase convention.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaPolynomial {
    n_modes: usize,
    monomials: BTreeMap<Vec<usize>, f64>,
    identity_offset: f64,
}

impl MajoranaPolynomial {
    /// Builds a polynomial from strictly sorted, even-cardinality index
    /// sets; duplicate sets accumulate and dust below 1e-12 is dropped.
    pub fn new(
        n_modes: usize,
        monomials: impl IntoIterator<Item = (Vec<usize>, f64)>,
        identity_offset: f64,
    ) -> Result<Self, MajoranaError> {
        let mut map: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (indices, coeff) in monomials {
            if indices.is_empty()
                || indices.len() % 2 != 0
                || !indices.windows(2).all(|w| w[0] < w[1])
            {
                return Err(MajoranaError::BadMonomial { indices });
            }
            if let Some(&index) = indices.iter().find(|&&i| i >= n_modes) {
                return Err(MajoranaError::ModeOutOfRange { index, n_modes });
            }
            *map.entry(indices).or_insert(0.0) += coeff;
        }
        map.retain(|_, c| c.abs() >= DROP_TOLERANCE);
        Ok(MajoranaPolynomial { n_modes, monomials: map, identity_offset })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn identity_offset(&self) -> f64 {
        self.identity_offset
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&Vec<usize>, f64)> {
        self.monomials.iter().map(|(k, &v)| (k, v))
    }

    pub fn monomial_count(&self) -> usize {
        self.monomials.len()
    }
}

/// Canonicalizes a product of single-mode Majorana factors: sorts by index
/// (one transposition flips the sign) and contracts equal adjacent pairs
/// (each gamma squares to the identity).
fn canonical_gamma_product(modes: &[usize]) -> (f64, Vec<usize>) {
    let mut sorted: Vec<usize> = Vec::with_capacity(modes.len());
    let mut sign = 1.0;
    for &mode in modes {
        let pos = sorted.partition_point(|&m| m <= mode);
        if (sorted.len() - pos) % 2 == 1 {
            sign = -sign;
        }
        sorted.insert(pos, mode);
    }
    let mut reduced: Vec<usize> = Vec::with_capacity(sorted.len());
    for mode in sorted {
        if reduced.last() == Some(&mode) {
            reduced.pop();
        } else {
            reduced.push(mode);
        }
    }
    (sign, reduced)
}

type Complex = num_complex::Complex64;

/// The two Majorana components of a ladder operator:
/// `a_p = (g_2p + i g_2p+1)/2`, `a^+_p = (g_2p - i g_2p+1)/2`.
fn ladder(p: usize, dagger: bool) -> [(usize, Complex); 2] {
    let half = Complex::new(0.5, 0.0);
    let imag_half = Complex::new(0.0, if dagger { -0.5 } else { 0.5 });
    [(2 * p, half), (2 * p + 1, imag_half)]
}

/// Rewrites an integral table as the Majorana-form Hamiltonian by exact
/// expansion of every ladder-operator product; quadratic and quartic
/// monomials keep one/two indices of each parity and all coefficients come
/// out real thanks to the permutational symmetries of the integrals.
pub fn to_majorana(table: &IntegralTable) -> MajoranaPolynomial {
    let n = table.n_orbitals();
    let mut acc: BTreeMap<Vec<usize>, Complex> = BTreeMap::new();
    let mut add_product = |factors: &[(usize, Complex)], scale: f64| {
        let modes: Vec<usize> = factors.iter().map(|&(m, _)| m).collect();
        let coeff: Complex = factors.iter().map(|&(_, c)| c).product();
        let (sign, monomial) = canonical_gamma_product(&modes);
        *acc.entry(monomial).or_insert(Complex::new(0.0, 0.0)) += coeff * sign * scale;
    };

    for p in 0..n {
        for q in 0..n {
            let v = table.one(p, q);
            if v == 0.0 {
                continue;
            }
            for f1 in ladder(p, true) {
                for f2 in ladder(q, false) {
                    add_product(&[f1, f2], v);
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = table.two(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    for f1 in ladder(p, true) {
                        for f2 in ladder(q, true) {
                            for f3 in ladder(r, false) {
                                for f4 in ladder(s, false) {
                                    add_product(&[f1, f2, f3, f4], 0.5 * v);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    let mut offset = 0.0;
    let mut monomials: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (indices, value) in acc {
        // Stored coefficient is relative to the Hermitian normalization
        // i^((|A|/2) mod 2) * gamma_A; the residue must be real.
        let hermitize = (indices.len() / 2) % 2;
        let real = if hermitize == 1 { value.im } else { value.re };
        let residue = if hermitize == 1 { value.re } else { value.im };
        debug_assert!(
            residue.abs() <= 1e-9 * real.abs().max(1.0),
            "non-Hermitian residue {residue} on monomial {indices:?}"
        );
        if indices.is_empty() {
            offset = real;
        } else if real.abs() >= DROP_TOLERANCE {
            monomials.insert(indices, real);
        }
    }
    MajoranaPolynomial { n_modes: 2 * n, monomials, identity_offset: offset }
}

/// Jordan-Wigner image of a single Majorana mode: `X_p Z_{p-1}..Z_0` for
/// even modes, Y in place of X for odd.
fn jw_mode(mode: usize, n_qubits: usize) -> PauliString {
    let p = mode / 2;
    let mut letters = vec![PauliLetter::I; n_qubits];
    for lower in letters.iter_mut().take(p) {
        *lower = PauliLetter::Z;
    }
    letters[p] = if mode % 2 == 0 { PauliLetter::X } else { PauliLetter::Y };
    PauliString::from_letters(&letters).unwrap()
}

fn jw_monomial(indices: &[usize], n_qubits: usize) -> Result<(f64, PauliString), MajoranaError> {
    let mut product = PauliString::identity(n_qubits);
    for &mode in indices {
        product = product.multiply(&jw_mode(mode, n_qubits)).unwrap();
    }
    let hermitize = ((indices.len() / 2) % 2) as u8;
    let product = product.times_i_pow(hermitize);
    match product.phase_rel() {
        0 => Ok((1.0, product.canonical())),
        2 => Ok((-1.0, product.canonical())),
        _ => Err(MajoranaError::ImaginaryCoefficient { indices: indices.to_vec() }),
    }
}

/// Maps each monomial to its single Pauli string and assembles the
/// canonical Hamiltonian on N = n_modes/2 qubits.
pub fn jordan_wigner(mp: &MajoranaPolynomial) -> Result<PauliHamiltonian, MajoranaError> {
    let n_qubits = mp.n_modes() / 2;
    let mut terms = Vec::with_capacity(mp.monomial_count());
    for (indices, coeff) in mp.monomials() {
        let (sign, op) = jw_monomial(indices, n_qubits)?;
        terms.push((sign * coeff, op));
    }
    Ok(PauliHamiltonian::new(n_qubits, terms, mp.identity_offset())?)
}

struct QuarticBin {
    term_indices: Vec<usize>,
    has_q1: bool,
    has_q2: bool,
    absorbed: bool,
}

/// The analytic partition: quartics grouped by their `(q, r, s)` triple
/// (with the q=1 and q=2 groups merged), quadratics absorbed into a
/// compatible quartic group where one exists, and leftovers kept as their
/// own internally anticommuting sets. Returns the Jordan-Wigner Hamiltonian
/// together with the partition over its terms.
pub fn theorem1_partition(
    mp: &MajoranaPolynomial,
) -> Result<(PauliHamiltonian, AnticommutingPartition), MajoranaError> {
    // Classify monomials before doing any work.
    for (indices, _) in mp.monomials() {
        electronic_class(indices)?;
    }
    let h = jordan_wigner(mp)?;
    let index_of = h.bits_index();

    let mut bins: BTreeMap<(usize, usize, usize), QuarticBin> = BTreeMap::new();
    let mut quadratics: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();

    for (indices, _) in mp.monomials() {
        let n_qubits = mp.n_modes() / 2;
        let (_, op) = jw_monomial(indices, n_qubits)?;
        let Some(&term) = index_of.get(&op.bits_key()) else {
            continue; // dropped below tolerance during assembly
        };
        match electronic_class(indices)? {
            ElectronicClass::Quartic { q, r, s } => {
                let merged_q = if q <= 2 { 1 } else { q };
                let bin = bins.entry((merged_q, r, s)).or_insert(QuarticBin {
                    term_indices: vec![],
                    has_q1: false,
                    has_q2: false,
                    absorbed: false,
                });
                bin.term_indices.push(term);
                bin.has_q1 |= q == 1;
                bin.has_q2 |= q == 2;
            }
            ElectronicClass::Quadratic { p, q } => {
                quadratics.entry(p).or_default().push((term, q));
            }
        }
    }

    let mut leftovers: Vec<Vec<usize>> = Vec::new();
    for (&p, entries) in &quadratics {
        // Hosts share the even index 2p; merged q=1/q=2 bins qualify only
        // when they contain a single q value matching p.
        let valid_host = |bin: &QuarticBin, key: &(usize, usize, usize)| -> bool {
            if bin.absorbed {
                return false;
            }
            if p >= 3 {
                key.0 == p
            } else if p == 1 {
                key.0 == 1 && !bin.has_q2
            } else if p == 2 {
                key.0 == 1 && !bin.has_q1
            } else {
                false
            }
        };
        let first_host = bins
            .iter()
            .find(|(key, bin)| valid_host(bin, key))
            .map(|(&key, _)| key);
        let Some(host_key) = first_host else {
            leftovers.push(entries.iter().map(|&(term, _)| term).collect());
            continue;
        };
        let (_, hr, hs) = host_key;
        let (keep, excluded): (Vec<_>, Vec<_>) =
            entries.iter().partition(|&&(_, q)| q != hr && q != hs);
        {
            let bin = bins.get_mut(&host_key).unwrap();
            bin.absorbed = true;
            bin.term_indices.extend(keep.iter().map(|&&(term, _)| term));
        }
        if excluded.is_empty() {
            continue;
        }
        let second_host = bins
            .iter()
            .find(|(key, bin)| {
                valid_host(bin, key) && key.1 != hr && key.1 != hs && key.2 != hr && key.2 != hs
            })
            .map(|(&key, _)| key);
        match second_host {
            Some(key) => {
                let bin = bins.get_mut(&key).unwrap();
                bin.absorbed = true;
                bin.term_indices.extend(excluded.iter().map(|&&(term, _)| term));
            }
            None => leftovers.push(excluded.iter().map(|&&(term, _)| term).collect()),
        }
    }

    let mut sets: Vec<Vec<usize>> = bins.into_values().map(|b| b.term_indices).collect();
    sets.extend(leftovers);
    sets.retain(|s| !s.is_empty());
    for set in &mut sets {
        set.sort_unstable();
    }
    let partition = AnticommutingPartition::from_index_sets(&h, sets)?;
    Ok((h, partition))
}

enum ElectronicClass {
    Quadratic { p: usize, q: usize },
    Quartic { q: usize, r: usize, s: usize },
}

fn electronic_class(indices: &[usize]) -> Result<ElectronicClass, MajoranaError> {
    let evens: Vec<usize> = indices.iter().copied().filter(|i| i % 2 == 0).collect();
    let odds: Vec<usize> = indices.iter().copied().filter(|i| i % 2 == 1).collect();
    match (indices.len(), evens.len(), odds.len()) {
        (2, 1, 1) => Ok(ElectronicClass::Quadratic { p: evens[0] / 2, q: (odds[0] - 1) / 2 }),
        (4, 2, 2) => Ok(ElectronicClass::Quartic {
            q: evens[1] / 2,
            r: (odds[0] - 1) / 2,
            s: (odds[1] - 1) / 2,
        }),
        _ => Err(MajoranaError::NotElectronicForm { indices: indices.to_vec() }),
    }
}
