//! Model-Hamiltonian generators and their analytic partitions and
//! commute-probability formulas, for validation and benchmarking.
//!
//! Covers transverse-field Ising models on arbitrary graphs with the
//! edge/vertex pairing partition, random k-local Pauli Hamiltonians with
//! the exact probability that two independently sampled terms commute, and
//! the structural term set of the plane-wave dual-basis Hamiltonian with
//! its anticommuting sets.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hamiltonian::{HamiltonianError, PauliHamiltonian};
use crate::partition::{AnticommutingPartition, PartitionError};
use crate::pauli::{PauliLetter, PauliString};

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("self-loop on vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
    #[error("vertex {vertex} out of range for {n_vertices} vertices")]
    VertexOutOfRange { vertex: usize, n_vertices: usize },
    #[error("locality {k} exceeds {n} qubits")]
    KTooLarge { k: usize, n: usize },
    #[error("need n >= k >= 1, got n = {n}, k = {k}")]
    BadProbabilityArgs { n: usize, k: usize },
    #[error("term {word} is neither a single X nor a ZZ pair")]
    NotTimShaped { word: String },
    #[error("term {word} does not fit the dual-basis structural pattern")]
    NotDualShaped { word: String },
    #[error("dual-basis structure needs at least 3 modes per sector, got {n}")]
    TooFewModes { n: usize },
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Simple undirected graph: vertices 0..n, normalized edge list.
#[derive(Debug, Clone)]
pub struct GraphSpec {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, GeneratorError> {
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(GeneratorError::SelfLoop { vertex: u });
            }
            for w in [u, v] {
                if w >= n_vertices {
                    return Err(GeneratorError::VertexOutOfRange { vertex: w, n_vertices });
                }
            }
            let e = (u.min(v), u.max(v));
            if normalized.contains(&e) {
                return Err(GeneratorError::DuplicateEdge { u: e.0, v: e.1 });
            }
            normalized.push(e);
        }
        normalized.sort_unstable();
        Ok(GraphSpec { n_vertices, edges: normalized })
    }

    /// Cycle on `l` vertices (periodic chain).
    pub fn ring(l: usize) -> Self {
        let edges = (0..l).map(|i| (i, (i + 1) % l)).collect();
        GraphSpec::new(l, edges).unwrap()
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        GraphSpec::new(n, edges).unwrap()
    }

    /// Circulant graph: vertex i connects to i +- each offset (mod n).
    pub fn circulant(n: usize, offsets: &[usize]) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for &d in offsets {
                let j = (i + d) % n;
                let e = (i.min(j), i.max(j));
                if !edges.contains(&e) {
                    edges.push(e);
                }
            }
        }
        GraphSpec::new(n, edges).unwrap()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Transverse-field Ising Hamiltonian: one ZZ term per edge (coefficient 1)
/// and one X term per vertex (coefficient x).
pub fn tim_hamiltonian(g: &GraphSpec, x: f64) -> PauliHamiltonian {
    let n = g.n_vertices();
    let mut terms = Vec::with_capacity(g.edges().len() + n);
    for &(u, v) in g.edges() {
        let mut letters = vec![PauliLetter::I; n];
        letters[u] = PauliLetter::Z;
        letters[v] = PauliLetter::Z;
        terms.push((1.0, PauliString::from_letters(&letters).unwrap()));
    }
    for v in 0..n {
        terms.push((x, PauliString::single(n, v, PauliLetter::X).unwrap()));
    }
    PauliHamiltonian::new(n, terms, 0.0).expect("TIM terms are Hermitian words")
}

/// TIM pairing partition: each X term is matched with one unused incident
/// ZZ edge term (vertices in index order, lowest-indexed edge first);
/// unmatched terms stay singletons.
pub fn tim_pair_partition(
    g: &GraphSpec,
    x: f64,
) -> Result<(PauliHamiltonian, AnticommutingPartition), GeneratorError> {
    let h = tim_hamiltonian(g, x);
    let partition = tim_pair_partition_of(&h)?;
    Ok((h, partition))
}

/// Pairing partition for an existing Hamiltonian of TIM shape (single-X and
/// ZZ terms only).
pub fn tim_pair_partition_of(
    h: &PauliHamiltonian,
) -> Result<AnticommutingPartition, GeneratorError> {
    let n = h.n_qubits();
    let mut x_term_of_vertex: Vec<Option<usize>> = vec![None; n];
    let mut edge_terms: Vec<((usize, usize), usize)> = Vec::new();
    for (idx, (_, op)) in h.terms().iter().enumerate() {
        let support = op.support();
        match support.as_slice() {
            [v] if op.letter(*v) == PauliLetter::X => x_term_of_vertex[*v] = Some(idx),
            [u, v]
                if op.letter(*u) == PauliLetter::Z && op.letter(*v) == PauliLetter::Z =>
            {
                edge_terms.push(((*u, *v), idx));
            }
            _ => {
                return Err(GeneratorError::NotTimShaped { word: op.word() });
            }
        }
    }
    edge_terms.sort_unstable();

    let mut used_edge = vec![false; edge_terms.len()];
    let mut paired_x: Vec<Option<usize>> = vec![None; edge_terms.len()];
    let mut unmatched_x: Vec<usize> = Vec::new();
    for v in 0..n {
        let Some(x_idx) = x_term_of_vertex[v] else { continue };
        let slot = edge_terms
            .iter()
            .enumerate()
            .find(|(e, ((u, w), _))| !used_edge[*e] && (*u == v || *w == v))
            .map(|(e, _)| e);
        match slot {
            Some(e) => {
                used_edge[e] = true;
                paired_x[e] = Some(x_idx);
            }
            None => unmatched_x.push(x_idx),
        }
    }

    let mut sets: Vec<Vec<usize>> = Vec::new();
    for (e, (_, zz_idx)) in edge_terms.iter().enumerate() {
        match paired_x[e] {
            Some(x_idx) => {
                let mut set = vec![*zz_idx, x_idx];
                set.sort_unstable();
                sets.push(set);
            }
            None => sets.push(vec![*zz_idx]),
        }
    }
    for x_idx in unmatched_x {
        sets.push(vec![x_idx]);
    }
    Ok(AnticommutingPartition::from_index_sets(h, sets)?)
}

/// Random k-local Hamiltonian: `m` independent k-tuples of qubits, uniform
/// non-identity letters on each tuple, coefficients uniform in [-1, 1].
/// Duplicate words merge, so the term count may come out below `m`.
pub fn random_klocal(
    n: usize,
    m: usize,
    k: usize,
    seed: u64,
) -> Result<PauliHamiltonian, GeneratorError> {
    if k > n {
        return Err(GeneratorError::KTooLarge { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::with_capacity(m);
    for _ in 0..m {
        let coeff = rng.gen_range(-1.0..1.0);
        terms.push((coeff, random_weight_k_word(n, k, &mut rng)));
    }
    Ok(PauliHamiltonian::new(n, terms, 0.0)?)
}

fn random_weight_k_word(n: usize, k: usize, rng: &mut ChaCha8Rng) -> PauliString {
    let tuple = rand::seq::index::sample(rng, n, k);
    let mut letters = vec![PauliLetter::I; n];
    for q in tuple {
        letters[q] = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z][rng.gen_range(0..3)];
    }
    PauliString::from_letters(&letters).unwrap()
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut value = 1.0;
    for i in 0..k {
        value *= (n - i) as f64 / (k - i) as f64;
    }
    value
}

/// Probability that two independently sampled weight-k operators on n
/// qubits commute: the hypergeometric average over the overlap I of
/// `(1 + (-1/3)^I) / 2`, since conditioned on an overlap of I qubits the
/// factors disagree independently with probability 2/3 and the pair
/// commutes exactly when the number of disagreements is even.
pub fn commute_probability(n: usize, k: usize) -> Result<f64, GeneratorError> {
    if k == 0 || k > n {
        return Err(GeneratorError::BadProbabilityArgs { n, k });
    }
    let total = binomial(n, k);
    let mut p_c = 0.0;
    for overlap in 0..=k {
        let weight = binomial(n - k, k - overlap) * binomial(k, overlap) / total;
        p_c += weight * 0.5 * (1.0 + (-1.0f64 / 3.0).powi(overlap as i32));
    }
    Ok(p_c)
}

/// Anticommute probability for 2-local terms on distinct edges:
/// `(8/3n) (n-2)/(n-1)`.
pub fn anticommute_probability_2local(n: usize) -> f64 {
    let n = n as f64;
    (8.0 / (3.0 * n)) * (n - 2.0) / (n - 1.0)
}

/// Closed form of [`commute_probability`] at k = 3.
pub fn commute_probability_3local_closed(n: usize) -> f64 {
    let nf = n as f64;
    1.0 - (6.0 * nf * nf - 34.0 * nf + 460.0 / 9.0) / (nf * (nf - 1.0) * (nf - 2.0))
}

/// Structural term set of the plane-wave dual-basis Hamiltonian on two spin
/// sectors of `n_modes` basis functions each (2 * n_modes qubits): all
/// single-Z terms, all ZZ pairs, and the intra-sector XZ..ZX / YZ..ZY
/// strings, with synthetic coefficients uniform in [0.1, 1]. Returns the
/// Hamiltonian together with the partition into the per-mode anticommuting
/// sets (each of size n_modes) plus ZZ singletons.
pub fn dual_basis_structure(
    n_modes: usize,
    seed: u64,
) -> Result<(PauliHamiltonian, AnticommutingPartition), GeneratorError> {
    if n_modes < 3 {
        return Err(GeneratorError::TooFewModes { n: n_modes });
    }
    let n_qubits = 2 * n_modes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeff = move || rng.gen_range(0.1..1.0);

    let string_term = |a: usize, b: usize, letter: PauliLetter| {
        let mut letters = vec![PauliLetter::I; n_qubits];
        letters[a] = letter;
        letters[b] = letter;
        for l in letters.iter_mut().take(b).skip(a + 1) {
            *l = PauliLetter::Z;
        }
        PauliString::from_letters(&letters).unwrap()
    };

    let mut terms: Vec<(f64, PauliString)> = Vec::new();
    for g in 0..n_qubits {
        terms.push((coeff(), PauliString::single(n_qubits, g, PauliLetter::Z).unwrap()));
    }
    for u in 0..n_qubits {
        for v in (u + 1)..n_qubits {
            let mut letters = vec![PauliLetter::I; n_qubits];
            letters[u] = PauliLetter::Z;
            letters[v] = PauliLetter::Z;
            terms.push((coeff(), PauliString::from_letters(&letters).unwrap()));
        }
    }
    for sector in 0..2 {
        let off = sector * n_modes;
        for l in 0..n_modes {
            for p in (l + 1)..n_modes {
                terms.push((coeff(), string_term(off + l, off + p, PauliLetter::X)));
                terms.push((coeff(), string_term(off + l, off + p, PauliLetter::Y)));
            }
        }
    }

    let h = PauliHamiltonian::new(n_qubits, terms, 0.0)?;
    let partition = dual_structure_partition_of(&h)?;
    Ok((h, partition))
}

/// Structural partition of a dual-basis-shaped Hamiltonian: the per-mode
/// set anchored at qubit g gathers Z_g, the X-strings ending at g, and the
/// Y-strings starting at g; ZZ terms stay singletons.
pub fn dual_structure_partition_of(
    h: &PauliHamiltonian,
) -> Result<AnticommutingPartition, GeneratorError> {
    let mut anchored: Vec<Vec<usize>> = vec![vec![]; h.n_qubits()];
    let mut singletons: Vec<usize> = Vec::new();
    for (idx, (_, op)) in h.terms().iter().enumerate() {
        let support = op.support();
        let first = *support.first().unwrap_or(&0);
        let last = *support.last().unwrap_or(&0);
        let contiguous = support.len() == last - first + 1;
        let interior_z = support.len() < 2
            || support[1..support.len() - 1]
                .iter()
                .all(|&q| op.letter(q) == PauliLetter::Z);
        match (support.len(), op.letter(first), op.letter(last)) {
            (1, PauliLetter::Z, _) => anchored[first].push(idx),
            (2, PauliLetter::Z, PauliLetter::Z) => singletons.push(idx),
            (_, PauliLetter::X, PauliLetter::X) if contiguous && interior_z => {
                anchored[last].push(idx)
            }
            (_, PauliLetter::Y, PauliLetter::Y) if contiguous && interior_z => {
                anchored[first].push(idx)
            }
            _ => return Err(GeneratorError::NotDualShaped { word: op.word() }),
        }
    }
    let mut sets: Vec<Vec<usize>> = anchored.into_iter().filter(|s| !s.is_empty()).collect();
    for set in &mut sets {
        set.sort_unstable();
    }
    sets.extend(singletons.into_iter().map(|i| vec![i]));
    Ok(AnticommutingPartition::from_index_sets(h, sets)?)
}
