//! Compatibility graph and partitioning of terms into completely
//! anticommuting sets by greedy graph coloring.
//!
//! The compatibility graph connects commuting term pairs, so a completely
//! anticommuting set is an independent set of that graph, and a disjoint
//! cover by such sets is a coloring. The coloring heuristic repeatedly
//! extracts a maximal independent set, always taking the vertex of minimum
//! remaining compatibility degree; an optional seed permutes tie-broken
//! orders over several restarts and the fewest-sets result wins.
//! Adjacency rows are packed bit vectors, so graph construction and set
//! growth are word-wise operations.

use thiserror::Error;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::hamiltonian::PauliHamiltonian;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PartitionError {
    #[error("term index {index} out of range for {count} terms")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("term index {index} appears in more than one set")]
    DuplicateIndex { index: usize },
    #[error("term index {index} is not covered by any set")]
    MissingIndex { index: usize },
    #[error("set {set} is empty")]
    EmptySet { set: usize },
    #[error("terms {first} and {second} in set {set} commute")]
    CommutingPair { set: usize, first: usize, second: usize },
    #[error("set {set}: gamma {gamma} does not match sqrt of summed squared coefficients")]
    GammaMismatch { set: usize, gamma: f64 },
    #[error("set {set}: betas are not l2-normalized (sum of squares {sum})")]
    BetaNotNormalized { set: usize, sum: f64 },
    #[error("set {set}: gamma*beta does not reproduce coefficient of term {index}")]
    CoefficientMismatch { set: usize, index: usize },
    #[error("cannot split a set of {size} terms into {pieces} pieces")]
    PiecesOutOfRange { size: usize, pieces: usize },
    #[error("set index {set} out of range for {count} sets")]
    SetOutOfRange { set: usize, count: usize },
}

/// Undirected graph on term indices with an edge for every commuting pair,
/// stored as packed adjacency rows.
pub struct CompatibilityGraph {
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl CompatibilityGraph {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.rows[a][b / 64] >> (b % 64) & 1 != 0
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v]
    }
}

/// Builds the compatibility graph of a Hamiltonian's terms.
pub fn compatibility_graph(h: &PauliHamiltonian) -> CompatibilityGraph {
    let n = h.term_count();
    let words = n.div_ceil(64);
    let mut rows = vec![vec![0u64; words]; n];
    for a in 0..n {
        for b in (a + 1)..n {
            if h.operator(a).commutes(h.operator(b)).unwrap() {
                rows[a][b / 64] |= 1 << (b % 64);
                rows[b][a / 64] |= 1 << (a % 64);
            }
        }
    }
    CompatibilityGraph { n, rows }
}

/// Disjoint cover of term indices by completely anticommuting sets, with the
/// per-set l2 weight `gamma` and normalized coefficients `beta` satisfying
/// `gamma * beta_j = alpha_j` and `sum_j beta_j^2 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnticommutingPartition {
    sets: Vec<Vec<usize>>,
    gammas: Vec<f64>,
    betas: Vec<Vec<f64>>,
}

impl AnticommutingPartition {
    /// Builds a partition from explicit index sets, computing gammas and
    /// betas from the Hamiltonian coefficients, and validates it.
    pub fn from_index_sets(
        h: &PauliHamiltonian,
        sets: Vec<Vec<usize>>,
    ) -> Result<Self, PartitionError> {
        let mut gammas = Vec::with_capacity(sets.len());
        let mut betas = Vec::with_capacity(sets.len());
        for set in &sets {
            let gamma = set
                .iter()
                .map(|&i| {
                    if i >= h.term_count() {
                        return Err(PartitionError::IndexOutOfRange {
                            index: i,
                            count: h.term_count(),
                        });
                    }
                    Ok(h.coefficient(i).powi(2))
                })
                .sum::<Result<f64, _>>()?
                .sqrt();
            betas.push(set.iter().map(|&i| h.coefficient(i) / gamma).collect());
            gammas.push(gamma);
        }
        let partition = AnticommutingPartition { sets, gammas, betas };
        partition.check(h)?;
        Ok(partition)
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[Vec<f64>] {
        &self.betas
    }

    /// Size of the largest set, 0 for an empty partition.
    pub fn s_max(&self) -> usize {
        self.sets.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Checks all partition invariants, reporting the first violation.
    pub fn check(&self, h: &PauliHamiltonian) -> Result<(), PartitionError> {
        let m = h.term_count();
        let mut seen = vec![false; m];
        for (s, set) in self.sets.iter().enumerate() {
            if set.is_empty() {
                return Err(PartitionError::EmptySet { set: s });
            }
            for &i in set {
                if i >= m {
                    return Err(PartitionError::IndexOutOfRange { index: i, count: m });
                }
                if seen[i] {
                    return Err(PartitionError::DuplicateIndex { index: i });
                }
                seen[i] = true;
            }
            for (a_pos, &a) in set.iter().enumerate() {
                for &b in &set[a_pos + 1..] {
                    if h.operator(a).commutes(h.operator(b)).unwrap() {
                        return Err(PartitionError::CommutingPair { set: s, first: a, second: b });
                    }
                }
            }
            let sum_sq: f64 = set.iter().map(|&i| h.coefficient(i).powi(2)).sum();
            let gamma = self.gammas[s];
            if (gamma * gamma - sum_sq).abs() > 1e-10 * sum_sq.max(1.0) {
                return Err(PartitionError::GammaMismatch { set: s, gamma });
            }
            let beta_sq: f64 = self.betas[s].iter().map(|b| b * b).sum();
            if (beta_sq - 1.0).abs() > 1e-10 {
                return Err(PartitionError::BetaNotNormalized { set: s, sum: beta_sq });
            }
            for (&i, &beta) in set.iter().zip(&self.betas[s]) {
                let alpha = h.coefficient(i);
                if (gamma * beta - alpha).abs() > 1e-12 * alpha.abs().max(1.0) {
                    return Err(PartitionError::CoefficientMismatch { set: s, index: i });
                }
            }
        }
        if let Some(missing) = seen.iter().position(|&v| !v) {
            return Err(PartitionError::MissingIndex { index: missing });
        }
        Ok(())
    }

    pub fn validate(&self, h: &PauliHamiltonian) -> bool {
        self.check(h).is_ok()
    }

    /// Divides the chosen set into `pieces` contiguous chunks in canonical
    /// order; subsets of an anticommuting set stay anticommuting.
    pub fn split_set(
        &self,
        h: &PauliHamiltonian,
        set_index: usize,
        pieces: usize,
    ) -> Result<AnticommutingPartition, PartitionError> {
        if set_index >= self.sets.len() {
            return Err(PartitionError::SetOutOfRange { set: set_index, count: self.sets.len() });
        }
        let target = &self.sets[set_index];
        if pieces == 0 || pieces > target.len() {
            return Err(PartitionError::PiecesOutOfRange { size: target.len(), pieces });
        }
        let mut new_sets: Vec<Vec<usize>> = Vec::with_capacity(self.sets.len() + pieces - 1);
        for (s, set) in self.sets.iter().enumerate() {
            if s == set_index {
                new_sets.extend(chunk_evenly(set, pieces));
            } else {
                new_sets.push(set.clone());
            }
        }
        AnticommutingPartition::from_index_sets(h, new_sets)
    }
}

/// Splits a slice into `pieces` contiguous chunks with sizes as equal as
/// possible, earlier chunks taking the remainder.
pub(crate) fn chunk_evenly(set: &[usize], pieces: usize) -> Vec<Vec<usize>> {
    let base = set.len() / pieces;
    let extra = set.len() % pieces;
    let mut out = Vec::with_capacity(pieces);
    let mut start = 0;
    for p in 0..pieces {
        let len = base + usize::from(p < extra);
        out.push(set[start..start + len].to_vec());
        start += len;
    }
    out
}

/// Options for [`greedy_color_with`].
#[derive(Debug, Clone)]
pub struct GreedyOptions {
    /// Seed for tie-break permutations; `None` keeps canonical order only.
    pub seed: Option<u64>,
    /// Number of seeded restarts (the canonical-order pass always runs).
    pub restarts: usize,
    /// Optional cap on set sizes, propagated from circuit budgets.
    pub max_set_size: Option<usize>,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions { seed: None, restarts: 8, max_set_size: None }
    }
}

/// Greedy-independent-sets coloring with default options; see
/// [`greedy_color_with`].
pub fn greedy_color(h: &PauliHamiltonian, seed: Option<u64>) -> AnticommutingPartition {
    greedy_color_with(h, &GreedyOptions { seed, ..GreedyOptions::default() })
}

/// Partitions the Hamiltonian terms into completely anticommuting sets.
///
/// Deterministic for a fixed seed and canonical term order. With no seed a
/// single canonical-order pass runs; with a seed, `restarts` extra passes
/// run under permuted tie-break priorities and the result with the fewest
/// sets is kept.
pub fn greedy_color_with(h: &PauliHamiltonian, options: &GreedyOptions) -> AnticommutingPartition {
    let graph = compatibility_graph(h);
    let m = graph.vertex_count();
    if m == 0 {
        return AnticommutingPartition { sets: vec![], gammas: vec![], betas: vec![] };
    }

    let identity_priority: Vec<usize> = (0..m).collect();
    let mut best = greedy_pass(&graph, &identity_priority, options.max_set_size);
    redistribute(&graph, &mut best, options.max_set_size);
    if let Some(seed) = options.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..options.restarts {
            let mut priority: Vec<usize> = (0..m).collect();
            priority.shuffle(&mut rng);
            let mut candidate = greedy_pass(&graph, &priority, options.max_set_size);
            redistribute(&graph, &mut candidate, options.max_set_size);
            if candidate.len() < best.len() {
                best = candidate;
            }
        }
    }
    for set in &mut best {
        set.sort_unstable();
    }
    AnticommutingPartition::from_index_sets(h, best)
        .expect("greedy coloring produces a valid partition by construction")
}

/// Improvement pass: dissolve a set by moving each member into another set
/// whose members all anticommute with it (first fit, smallest sets first).
/// Repeats until no set can be dissolved; never increases the set count.
fn redistribute(graph: &CompatibilityGraph, sets: &mut Vec<Vec<usize>>, cap: Option<usize>) {
    let words = graph.vertex_count().div_ceil(64);
    let mask_of = |set: &[usize]| {
        let mut mask = vec![0u64; words];
        for &v in set {
            mask[v / 64] |= 1 << (v % 64);
        }
        mask
    };
    loop {
        let mut masks: Vec<Vec<u64>> = sets.iter().map(|s| mask_of(s)).collect();
        let mut order: Vec<usize> = (0..sets.len()).collect();
        order.sort_by_key(|&i| (sets[i].len(), i));
        let mut dissolved: Option<usize> = None;
        'candidates: for &idx in &order {
            // Try to place every member of sets[idx] elsewhere, updating
            // the tentative targets as members land.
            let mut staged_masks = masks.clone();
            let mut staged_sizes: Vec<usize> = sets.iter().map(Vec::len).collect();
            let mut placements: Vec<(usize, usize)> = Vec::with_capacity(sets[idx].len());
            for &v in &sets[idx] {
                let compatible_with = graph.row(v);
                let target = (0..sets.len()).find(|&t| {
                    t != idx
                        && cap.map_or(true, |c| staged_sizes[t] < c)
                        && compatible_with
                            .iter()
                            .zip(&staged_masks[t])
                            .all(|(row, mask)| row & mask == 0)
                });
                match target {
                    Some(t) => {
                        staged_masks[t][v / 64] |= 1 << (v % 64);
                        staged_sizes[t] += 1;
                        placements.push((v, t));
                    }
                    None => continue 'candidates,
                }
            }
            for (v, t) in placements {
                sets[t].push(v);
            }
            masks = staged_masks;
            let _ = masks;
            dissolved = Some(idx);
            break;
        }
        match dissolved {
            Some(idx) => {
                sets.remove(idx);
            }
            None => break,
        }
    }
}

fn greedy_pass(
    graph: &CompatibilityGraph,
    priority: &[usize],
    max_set_size: Option<usize>,
) -> Vec<Vec<usize>> {
    let m = graph.vertex_count();
    let words = m.div_ceil(64);
    let mut alive = vec![u64::MAX; words];
    if m % 64 != 0 {
        alive[words - 1] = (1u64 << (m % 64)) - 1;
    }
    let mut degree: Vec<usize> = (0..m).map(|v| graph.degree(v)).collect();
    let mut remaining = m;
    let mut sets = Vec::new();

    let remove = |v: usize, alive: &mut [u64], degree: &mut [usize]| {
        alive[v / 64] &= !(1 << (v % 64));
        for (w, word) in graph.row(v).iter().enumerate() {
            let mut bits = *word & alive[w];
            while bits != 0 {
                let u = w * 64 + bits.trailing_zeros() as usize;
                degree[u] -= 1;
                bits &= bits - 1;
            }
        }
    };

    while remaining > 0 {
        let seed_vertex = argmin_masked(&alive, &degree, priority);
        remove(seed_vertex, &mut alive, &mut degree);
        remaining -= 1;
        let mut set = vec![seed_vertex];

        // Candidates anticommute with every current member: alive minus the
        // compatibility neighborhoods of the set.
        let mut candidates = alive.clone();
        for (w, word) in graph.row(seed_vertex).iter().enumerate() {
            candidates[w] &= !word;
        }
        loop {
            if let Some(cap) = max_set_size {
                if set.len() >= cap {
                    break;
                }
            }
            if candidates.iter().all(|&w| w == 0) {
                break;
            }
            let next = argmin_masked(&candidates, &degree, priority);
            remove(next, &mut alive, &mut degree);
            remaining -= 1;
            set.push(next);
            candidates[next / 64] &= !(1 << (next % 64));
            for (w, word) in graph.row(next).iter().enumerate() {
                candidates[w] &= !word & alive[w];
            }
            for (w, word) in candidates.iter_mut().enumerate() {
                *word &= alive[w];
            }
        }
        sets.push(set);
    }
    sets
}

fn argmin_masked(mask: &[u64], degree: &[usize], priority: &[usize]) -> usize {
    let mut best: Option<(usize, usize, usize)> = None;
    for (w, &word) in mask.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let v = w * 64 + bits.trailing_zeros() as usize;
            let key = (degree[v], priority[v], v);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
            bits &= bits - 1;
        }
    }
    best.expect("argmin over nonempty mask").2
}
