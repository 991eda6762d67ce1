//! Acceptance suite: one test per release criterion, each printing its own
//! pass/fail line through the harness. Every tolerance and threshold is
//! pinned here in code.

use std::time::Instant;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use unipart::circuit::budgeted_split;
use unipart::contextuality::{decompose, is_noncontextual, reduce_to_commuting};
use unipart::generators::{
    anticommute_probability_2local, commute_probability, commute_probability_3local_closed,
    dual_basis_structure, random_klocal, tim_pair_partition, GraphSpec,
};
use unipart::hamiltonian::PauliHamiltonian;
use unipart::majorana::{
    jordan_wigner, theorem1_partition, to_majorana, IntegralTable, MajoranaPolynomial,
};
use unipart::measure::cost_report;
use unipart::partition::{greedy_color_with, GreedyOptions};
use unipart::pauli::{PauliLetter, PauliString};
use unipart::rotation::{
    build_sequence_plan, build_single_rotation_plan, plans_for_partition, RotationMode,
    RotationPlan,
};
use unipart::simulator::{
    apply_pauli, apply_pauli_sum, apply_plan, conjugation_residual, frobenius_distance,
    hamiltonian_matrix, random_state, reconstruction_residual, to_matrix,
};

const ORACLE_TOLERANCE: f64 = 1e-10;

// ---------------------------------------------------------------------------
// shared helpers

/// Grows a random completely anticommuting set by rejection, restarting
/// from scratch whenever the partial set turns out to be maximal (for
/// example three distinct letters on one qubit admit no extension).
fn random_anticommuting_set(n_qubits: usize, size: usize, rng: &mut ChaCha8Rng) -> Vec<PauliString> {
    'restart: loop {
        let mut ops: Vec<PauliString> = Vec::new();
        let mut stalls = 0;
        while ops.len() < size {
            let word: String = (0..n_qubits)
                .map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)])
                .collect();
            let candidate: PauliString = word.parse().unwrap();
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

fn random_betas(size: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = raw.iter().map(|b| b * b).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return raw.into_iter().map(|b| b / norm).collect();
        }
    }
}

fn set_terms(ops: &[PauliString], betas: &[f64]) -> Vec<(f64, PauliString)> {
    betas.iter().copied().zip(ops.iter().cloned()).collect()
}

fn random_table(n: usize, rng: &mut ChaCha8Rng) -> IntegralTable {
    let mut table = IntegralTable::new(n);
    for p in 0..n {
        for q in p..n {
            if rng.gen_bool(0.6) {
                table.set_one(p, q, rng.gen_range(-1.0..1.0)).unwrap();
            }
        }
    }
    for _ in 0..n * n {
        let (p, q, r, s) = (
            rng.gen_range(0..n),
            rng.gen_range(0..n),
            rng.gen_range(0..n),
            rng.gen_range(0..n),
        );
        if table.two(p, q, r, s) == 0.0 {
            table.set_two(p, q, r, s, rng.gen_range(-1.0..1.0)).unwrap();
        }
    }
    table
}

fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read fixture {}: {e}", path.display()))
}

fn greedy_fixture_partition(
    text: &str,
) -> (PauliHamiltonian, unipart::AnticommutingPartition) {
    let table = IntegralTable::parse(text).unwrap();
    let h = jordan_wigner(&to_majorana(&table)).unwrap();
    let options = GreedyOptions { seed: Some(1), restarts: 16, max_set_size: None };
    let partition = greedy_color_with(&h, &options);
    (h, partition)
}

// ---------------------------------------------------------------------------

/// Rotation correctness: for 500 random anticommuting sets (sizes 2..8 on
/// up to 10 qubits) the Frobenius residual of R H_S R^† against the sink is
/// at most 1e-10 in both modes, in under a minute.
#[test]
fn criterion_01_rotation_correctness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for case in 0..500 {
        let n = rng.gen_range(3..=10usize);
        let size = rng.gen_range(2..=8.min(2 * n));
        let ops = random_anticommuting_set(n, size, &mut rng);
        let betas = random_betas(size, &mut rng);
        let terms = set_terms(&ops, &betas);
        let sequence = build_sequence_plan(&ops, &betas).unwrap();
        let single = build_single_rotation_plan(&ops, &betas).unwrap();
        for plan in [&sequence, &single] {
            let residual = conjugation_residual(n, plan, &terms);
            assert!(
                residual <= ORACLE_TOLERANCE,
                "case {case}: residual {residual} (n={n}, size={size})"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}, budget is one minute");
}

/// Axis-operator algebra: the single-mode generator squares to the identity
/// and its one rotation maps the set sum to the sink, 200 random instances.
#[test]
fn criterion_02_axis_operator_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for case in 0..200 {
        let n = rng.gen_range(2..=8usize);
        let size = rng.gen_range(2..=6.min(2 * n));
        let ops = random_anticommuting_set(n, size, &mut rng);
        let betas = random_betas(size, &mut rng);
        let plan = build_single_rotation_plan(&ops, &betas).unwrap();
        assert_eq!(plan.steps.len(), 1, "case {case} unexpectedly degenerate");
        let axis = &plan.steps[0].generator;

        // X^2 = I, column by column.
        let dim = 1usize << n;
        let mut basis = vec![Complex64::new(0.0, 0.0); dim];
        let mut square_residual = 0.0;
        for col in 0..dim {
            basis[col] = Complex64::new(1.0, 0.0);
            let twice = apply_pauli_sum(axis, &apply_pauli_sum(axis, &basis));
            for (row, value) in twice.iter().enumerate() {
                let expected = if row == col { 1.0 } else { 0.0 };
                square_residual += (value - expected).norm_sqr();
            }
            basis[col] = Complex64::new(0.0, 0.0);
        }
        assert!(square_residual.sqrt() <= ORACLE_TOLERANCE, "case {case}: X^2 != I");

        let residual = conjugation_residual(n, &plan, &set_terms(&ops, &betas));
        assert!(residual <= ORACLE_TOLERANCE, "case {case}: residual {residual}");
    }
}

/// Ising pairing counts: rings halve 2L terms to L sets; q-regular graphs
/// land on exactly |E| sets, the q/(q+2) reduction.
#[test]
fn criterion_03_ising_pairing_counts() {
    for l in [4usize, 8, 16] {
        let (h, partition) = tim_pair_partition(&GraphSpec::ring(l), 0.8).unwrap();
        assert_eq!(h.term_count(), 2 * l);
        assert_eq!(partition.set_count(), l);
        assert!(partition.validate(&h));
    }
    for (graph, q) in [
        (GraphSpec::complete(4), 3usize),
        (GraphSpec::complete(5), 4),
        (GraphSpec::circulant(8, &[1, 2]), 4),
        (GraphSpec::circulant(6, &[1, 3]), 3),
    ] {
        let e = graph.edges().len();
        let v = graph.n_vertices();
        assert_eq!(2 * e, q * v, "graph is not {q}-regular");
        let (h, partition) = tim_pair_partition(&graph, 1.3).unwrap();
        assert_eq!(partition.set_count(), e);
        assert!(partition.validate(&h));
        // set/term ratio equals q/(q+2) exactly.
        assert_eq!(partition.set_count() * (q + 2), h.term_count() * q);
    }
}

/// Analytic partition of the quartic terms: the full term set at N splits
/// into exactly C(N,2)(N-2) validated sets; random sparse tables always
/// produce validated exact covers.
#[test]
fn criterion_04_analytic_cubic_partition() {
    for n in 4usize..=8 {
        let mut monomials = Vec::new();
        for p in 0..n {
            for q in (p + 1)..n {
                for r in 0..n {
                    for s in (r + 1)..n {
                        let mut indices = vec![2 * p, 2 * q, 2 * r + 1, 2 * s + 1];
                        indices.sort_unstable();
                        monomials.push((indices, 1.0));
                    }
                }
            }
        }
        let mp = MajoranaPolynomial::new(2 * n, monomials, 0.0).unwrap();
        let (h, partition) = theorem1_partition(&mp).unwrap();
        let expected = n * (n - 1) / 2 * (n - 2);
        assert_eq!(partition.set_count(), expected, "N = {n}");
        assert!(partition.validate(&h));
        let covered: usize = partition.sets().iter().map(Vec::len).sum();
        assert_eq!(covered, h.term_count());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for case in 0..100 {
        let n = rng.gen_range(3..=8usize);
        let table = random_table(n, &mut rng);
        let mp = to_majorana(&table);
        let (h, partition) = theorem1_partition(&mp).unwrap();
        assert!(partition.validate(&h), "case {case} (N = {n})");
    }
}

// Dense ladder-operator oracle for criterion 5, built from first principles.
mod ladder_oracle {
    use super::*;

    pub fn annihilator(p: usize, n: usize) -> Array2<Complex64> {
        let z = to_matrix(&"Z".parse().unwrap());
        let sigma = ndarray::array![
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]
        ];
        let eye = Array2::from_diag_elem(2, Complex64::new(1.0, 0.0));
        let mut m = Array2::from_elem((1, 1), Complex64::new(1.0, 0.0));
        for q in 0..n {
            let factor = if q < p {
                &z
            } else if q == p {
                &sigma
            } else {
                &eye
            };
            m = ndarray::linalg::kron(&m, factor);
        }
        m
    }

    pub fn dagger(m: &Array2<Complex64>) -> Array2<Complex64> {
        m.t().mapv(|v| v.conj())
    }

    pub fn gamma(mode: usize, n: usize) -> Array2<Complex64> {
        let a = annihilator(mode / 2, n);
        let ad = dagger(&a);
        if mode % 2 == 0 {
            a + ad
        } else {
            (a - ad).mapv(|v| v * Complex64::new(0.0, -1.0))
        }
    }

    pub fn fermionic(table: &IntegralTable) -> Array2<Complex64> {
        let n = table.n_orbitals();
        let dim = 1usize << n;
        let ops: Vec<Array2<Complex64>> = (0..n).map(|p| annihilator(p, n)).collect();
        let mut h = Array2::from_elem((dim, dim), Complex64::new(0.0, 0.0));
        for p in 0..n {
            for q in 0..n {
                let v = table.one(p, q);
                if v != 0.0 {
                    h = h + dagger(&ops[p]).dot(&ops[q]).mapv(|x| x * v);
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = table.two(p, q, r, s);
                        if v != 0.0 {
                            let quartic =
                                dagger(&ops[p]).dot(&dagger(&ops[q])).dot(&ops[r]).dot(&ops[s]);
                            h = h + quartic.mapv(|x| x * (0.5 * v));
                        }
                    }
                }
            }
        }
        h
    }

    pub fn majorana_form(mp: &MajoranaPolynomial) -> Array2<Complex64> {
        let n = mp.n_modes() / 2;
        let dim = 1usize << n;
        let mut h = Array2::from_diag_elem(dim, Complex64::new(mp.identity_offset(), 0.0));
        for (indices, coeff) in mp.monomials() {
            let mut m = Array2::from_diag_elem(dim, Complex64::new(1.0, 0.0));
            for &mode in indices {
                m = m.dot(&gamma(mode, n));
            }
            let phase = if (indices.len() / 2) % 2 == 1 {
                Complex64::new(0.0, 1.0)
            } else {
                Complex64::new(1.0, 0.0)
            };
            h = h + m.mapv(|x| x * phase * coeff);
        }
        h
    }
}

/// Majorana equivalence: fermionic, Majorana-form, and Jordan-Wigner Pauli
/// matrices agree within 1e-10 on 50 random symmetric tables, N in 2..4.
#[test]
fn criterion_05_majorana_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for case in 0..50 {
        let n = rng.gen_range(2..=4usize);
        let table = random_table(n, &mut rng);
        let mp = to_majorana(&table);
        let fermionic = ladder_oracle::fermionic(&table);
        let majorana = ladder_oracle::majorana_form(&mp);
        let pauli = hamiltonian_matrix(&jordan_wigner(&mp).unwrap());
        let d1 = frobenius_distance(&fermionic, &majorana);
        let d2 = frobenius_distance(&majorana, &pauli);
        let d3 = frobenius_distance(&fermionic, &pauli);
        assert!(
            d1 <= ORACLE_TOLERANCE && d2 <= ORACLE_TOLERANCE && d3 <= ORACLE_TOLERANCE,
            "case {case} (N = {n}): distances {d1:.2e} {d2:.2e} {d3:.2e}"
        );
    }
}

/// Measurement bounds: Lambda_c <= Lambda and Lambda/sqrt(s_max) <= Lambda_c
/// on 1000 random partitioned Hamiltonians; uniform coefficients with equal
/// set sizes saturate the lower bound to 1e-12.
#[test]
fn criterion_06_measurement_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 1000 {
        seed += 1;
        let n = rng.gen_range(4..=8usize);
        let k = rng.gen_range(1..=3.min(n));
        let m = rng.gen_range(2..=24usize);
        let h = random_klocal(n, m, k, seed).unwrap();
        if h.term_count() == 0 {
            continue;
        }
        let partition = greedy_color_with(
            &h,
            &GreedyOptions { seed: Some(seed), restarts: 2, max_set_size: None },
        );
        let report = cost_report(&h, &partition, 0.01).unwrap();
        assert!(
            report.lambda_after <= report.lambda_before * (1.0 + 1e-12),
            "upper bound violated at seed {seed}"
        );
        let lower = report.lambda_before / (report.s_max as f64).sqrt();
        assert!(
            lower <= report.lambda_after * (1.0 + 1e-12),
            "lower bound violated at seed {seed}"
        );
        checked += 1;
    }

    // Saturation: unit-coefficient Ising pairs, all sets of size 2.
    let (h, partition) = tim_pair_partition(&GraphSpec::ring(8), 1.0).unwrap();
    assert!(partition.sets().iter().all(|s| s.len() == 2));
    let report = cost_report(&h, &partition, 1.0).unwrap();
    let saturated = report.lambda_before / 2.0_f64.sqrt();
    assert!((report.lambda_after - saturated).abs() <= 1e-12);
}

/// Random-Hamiltonian statistics: Monte Carlo anticommute frequencies match
/// the closed forms within three standard errors at 1e5 samples, and the
/// k = 3 closed form matches the general sum to 1e-12 for n in 10..30.
#[test]
fn criterion_07_random_hamiltonian_statistics() {
    let samples = 100_000usize;

    let empirical = |n: usize, k: usize, seed: u64| -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| {
            let tuple = rand::seq::index::sample(rng, n, k);
            let mut letters = vec![PauliLetter::I; n];
            for q in tuple {
                letters[q] = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z]
                    [rng.gen_range(0..3)];
            }
            PauliString::from_letters(&letters).unwrap()
        };
        let mut anticommuting = 0usize;
        for _ in 0..samples {
            let a = draw(&mut rng);
            // One term per tuple: resample pairs drawn on the same support.
            let b = loop {
                let candidate = draw(&mut rng);
                if candidate.support() != a.support() {
                    break candidate;
                }
            };
            if !a.commutes(&b).unwrap() {
                anticommuting += 1;
            }
        }
        anticommuting as f64 / samples as f64
    };

    let p2 = anticommute_probability_2local(20);
    let se2 = (p2 * (1.0 - p2) / samples as f64).sqrt();
    let observed2 = empirical(20, 2, 777);
    assert!(
        (observed2 - p2).abs() <= 3.0 * se2,
        "k=2: observed {observed2}, expected {p2} +- {se2}"
    );

    let p3 = 1.0 - commute_probability(12, 3).unwrap();
    let se3 = (p3 * (1.0 - p3) / samples as f64).sqrt();
    let observed3 = empirical(12, 3, 778);
    assert!(
        (observed3 - p3).abs() <= 3.0 * se3,
        "k=3: observed {observed3}, expected {p3} +- {se3}"
    );

    for n in 10..=30 {
        let closed = commute_probability_3local_closed(n);
        let general = commute_probability(n, 3).unwrap();
        assert!((closed - general).abs() <= 1e-12, "n = {n}");
    }
}

/// Exact minimum anticommuting cover by branch and bound over the
/// anticommutation graph (a clique cover), used as the small-molecule
/// reference optimum.
fn minimum_cover(h: &PauliHamiltonian) -> usize {
    let m = h.term_count();
    let anticommute: Vec<Vec<bool>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| a != b && !h.operator(a).commutes(h.operator(b)).unwrap())
                .collect()
        })
        .collect();
    fn search(
        vertex: usize,
        m: usize,
        groups: &mut Vec<Vec<usize>>,
        best: &mut usize,
        anticommute: &[Vec<bool>],
    ) {
        if groups.len() >= *best {
            return;
        }
        if vertex == m {
            *best = groups.len();
            return;
        }
        for g in 0..groups.len() {
            if groups[g].iter().all(|&u| anticommute[u][vertex]) {
                groups[g].push(vertex);
                search(vertex + 1, m, groups, best, anticommute);
                groups[g].pop();
            }
        }
        groups.push(vec![vertex]);
        search(vertex + 1, m, groups, best, anticommute);
        groups.pop();
    }
    let mut best = m;
    search(0, m, &mut Vec::new(), &mut best, &anticommute);
    best
}

/// Order-of-magnitude reduction on the bundled molecular fixtures: greedy
/// set counts stay at or below terms/5 for the 8..14 qubit systems, the
/// 4-qubit H2 case lands within two sets of its exhaustive optimum, and the
/// analytic partition respects its cubic bound throughout.
#[test]
fn criterion_08_molecular_reduction() {
    // H2/STO-3G: compare against the exhaustive optimum.
    let (h2, h2_partition) = greedy_fixture_partition(&fixture("h2_sto3g.ints"));
    assert_eq!(h2.n_qubits(), 4);
    let optimum = minimum_cover(&h2);
    assert!(
        h2_partition.set_count() <= optimum + 2,
        "H2 greedy {} vs optimum {optimum}",
        h2_partition.set_count()
    );

    for name in ["h2_631g.ints", "lih_sto3g.ints", "beh2_sto3g.ints", "h2o_sto3g.ints"] {
        let text = fixture(name);
        let (h, partition) = greedy_fixture_partition(&text);
        assert!(partition.validate(&h));
        assert!(
            5 * partition.set_count() <= h.term_count(),
            "{name}: {} sets for {} terms",
            partition.set_count(),
            h.term_count()
        );

        // Analytic partition stays within its cubic set-count bound.
        let table = IntegralTable::parse(&text).unwrap();
        let mp = to_majorana(&table);
        let (jw, analytic) = theorem1_partition(&mp).unwrap();
        assert!(analytic.validate(&jw));
        let n = table.n_orbitals();
        assert!(analytic.set_count() <= n * (n - 1) / 2 * (n - 2) + 3, "{name}");
    }
}

/// Budgeted splitting: zero budget dissolves everything into singletons, an
/// effectively unbounded budget reproduces the unsplit partition, and the
/// set count is monotone non-increasing in the budget.
#[test]
fn criterion_09_budgeted_splitting() {
    for name in ["h2_631g.ints", "lih_sto3g.ints"] {
        let (h, base) = greedy_fixture_partition(&fixture(name));
        let (zero, plans, estimates) = budgeted_split(&base, &h, 0).unwrap();
        assert_eq!(zero.set_count(), h.term_count(), "{name} at budget 0");
        assert!(plans.iter().all(|p| p.steps.is_empty()));
        assert!(estimates.iter().all(|e| e.total_gates == 0));

        let mut previous = usize::MAX;
        for budget in [0usize, 10, 100, 1000, 10_000] {
            let (split, _, estimates) = budgeted_split(&base, &h, budget).unwrap();
            assert!(split.validate(&h));
            assert!(
                split.set_count() <= previous,
                "{name}: count grew from {previous} at budget {budget}"
            );
            assert!(estimates
                .iter()
                .zip(split.sets())
                .all(|(e, s)| e.total_gates <= budget || s.len() == 1));
            previous = split.set_count();
        }

        let (unbounded, _, _) = budgeted_split(&base, &h, usize::MAX).unwrap();
        assert_eq!(unbounded.set_count(), base.set_count(), "{name} unbounded");
    }
}

/// Clique-first random noncontextual Hamiltonian: pairwise anticommuting
/// bases on two low qubits, commuting Z-tails above, plus Z-class terms.
fn random_noncontextual(n_qubits: usize, rng: &mut ChaCha8Rng) -> PauliHamiltonian {
    let bases = ["XI", "YI", "ZX", "ZY", "ZZ"];
    let n_cliques = rng.gen_range(1..=bases.len());
    let mut terms = Vec::new();
    let distinct_tails = 1usize << (n_qubits - 2);
    for base in bases.iter().take(n_cliques) {
        let size = rng.gen_range(1..=3.min(distinct_tails));
        let mut tails: Vec<String> = Vec::new();
        while tails.len() < size {
            let tail: String = (2..n_qubits)
                .map(|_| if rng.gen_bool(0.5) { 'Z' } else { 'I' })
                .collect();
            if !tails.contains(&tail) {
                tails.push(tail);
            }
        }
        for tail in tails {
            let sign = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
            terms.push((
                sign * rng.gen_range(0.2..1.0),
                format!("{base}{tail}").parse::<PauliString>().unwrap(),
            ));
        }
    }
    for _ in 0..rng.gen_range(0..3) {
        let tail: String = (2..n_qubits)
            .map(|_| if rng.gen_bool(0.5) { 'Z' } else { 'I' })
            .collect();
        if tail.contains('Z') {
            terms.push((
                rng.gen_range(0.2..1.0),
                format!("II{tail}").parse::<PauliString>().unwrap(),
            ));
        }
    }
    PauliHamiltonian::new(n_qubits, terms, 0.0).unwrap()
}

/// Noncontextual reduction: the output commutes pairwise on 100 random
/// noncontextual instances, and the expectation identity holds to 1e-10 on
/// random states up to 8 qubits.
#[test]
fn criterion_10_noncontextual_reduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut produced = 0;
    while produced < 100 {
        let n = rng.gen_range(3..=8usize);
        let h = random_noncontextual(n, &mut rng);
        if h.term_count() == 0 {
            continue;
        }
        produced += 1;
        assert!(is_noncontextual(&h));
        let structure = decompose(&h).unwrap();
        let (reduced, plans) = reduce_to_commuting(&h, RotationMode::Sequence).unwrap();

        for a in 0..reduced.term_count() {
            for b in (a + 1)..reduced.term_count() {
                assert!(
                    reduced.operator(a).commutes(reduced.operator(b)).unwrap(),
                    "output terms {a} and {b} do not commute"
                );
            }
        }

        let state = random_state(n, &mut rng);
        let expect = |op: &PauliString, psi: &[Complex64]| -> f64 {
            let applied = apply_pauli(op, psi);
            psi.iter().zip(&applied).map(|(x, y)| (x.conj() * y).re).sum()
        };
        let direct: f64 =
            h.terms().iter().map(|(c, op)| c * expect(op, &state)).sum();
        let mut via_reduction: f64 = structure
            .z_terms
            .iter()
            .map(|&i| h.coefficient(i) * expect(h.operator(i), &state))
            .sum();
        for (j, plan) in plans.iter().enumerate() {
            let representative = structure.cliques[0][j];
            let coefficient = reduced
                .find_term(h.operator(representative))
                .map(|idx| reduced.coefficient(idx))
                .expect("representative term present in the reduced Hamiltonian");
            let rotated = apply_plan(plan, &state);
            via_reduction += coefficient * expect(h.operator(representative), &rotated);
        }
        assert!(
            (direct - via_reduction).abs() <= ORACLE_TOLERANCE,
            "expectation identity violated: {direct} vs {via_reduction}"
        );
    }
}

/// Dual-basis structural sets: the partitioned/original term ratio equals
/// (2N+1)/(4N-1) exactly, as integer counts, for N in {4, 8, 16}.
#[test]
fn criterion_11_dual_basis_ratio() {
    for n in [4usize, 8, 16] {
        let (h, partition) = dual_basis_structure(n, 11).unwrap();
        assert!(partition.validate(&h));
        assert_eq!(h.term_count(), 4 * n * n - n);
        assert_eq!(partition.set_count(), 2 * n * n + n);
        assert_eq!(
            partition.set_count() * (4 * n - 1),
            h.term_count() * (2 * n + 1),
            "ratio mismatch at N = {n}"
        );
    }
}

/// The reconstruction identity behind every report: rebuilding the
/// Hamiltonian from (gamma, plan, sink) bundles reproduces it exactly.
#[test]
fn reconstruction_identity_random_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    for _ in 0..20 {
        let n = rng.gen_range(3..=6usize);
        let h = random_klocal(n, 14, 2, rng.gen()).unwrap();
        if h.term_count() == 0 {
            continue;
        }
        let partition = greedy_color_with(
            &h,
            &GreedyOptions { seed: Some(3), restarts: 2, max_set_size: None },
        );
        for mode in [RotationMode::Sequence, RotationMode::Single] {
            let plans: Vec<RotationPlan> = plans_for_partition(&h, &partition, mode).unwrap();
            let residual = reconstruction_residual(&h, &partition, &plans);
            assert!(residual <= ORACLE_TOLERANCE, "mode {mode:?}: residual {residual}");
        }
    }
}
