//! Term reduction for qubit Hamiltonians by unitary partitioning.
//!
//! The crate partitions the terms of a Pauli Hamiltonian into completely
//! anticommuting sets, synthesizes the rotations that collapse each set to
//! a single Pauli operator, and accounts for the measurement and gate costs
//! of doing so. Everything is exact desk-scale tooling: a dense simulator
//! (up to twelve qubits) backs every verification path.
//!
//! Modules:
//! - [`pauli`]: packed symplectic Pauli algebra with phase tracking.
//! - [`hamiltonian`]: canonical term container and the text format.
//! - [`partition`]: compatibility graph and greedy anticommuting coloring.
//! - [`rotation`]: sequence and single-rotation plan synthesis.
//! - [`circuit`]: gate templates, cancellation, budgets, binary splitting.
//! - [`measure`]: shot allocation and l1-norm bounds.
//! - [`majorana`]: integral tables, Majorana form, Jordan-Wigner mapping,
//!   and the analytic cubic-count partition.
//! - [`generators`]: Ising/random/dual-basis model Hamiltonians and their
//!   commute-probability formulas.
//! - [`contextuality`]: noncontextuality test and reduction to commuting
//!   Hamiltonians.
//! - [`simulator`]: dense matrix/statevector oracle.
//! - [`report`]: JSON report schemas with fixed-precision floats.

pub mod circuit;
pub mod contextuality;
pub mod generators;
pub mod hamiltonian;
pub mod majorana;
pub mod measure;
pub mod partition;
pub mod pauli;
pub mod report;
pub mod rotation;
pub mod simulator;

pub use circuit::{budgeted_split, cancelled_gate_count, gate_count, CircuitEstimate};
pub use contextuality::{
    decompose, is_noncontextual, reduce_to_commuting, NoncontextualStructure,
};
pub use generators::{
    anticommute_probability_2local, commute_probability, dual_basis_structure, random_klocal,
    tim_hamiltonian, tim_pair_partition, GraphSpec,
};
pub use hamiltonian::{HamiltonianError, PauliHamiltonian};
pub use majorana::{jordan_wigner, theorem1_partition, to_majorana, IntegralTable, MajoranaPolynomial};
pub use measure::{cost_report, shot_allocation, variance_given_state, CostReport};
pub use partition::{
    compatibility_graph, greedy_color, greedy_color_with, AnticommutingPartition, GreedyOptions,
    PartitionError,
};
pub use pauli::{PauliError, PauliLetter, PauliString};
pub use rotation::{
    build_sequence_plan, build_single_rotation_plan, plans_for_partition, RotationError,
    RotationMode, RotationPlan, RotationStep,
};
pub use simulator::{DenseOperator, SimulatorError, MAX_DENSE_QUBITS};
