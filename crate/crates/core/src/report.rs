//! JSON report schemas shared by the library and the command line, plus a
//! serializer that prints every float with 17 significant digits so reports
//! are reproducible and diffable.

use std::io;

use serde::Serialize;
use serde_json::ser::{PrettyFormatter, Serializer};

use crate::circuit::CircuitEstimate;
use crate::hamiltonian::PauliHamiltonian;
use crate::measure::CostReport;
use crate::partition::AnticommutingPartition;
use crate::rotation::{RotationMode, RotationPlan};

pub const SCHEMA_VERSION: u32 = 1;

/// Pretty JSON formatter writing floats as `{:.16e}` (17 significant
/// digits, exact f64 round-trip).
struct SigFigFormatter {
    pretty: PrettyFormatter<'static>,
}

impl SigFigFormatter {
    fn new() -> Self {
        SigFigFormatter { pretty: PrettyFormatter::new() }
    }
}

macro_rules! delegate {
    ($($name:ident($($arg:ident : $ty:ty),*);)*) => {
        $(fn $name<W>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()>
        where
            W: ?Sized + io::Write,
        {
            self.pretty.$name(writer $(, $arg)*)
        })*
    };
}

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        end_object_value();
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        serde_json::ser::Formatter::begin_object_value(&mut self.pretty, writer)
    }
}

/// Serializes any value as pretty JSON with 17-significant-digit floats.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut serializer = Serializer::with_formatter(&mut out, SigFigFormatter::new());
    value.serialize(&mut serializer).expect("report serialization cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

#[derive(Debug, Clone, Serialize)]
pub struct HamiltonianJson {
    pub n_qubits: usize,
    pub identity_offset: f64,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TermJson {
    pub coefficient: f64,
    pub word: String,
}

impl HamiltonianJson {
    pub fn from_hamiltonian(h: &PauliHamiltonian) -> Self {
        HamiltonianJson {
            n_qubits: h.n_qubits(),
            identity_offset: h.identity_offset(),
            terms: h
                .terms()
                .iter()
                .map(|(c, op)| TermJson { coefficient: *c, word: op.word() })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SetJson {
    pub indices: Vec<usize>,
    pub words: Vec<String>,
    pub gamma: f64,
    pub betas: Vec<f64>,
    pub size: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionJson {
    pub set_count: usize,
    pub s_max: usize,
    pub sets: Vec<SetJson>,
}

impl PartitionJson {
    pub fn from_partition(h: &PauliHamiltonian, partition: &AnticommutingPartition) -> Self {
        let sets = partition
            .sets()
            .iter()
            .zip(partition.gammas())
            .zip(partition.betas())
            .map(|((indices, &gamma), betas)| SetJson {
                indices: indices.clone(),
                words: indices.iter().map(|&i| h.operator(i).word()).collect(),
                gamma,
                betas: betas.clone(),
                size: indices.len(),
            })
            .collect();
        PartitionJson { set_count: partition.set_count(), s_max: partition.s_max(), sets }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepJson {
    /// Signed generator terms; sequence steps carry exactly one.
    pub generator: Vec<TermJson>,
    pub angle: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanJson {
    pub set_index: usize,
    pub mode: RotationMode,
    pub sink: String,
    pub steps: Vec<StepJson>,
}

impl PlanJson {
    pub fn from_plan(plan: &RotationPlan) -> Self {
        PlanJson {
            set_index: plan.set_index,
            mode: plan.mode,
            sink: plan.sink.to_string(),
            steps: plan
                .steps
                .iter()
                .map(|step| StepJson {
                    generator: step
                        .generator
                        .iter()
                        .map(|(c, op)| TermJson { coefficient: *c, word: op.to_string() })
                        .collect(),
                    angle: step.angle,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyJson {
    pub max_rotation_residual: f64,
    pub reconstruction_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Top-level report emitted by the partition and estimate commands.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub schema_version: u32,
    pub timestamp: u64,
    pub input_path: String,
    pub strategy: String,
    pub mode: RotationMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_gates: Option<usize>,
    pub n_qubits: usize,
    pub terms_before: usize,
    pub sets_after: usize,
    pub partition: PartitionJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plans: Option<Vec<PlanJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate_counts: Option<Vec<CircuitEstimate>>,
    pub measurement_cost: CostReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyJson>,
}
