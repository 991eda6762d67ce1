//! Command-line front end: partition Hamiltonians into anticommuting sets,
//! generate model Hamiltonians, reduce noncontextual Hamiltonians, estimate
//! measurement costs, and verify rotations against the dense oracle.
//!
//! Exit codes: 0 success, 2 input error, 3 validation failure, 4
//! verification residual exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use unipart::circuit::{budgeted_split, cancelled_gate_count, CircuitEstimate};
use unipart::contextuality::{find_violating_triple, reduce_to_commuting};
use unipart::generators::{
    dual_basis_structure, dual_structure_partition_of, random_klocal, tim_hamiltonian,
    tim_pair_partition_of, GraphSpec,
};
use unipart::hamiltonian::PauliHamiltonian;
use unipart::majorana::{jordan_wigner, theorem1_partition, to_majorana, IntegralTable};
use unipart::measure::{cost_report, shot_allocation};
use unipart::partition::{greedy_color_with, AnticommutingPartition, GreedyOptions};
use unipart::report::{
    to_json_pretty, HamiltonianJson, PartitionJson, PartitionReport, PlanJson, VerifyJson,
    SCHEMA_VERSION,
};
use unipart::rotation::{plans_for_partition, RotationMode, RotationPlan};
use unipart::simulator::{
    conjugation_residual, ensure_dense_cap, reconstruction_residual,
};

const EXIT_INPUT: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl ToString) -> Self {
        CliError { code: EXIT_INPUT, message: message.to_string() }
    }

    fn validation(message: impl ToString) -> Self {
        CliError { code: EXIT_VALIDATION, message: message.to_string() }
    }

    fn verification(message: impl ToString) -> Self {
        CliError { code: EXIT_VERIFICATION, message: message.to_string() }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "unipart",
    about = "Anticommuting-set partitioning of Pauli Hamiltonians",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition a Hamiltonian into completely anticommuting sets and
    /// report rotations, gate counts, and measurement costs as JSON.
    Partition(PartitionArgs),
    /// Generate model Hamiltonians in the text format.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Map a noncontextual Hamiltonian to an effective commuting one.
    ReduceNoncontextual(ReduceArgs),
    /// Report measurement costs and per-term shot allocations.
    Estimate(EstimateArgs),
    /// Check rotation plans against the dense oracle.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Greedy,
    Majorana,
    Tim,
    Dual,
}

impl Strategy {
    fn name(self) -> &'static str {
        match self {
            Strategy::Greedy => "greedy",
            Strategy::Majorana => "majorana",
            Strategy::Tim => "tim",
            Strategy::Dual => "dual",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Sequence,
    Single,
}

impl From<Mode> for RotationMode {
    fn from(mode: Mode) -> RotationMode {
        match mode {
            Mode::Sequence => RotationMode::Sequence,
            Mode::Single => RotationMode::Single,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Auto,
    Hamiltonian,
    Integrals,
}

#[derive(Args)]
struct InputArgs {
    /// Hamiltonian text file or spin-orbital integral file.
    input: PathBuf,
    /// Input format; `auto` detects integral files by their `norb` header.
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    format: Format,
}

#[derive(Args)]
struct PartitionArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Partitioning strategy. `majorana` needs an integral file; `tim` and
    /// `dual` need structurally matching Hamiltonians.
    #[arg(long, value_enum, default_value_t = Strategy::Greedy)]
    strategy: Strategy,
    /// Rotation plan construction.
    #[arg(long, value_enum, default_value_t = Mode::Sequence)]
    mode: Mode,
    /// Maximum post-ansatz gate count; sets are binary-split to fit.
    #[arg(long)]
    budget: Option<usize>,
    /// Target precision for the measurement-cost report.
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Seed for greedy tie-break restarts.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of seeded greedy restarts.
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Check every rotation against the dense oracle (needs <= 12 qubits).
    #[arg(long)]
    verify: bool,
    /// Oracle tolerance used with --verify.
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Report destination (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// Transverse-field Ising model on a ring, complete, or circulant graph.
    Tim(TimArgs),
    /// Random k-local Pauli Hamiltonian.
    Random(RandomArgs),
    /// Plane-wave dual-basis structural term set with its partition.
    Dual(DualArgs),
}

#[derive(Args)]
struct TimArgs {
    /// Ring (periodic chain) length.
    #[arg(long, conflicts_with_all = ["complete", "circulant"])]
    ring: Option<usize>,
    /// Complete graph size.
    #[arg(long, conflicts_with = "circulant")]
    complete: Option<usize>,
    /// Circulant graph size (used with --offsets).
    #[arg(long, requires = "offsets")]
    circulant: Option<usize>,
    /// Comma-separated circulant offsets, e.g. 1,2.
    #[arg(long, value_delimiter = ',')]
    offsets: Vec<usize>,
    /// Transverse field strength.
    #[arg(long, default_value_t = 1.0)]
    x: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DualArgs {
    /// Basis functions per spin sector (the Hamiltonian spans 2*modes qubits).
    #[arg(long)]
    modes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Partition JSON destination; defaults to `<output>.partition.json`.
    #[arg(long)]
    partition_out: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Sequence)]
    mode: Mode,
    /// Commuting Hamiltonian destination (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Rotation plans JSON destination.
    #[arg(long)]
    plans_out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of seeded greedy restarts.
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Round shot counts up to integers.
    #[arg(long)]
    ceil: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = Strategy::Greedy)]
    strategy: Strategy,
    #[arg(long, value_enum, default_value_t = Mode::Sequence)]
    mode: Mode,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of seeded greedy restarts.
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Partition(args) => cmd_partition(args),
        Command::Generate(args) => cmd_generate(args),
        Command::ReduceNoncontextual(args) => cmd_reduce(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, content: &str) -> CliResult<()> {
    match path {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn looks_like_integrals(text: &str) -> bool {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .is_some_and(|l| l.starts_with("norb"))
}

enum ParsedInput {
    Hamiltonian(PauliHamiltonian),
    Integrals(IntegralTable),
}

fn parse_input(args: &InputArgs) -> CliResult<ParsedInput> {
    let text = read_file(&args.input)?;
    let as_integrals = match args.format {
        Format::Integrals => true,
        Format::Hamiltonian => false,
        Format::Auto => looks_like_integrals(&text),
    };
    if as_integrals {
        IntegralTable::parse(&text)
            .map(ParsedInput::Integrals)
            .map_err(CliError::input)
    } else {
        PauliHamiltonian::parse(&text)
            .map(ParsedInput::Hamiltonian)
            .map_err(CliError::input)
    }
}

fn build_partition(
    parsed: ParsedInput,
    strategy: Strategy,
    seed: Option<u64>,
    restarts: usize,
) -> CliResult<(PauliHamiltonian, AnticommutingPartition)> {
    match (strategy, parsed) {
        (Strategy::Majorana, ParsedInput::Integrals(table)) => {
            theorem1_partition(&to_majorana(&table)).map_err(CliError::validation)
        }
        (Strategy::Majorana, ParsedInput::Hamiltonian(_)) => Err(CliError::input(
            "the majorana strategy needs a spin-orbital integral file",
        )),
        (strategy, parsed) => {
            let h = match parsed {
                ParsedInput::Hamiltonian(h) => h,
                ParsedInput::Integrals(table) => {
                    jordan_wigner(&to_majorana(&table)).map_err(CliError::input)?
                }
            };
            let partition = match strategy {
                Strategy::Greedy => {
                    let options = GreedyOptions { seed, restarts, ..GreedyOptions::default() };
                    greedy_color_with(&h, &options)
                }
                Strategy::Tim => tim_pair_partition_of(&h).map_err(CliError::validation)?,
                Strategy::Dual => dual_structure_partition_of(&h).map_err(CliError::validation)?,
                Strategy::Majorana => unreachable!(),
            };
            Ok((h, partition))
        }
    }
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn verify_bundle(
    h: &PauliHamiltonian,
    partition: &AnticommutingPartition,
    plans: &[RotationPlan],
    tolerance: f64,
) -> CliResult<VerifyJson> {
    ensure_dense_cap(h.n_qubits()).map_err(CliError::input)?;
    let mut max_rotation = 0.0f64;
    for (plan, set) in plans.iter().zip(partition.sets()) {
        let betas = &partition.betas()[plan.set_index];
        let terms: Vec<(f64, unipart::PauliString)> = set
            .iter()
            .zip(betas)
            .map(|(&i, &beta)| (beta, h.operator(i).clone()))
            .collect();
        max_rotation = max_rotation.max(conjugation_residual(h.n_qubits(), plan, &terms));
    }
    let reconstruction = reconstruction_residual(h, partition, plans);
    let passed = max_rotation <= tolerance && reconstruction <= tolerance;
    Ok(VerifyJson {
        max_rotation_residual: max_rotation,
        reconstruction_residual: reconstruction,
        tolerance,
        passed,
    })
}

fn cmd_partition(args: PartitionArgs) -> CliResult<()> {
    if args.epsilon <= 0.0 {
        return Err(CliError::input("epsilon must be positive"));
    }
    let parsed = parse_input(&args.input)?;
    let (h, base_partition) = build_partition(parsed, args.strategy, args.seed, args.restarts)?;
    if let Err(violation) = base_partition.check(&h) {
        return Err(CliError::validation(violation));
    }

    let mode: RotationMode = args.mode.into();
    let (partition, plans, gate_counts): (
        AnticommutingPartition,
        Vec<RotationPlan>,
        Option<Vec<CircuitEstimate>>,
    ) = match args.budget {
        Some(budget) => {
            let (partition, plans, estimates) =
                budgeted_split(&base_partition, &h, budget).map_err(CliError::validation)?;
            (partition, plans, Some(estimates))
        }
        None => {
            let plans =
                plans_for_partition(&h, &base_partition, mode).map_err(CliError::validation)?;
            let estimates = match mode {
                RotationMode::Sequence => Some(
                    plans
                        .iter()
                        .map(cancelled_gate_count)
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(CliError::validation)?,
                ),
                RotationMode::Single => None,
            };
            (base_partition, plans, estimates)
        }
    };

    let measurement_cost =
        cost_report(&h, &partition, args.epsilon).map_err(CliError::validation)?;
    let verify = if args.verify {
        let report = verify_bundle(&h, &partition, &plans, args.tolerance)?;
        if !report.passed {
            let message = format!(
                "verification failed: rotation residual {:.3e}, reconstruction residual {:.3e}, tolerance {:.3e}",
                report.max_rotation_residual, report.reconstruction_residual, report.tolerance
            );
            // Still write the report so the residuals are inspectable.
            let report_json = render_report(&args, &h, &partition, &plans, gate_counts, measurement_cost, Some(report));
            write_output(args.output.as_deref(), &report_json)?;
            return Err(CliError::verification(message));
        }
        Some(report)
    } else {
        None
    };

    let json = render_report(&args, &h, &partition, &plans, gate_counts, measurement_cost, verify);
    write_output(args.output.as_deref(), &json)
}

#[allow(clippy::too_many_arguments)]
fn render_report(
    args: &PartitionArgs,
    h: &PauliHamiltonian,
    partition: &AnticommutingPartition,
    plans: &[RotationPlan],
    gate_counts: Option<Vec<CircuitEstimate>>,
    measurement_cost: unipart::CostReport,
    verify: Option<VerifyJson>,
) -> String {
    let report = PartitionReport {
        schema_version: SCHEMA_VERSION,
        timestamp: timestamp(),
        input_path: args.input.input.display().to_string(),
        strategy: args.strategy.name().to_string(),
        mode: args.mode.into(),
        seed: args.seed,
        max_gates: args.budget,
        n_qubits: h.n_qubits(),
        terms_before: h.term_count(),
        sets_after: partition.set_count(),
        partition: PartitionJson::from_partition(h, partition),
        plans: Some(plans.iter().map(PlanJson::from_plan).collect()),
        gate_counts,
        measurement_cost,
        verify,
    };
    to_json_pretty(&report)
}

fn cmd_generate(command: GenerateCommand) -> CliResult<()> {
    match command {
        GenerateCommand::Tim(args) => {
            let graph = match (args.ring, args.complete, args.circulant) {
                (Some(l), None, None) => GraphSpec::ring(l),
                (None, Some(k), None) => GraphSpec::complete(k),
                (None, None, Some(n)) => GraphSpec::circulant(n, &args.offsets),
                _ => {
                    return Err(CliError::input(
                        "choose exactly one of --ring, --complete, --circulant",
                    ))
                }
            };
            let h = tim_hamiltonian(&graph, args.x);
            write_output(args.output.as_deref(), &h.serialize())
        }
        GenerateCommand::Random(args) => {
            let h = random_klocal(args.n, args.m, args.k, args.seed).map_err(CliError::input)?;
            write_output(args.output.as_deref(), &h.serialize())
        }
        GenerateCommand::Dual(args) => {
            let (h, partition) =
                dual_basis_structure(args.modes, args.seed).map_err(CliError::input)?;
            write_output(args.output.as_deref(), &h.serialize())?;
            let partition_path = args.partition_out.or_else(|| {
                args.output
                    .as_ref()
                    .map(|p| p.with_extension("partition.json"))
            });
            if let Some(path) = partition_path {
                let json = to_json_pretty(&PartitionJson::from_partition(&h, &partition));
                write_output(Some(&path), &json)?;
            }
            Ok(())
        }
    }
}

fn cmd_reduce(args: ReduceArgs) -> CliResult<()> {
    let text = read_file(&args.input)?;
    let h = PauliHamiltonian::parse(&text).map_err(CliError::input)?;
    if let Some((a, b, c)) = find_violating_triple(&h) {
        return Err(CliError::validation(format!(
            "input is contextual: terms {a} ({}), {b} ({}), {c} ({}) violate transitivity of commutation",
            h.operator(a).word(),
            h.operator(b).word(),
            h.operator(c).word(),
        )));
    }
    let (reduced, plans) =
        reduce_to_commuting(&h, args.mode.into()).map_err(CliError::validation)?;
    write_output(args.output.as_deref(), &reduced.serialize())?;
    if let Some(path) = args.plans_out {
        let json = to_json_pretty(&plans.iter().map(PlanJson::from_plan).collect::<Vec<_>>());
        write_output(Some(&path), &json)?;
    }
    Ok(())
}

fn cmd_estimate(args: EstimateArgs) -> CliResult<()> {
    if args.epsilon <= 0.0 {
        return Err(CliError::input("epsilon must be positive"));
    }
    let parsed = parse_input(&args.input)?;
    let (h, partition) = build_partition(parsed, Strategy::Greedy, args.seed, args.restarts)?;
    let report = cost_report(&h, &partition, args.epsilon).map_err(CliError::validation)?;
    let coeffs: Vec<f64> = h.terms().iter().map(|(c, _)| *c).collect();
    let mut shots_before =
        shot_allocation(&coeffs, None, args.epsilon).map_err(CliError::validation)?;
    let mut shots_after = shot_allocation(partition.gammas(), None, args.epsilon)
        .map_err(CliError::validation)?;
    if args.ceil {
        for s in shots_before.iter_mut().chain(shots_after.iter_mut()) {
            *s = s.ceil();
        }
    }

    #[derive(serde::Serialize)]
    struct EstimateReport {
        schema_version: u32,
        timestamp: u64,
        input_path: String,
        epsilon: f64,
        terms_before: usize,
        sets_after: usize,
        measurement_cost: unipart::CostReport,
        shots_per_term: Vec<f64>,
        shots_per_set: Vec<f64>,
    }
    let json = to_json_pretty(&EstimateReport {
        schema_version: SCHEMA_VERSION,
        timestamp: timestamp(),
        input_path: args.input.input.display().to_string(),
        epsilon: args.epsilon,
        terms_before: h.term_count(),
        sets_after: partition.set_count(),
        measurement_cost: report,
        shots_per_term: shots_before,
        shots_per_set: shots_after,
    });
    write_output(args.output.as_deref(), &json)
}

fn cmd_verify(args: VerifyArgs) -> CliResult<()> {
    let parsed = parse_input(&args.input)?;
    let (h, partition) = build_partition(parsed, args.strategy, args.seed, args.restarts)?;
    let plans =
        plans_for_partition(&h, &partition, args.mode.into()).map_err(CliError::validation)?;
    let report = verify_bundle(&h, &partition, &plans, args.tolerance)?;

    #[derive(serde::Serialize)]
    struct VerifyReport {
        schema_version: u32,
        timestamp: u64,
        input_path: String,
        strategy: String,
        mode: RotationMode,
        n_qubits: usize,
        terms_before: usize,
        sets_after: usize,
        hamiltonian: HamiltonianJson,
        verify: VerifyJson,
    }
    let passed = report.passed;
    let mut summary = String::new();
    writeln!(
        summary,
        "rotation residual {:.3e}, reconstruction residual {:.3e} (tolerance {:.3e})",
        report.max_rotation_residual, report.reconstruction_residual, report.tolerance
    )
    .unwrap();
    let json = to_json_pretty(&VerifyReport {
        schema_version: SCHEMA_VERSION,
        timestamp: timestamp(),
        input_path: args.input.input.display().to_string(),
        strategy: args.strategy.name().to_string(),
        mode: args.mode.into(),
        n_qubits: h.n_qubits(),
        terms_before: h.term_count(),
        sets_after: partition.set_count(),
        hamiltonian: HamiltonianJson::from_hamiltonian(&h),
        verify: report,
    });
    write_output(args.output.as_deref(), &json)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::verification(summary.trim().to_string()))
    }
}
