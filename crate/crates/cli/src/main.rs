use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qmse_cli::ingest::{self, Format, IngestError, Loaded, Need};
use qmse_cli::output::{emit, to_json};
use qmse_core::contraction::{contract_pair, direct_fidelity, find_common_fragments, PairFidelity};
use qmse_core::encoder::{build_matrix, build_qmse_circuit, topological_fingerprint};
use qmse_core::molgraph::to_token_chain;
use qmse_core::similarity::{fidelity_matrix, tanimoto_matrix, SimilarityError, SimilarityMatrix};
use qmse_core::vqml::{run_experiment, RunConfig, Task, VqmlError};
use qmse_core::{
    contracted_fidelity, parse_smiles, ContractionError, CouplingGate, EncodingParams, MolGraph, RotationGate,
    SimError, Simulator,
};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "qmse", version, about = "Quantum molecular structure encoding toolkit")]
struct Cli {
    /// Seed for every random choice; overrides the seed in a run config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report failures as a JSON object on stderr.
    #[arg(long, global = true)]
    json_errors: bool,
    /// Simulator qubit cap (default: QMSE_MAX_QUBITS or 26).
    #[arg(long, global = true)]
    max_qubits: Option<usize>,
    /// Write the primary output here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct EncodingArgs {
    /// Exponent on the atomic number in the diagonal term.
    #[arg(long, default_value_t = 3.0)]
    d: f64,
    /// Single- and two-qubit gate, e.g. `ry,rxx`.
    #[arg(long, default_value = "ry,rxx", value_parser = parse_gates)]
    gates: (RotationGate, CouplingGate),
    /// Encoding layers.
    #[arg(long, default_value_t = 1)]
    layers: usize,
    /// Drop the E/Z and tetrahedral signs.
    #[arg(long)]
    no_stereo: bool,
}

impl EncodingArgs {
    fn params(&self) -> EncodingParams {
        EncodingParams {
            d: self.d,
            use_stereo: !self.no_stereo,
            gate_1q: self.gates.0,
            gate_2q: self.gates.1,
            layers_x: self.layers,
        }
    }
}

#[derive(clap::Args)]
struct DatasetArgs {
    /// CSV (`smiles,name,label,target`) or JSON array of records.
    dataset: PathBuf,
    /// Input format; guessed from the extension when absent.
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
}

impl DatasetArgs {
    fn load(&self, need: Need) -> Result<Vec<Loaded>, CliError> {
        let format = match self.input_format {
            Some(InputFormat::Csv) => Format::Csv,
            Some(InputFormat::Json) => Format::Json,
            None => Format::from_path(&self.dataset),
        };
        Ok(ingest::ingest(&self.dataset, format, need)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Fidelity,
    Tanimoto,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixFormat {
    Csv,
    Json,
    /// `i j value` lines for gnuplot.
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum NeedArg {
    Either,
    Label,
    Target,
    Nothing,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the molecular graph as JSON.
    Parse { smiles: String },
    /// Coupling matrix and gate list of the encoding circuit.
    Encode {
        smiles: String,
        #[command(flatten)]
        enc: EncodingArgs,
    },
    /// Fidelity between the encodings of two molecules.
    Fidelity {
        a: String,
        b: String,
        /// Remove common chain fragments first.
        #[arg(long)]
        contract: bool,
        #[command(flatten)]
        enc: EncodingArgs,
    },
    /// Pairwise similarity matrix over a dataset.
    Matrix {
        #[command(flatten)]
        data: DatasetArgs,
        #[arg(long, value_enum, default_value = "fidelity")]
        kind: Kind,
        #[arg(long)]
        contract: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: MatrixFormat,
        /// Fingerprint length for tanimoto.
        #[arg(long, default_value_t = qmse_core::encoder::DEFAULT_NBITS)]
        nbits: usize,
        /// Longest fingerprint path, in bonds.
        #[arg(long, default_value_t = qmse_core::encoder::DEFAULT_MAX_PATH)]
        max_path: usize,
        #[command(flatten)]
        enc: EncodingArgs,
    },
    /// Chain-contraction plan for a pair of molecules.
    Contract {
        a: String,
        b: String,
        #[command(flatten)]
        enc: EncodingArgs,
    },
    /// Train a variational classifier with k-fold cross-validation.
    Classify {
        #[command(flatten)]
        data: DatasetArgs,
        /// Run configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Loss traces as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Train a variational regressor with k-fold cross-validation.
    Regress {
        #[command(flatten)]
        data: DatasetArgs,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Validate a dataset and re-emit it as JSON records.
    Ingest {
        #[command(flatten)]
        data: DatasetArgs,
        #[arg(long, value_enum, default_value = "either")]
        need: NeedArg,
    },
}

fn parse_gates(s: &str) -> Result<(RotationGate, CouplingGate), String> {
    let (one, two) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `<1q>,<2q>` such as `ry,rxx`, got '{s}'"))?;
    let one = one.trim().parse::<RotationGate>().map_err(|e| e.to_string())?;
    let two = two.trim().parse::<CouplingGate>().map_err(|e| e.to_string())?;
    Ok((one, two))
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Config(String),
    Resource(String),
    Compute(String),
    Io(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Config(_) => "config",
            CliError::Resource(_) => "resource",
            CliError::Compute(_) => "compute",
            CliError::Io(_) => "io",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m)
            | CliError::Config(m)
            | CliError::Resource(m)
            | CliError::Compute(m)
            | CliError::Io(m) => m,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Compute(format!("serialisation failed: {e}"))
    }
}

fn sim_error(e: &SimError) -> CliError {
    match e {
        SimError::TooManyQubits { .. } => CliError::Resource(e.to_string()),
        _ => CliError::Compute(e.to_string()),
    }
}

fn contraction_error(e: ContractionError) -> CliError {
    match &e {
        ContractionError::Sim(s) => sim_error(s),
        ContractionError::MultiLayer(_) | ContractionError::Encode(_) => CliError::Config(e.to_string()),
        ContractionError::StalePlan => CliError::Compute(e.to_string()),
    }
}

fn similarity_error(e: SimilarityError) -> CliError {
    match e {
        SimilarityError::Pair { a, b, source } => {
            let inner = contraction_error(source);
            let msg = format!("pair {a}/{b}: {}", inner.message());
            match inner {
                CliError::Resource(_) => CliError::Resource(msg),
                CliError::Config(_) => CliError::Config(msg),
                _ => CliError::Compute(msg),
            }
        }
        other => CliError::Input(other.to_string()),
    }
}

fn vqml_error(e: VqmlError) -> CliError {
    match &e {
        VqmlError::Sim(s) => sim_error(s),
        VqmlError::Config(_) | VqmlError::Encode(_) => CliError::Config(e.to_string()),
        VqmlError::Optimize(_) => CliError::Compute(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

fn molecule(s: &str) -> Result<MolGraph, CliError> {
    parse_smiles(s).map_err(|e| CliError::Input(format!("SMILES '{s}': {e}")))
}

fn validated(enc: &EncodingArgs) -> Result<EncodingParams, CliError> {
    let p = enc.params();
    p.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(p)
}

#[derive(Serialize)]
struct AtomOut {
    index: usize,
    symbol: &'static str,
    atomic_number: u8,
    tetra_parity: qmse_core::molgraph::TetraParity,
}

fn parse_cmd(smiles: &str) -> Result<String, CliError> {
    let g = molecule(smiles)?;
    let atoms: Vec<AtomOut> = g
        .atoms()
        .iter()
        .enumerate()
        .map(|(index, a)| AtomOut {
            index,
            symbol: a.symbol(),
            atomic_number: a.atomic_number,
            tetra_parity: a.tetra_parity,
        })
        .collect();
    let chain: Vec<String> = to_token_chain(&g).iter().map(ToString::to_string).collect();
    Ok(to_json(&json!({
        "source": g.source(),
        "n_atoms": g.n_atoms(),
        "n_bonds": g.n_bonds(),
        "atoms": atoms,
        "bonds": g.bonds(),
        "main_chain": chain,
    }))?)
}

fn encode_cmd(smiles: &str, enc: &EncodingArgs) -> Result<String, CliError> {
    let g = molecule(smiles)?;
    let p = validated(enc)?;
    let m = build_matrix(&g, &p);
    let c = build_qmse_circuit(&m, &p);
    let gates: Vec<_> = c
        .gates()
        .iter()
        .map(|gate| json!({"gate": format!("{:?}", gate.kind()), "qubits": gate.qubits(), "angle": gate.angle()}))
        .collect();
    Ok(to_json(&json!({
        "n_qubits": c.n_qubits(),
        "params": p,
        "matrix": m.rows(),
        "gates": gates,
    }))?)
}

fn fidelity_cmd(a: &str, b: &str, contract: bool, enc: &EncodingArgs, sim: &Simulator) -> Result<String, CliError> {
    let (p, q) = (molecule(a)?, molecule(b)?);
    let params = validated(enc)?;
    let PairFidelity { fidelity, qubits } = if contract {
        contracted_fidelity(&p, &q, &params, sim)
    } else {
        direct_fidelity(&p, &q, &params, sim)
    }
    .map_err(contraction_error)?;
    Ok(to_json(
        &json!({"fidelity": fidelity, "qubits": qubits, "contracted": contract}),
    )?)
}

fn contract_cmd(a: &str, b: &str, enc: &EncodingArgs) -> Result<String, CliError> {
    let (p, q) = (molecule(a)?, molecule(b)?);
    let params = validated(enc)?;
    let plan = find_common_fragments(&p, &q, &params);
    let (rp, rq) = contract_pair(&p, &q, &plan).map_err(contraction_error)?;
    Ok(to_json(&json!({
        "removed_atoms": plan.removed_atoms(),
        "qubits_saved": plan.qubits_saved(),
        "plan": plan,
        "reduced": [
            {"n_atoms": rp.n_atoms(), "n_bonds": rp.n_bonds()},
            {"n_atoms": rq.n_atoms(), "n_bonds": rq.n_bonds()},
        ],
    }))?)
}

#[allow(clippy::too_many_arguments)]
fn matrix_cmd(
    data: &DatasetArgs,
    kind: Kind,
    contract: bool,
    format: MatrixFormat,
    nbits: usize,
    max_path: usize,
    enc: &EncodingArgs,
    sim: &Simulator,
) -> Result<String, CliError> {
    let rows = data.load(Need::Nothing)?;
    let labels: Vec<String> = rows.iter().map(|r| r.record.name.clone()).collect();
    let mols: Vec<MolGraph> = rows.into_iter().map(|r| r.graph).collect();
    let m: SimilarityMatrix = match kind {
        Kind::Fidelity => {
            let params = validated(enc)?;
            fidelity_matrix(&mols, &labels, &params, contract, sim).map_err(similarity_error)?
        }
        Kind::Tanimoto => {
            let fps = mols
                .iter()
                .map(|g| topological_fingerprint(g, nbits, max_path))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Config(e.to_string()))?;
            tanimoto_matrix(&fps, &labels).map_err(similarity_error)?
        }
    };
    Ok(match format {
        MatrixFormat::Csv => match m.qubits_csv() {
            Some(q) => format!("{}\n{q}", m.to_csv()),
            None => m.to_csv(),
        },
        MatrixFormat::Json => to_json(&m.rounded())?,
        MatrixFormat::Grid => m.to_grid(),
    })
}

fn train_cmd(
    task: Task,
    data: &DatasetArgs,
    config: &Path,
    trace: Option<&Path>,
    seed: Option<u64>,
    max_qubits: usize,
) -> Result<String, CliError> {
    let text =
        std::fs::read_to_string(config).map_err(|e| CliError::Io(format!("cannot read {}: {e}", config.display())))?;
    let mut run: RunConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?;
    if run.task != task {
        let want = if task == Task::Classify { "classify" } else { "regress" };
        return Err(CliError::Config(format!(
            "{}: task must be \"{want}\" for this command",
            config.display()
        )));
    }
    if let Some(s) = seed {
        run.seed = s;
    }
    let need = if task == Task::Classify {
        Need::Label
    } else {
        Need::Target
    };
    let rows = data.load(need)?;
    let width = run
        .n_qubits
        .unwrap_or_else(|| rows.iter().map(|r| r.graph.n_atoms()).max().unwrap_or(0));
    Simulator::new(max_qubits)
        .check_width(width)
        .map_err(|e| sim_error(&e))?;
    let result = run_experiment(&run, &ingest::dataset(&rows, need)).map_err(vqml_error)?;
    if let Some(path) = trace {
        std::fs::write(path, result.trace_csv())
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(to_json(&result)?)
}

fn ingest_cmd(data: &DatasetArgs, need: NeedArg) -> Result<String, CliError> {
    let need = match need {
        NeedArg::Either => Need::Either,
        NeedArg::Label => Need::Label,
        NeedArg::Target => Need::Target,
        NeedArg::Nothing => Need::Nothing,
    };
    let rows = data.load(need)?;
    let records: Vec<_> = rows.into_iter().map(|r| r.record).collect();
    Ok(to_json(&records)?)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let sim = match cli.max_qubits {
        Some(m) => Simulator::new(m),
        None => Simulator::from_env(),
    };
    let text = match &cli.command {
        Command::Parse { smiles } => parse_cmd(smiles)?,
        Command::Encode { smiles, enc } => encode_cmd(smiles, enc)?,
        Command::Fidelity { a, b, contract, enc } => fidelity_cmd(a, b, *contract, enc, &sim)?,
        Command::Matrix {
            data,
            kind,
            contract,
            format,
            nbits,
            max_path,
            enc,
        } => matrix_cmd(data, *kind, *contract, *format, *nbits, *max_path, enc, &sim)?,
        Command::Contract { a, b, enc } => contract_cmd(a, b, enc)?,
        Command::Classify { data, config, trace } => {
            train_cmd(Task::Classify, data, config, trace.as_deref(), cli.seed, sim.max_qubits)?
        }
        Command::Regress { data, config, trace } => {
            train_cmd(Task::Regress, data, config, trace.as_deref(), cli.seed, sim.max_qubits)?
        }
        Command::Ingest { data, need } => ingest_cmd(data, *need)?,
    };
    emit(cli.out.as_deref(), &text)?;
    Ok(())
}

fn report(kind: &str, message: &str, json_errors: bool) {
    if json_errors {
        eprintln!("{}", json!({"error": {"kind": kind, "message": message}}));
    } else {
        eprintln!("error: {message}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if std::env::args().any(|a| a == "--json-errors") {
                let text = e.to_string();
                let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
                report("usage", first, true);
            } else {
                let _ = e.print();
            }
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(e.kind(), e.message(), cli.json_errors);
            ExitCode::FAILURE
        }
    }
}
