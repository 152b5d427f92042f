//! Command-line front end: `random-bench`, `heisenberg` and `m2`.
//!
//! Every flag can also come from a JSON config file (`--config`), organized
//! in one section per subcommand with keys spelled like the long flags:
//!
//! ```json
//! { "random-bench": { "n": 6, "sweeps": "6+4" }, "heisenberg": { "L": 8 } }
//! ```
//!
//! Explicit flags win over the config, which wins over built-in defaults.
//! Exit codes: 0 success, 2 bad flags or unreadable inputs, 3 numerical
//! failure (the responsible seed is printed).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::bench::{
    run_random_bench, write_aggregate_csv, write_per_realization_csv, BenchError,
    RandomBenchConfig,
};
use crate::heisenberg::{
    dense_cross_checks, run_heisenberg, write_heisenberg_csv, HeisenbergConfig, HeisenbergError,
};
use crate::mpo::MAX_DENSE_MPO_QUBITS;
use crate::mps::Mps;
use crate::serialize::{load_mps, load_statevector, peek_kind, SerializeError};
use crate::sre::{exact_m2, sampled_m2, MAX_EXACT_M2_QUBITS};
use crate::statevector::Statevector;
use crate::types::TruncationConfig;

/// Desk-scale tolerance for the automatic pipeline-coherence check.
pub const COHERENCE_TOL: f64 = 1e-6;
/// Desk-scale tolerance for the conjugated-spectrum check.
pub const SPECTRUM_TOL: f64 = 1e-8;

#[derive(Debug)]
enum CliError {
    /// Bad flags, malformed config, unreadable or unwritable files.
    Usage(String),
    /// The math failed; carries enough context to replay.
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("io: {e}"))
    }
}

impl From<SerializeError> for CliError {
    fn from(e: SerializeError) -> Self {
        CliError::Usage(format!("state file: {e}"))
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match &e {
            BenchError::Trajectory { seed, .. } => {
                CliError::Numerical(format!("{e} (failing seed: {seed})"))
            }
            BenchError::State(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<HeisenbergError> for CliError {
    fn from(e: HeisenbergError) -> Self {
        match e {
            HeisenbergError::ChainTooShort(_)
            | HeisenbergError::BadConfig(_)
            | HeisenbergError::Cache { .. }
            | HeisenbergError::Io(_)
            | HeisenbergError::Json(_) => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "dismagick",
    version,
    about = "Magic and entanglement reduction toolkit for qubit chains"
)]
struct Cli {
    /// Worker threads for realization-level parallelism (0 = all cores).
    /// Results are independent of this setting.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Race the three sweep strategies over seeded random states and write
    /// per-realization plus aggregate CSV trajectories.
    RandomBench(RandomBenchArgs),
    /// Baseline DMRG, then joint sweeps with the Hamiltonian conjugated in
    /// step; writes the per-sweep energy/M2/EE trajectory.
    Heisenberg(HeisenbergArgs),
    /// Print M2 and half-chain entanglement of a fixture or state file.
    M2(M2Args),
}

#[derive(Args, Debug)]
struct RandomBenchArgs {
    /// Number of qubits.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Clifford brickwork layers in the state preparation.
    #[arg(long = "clifford-depth")]
    clifford_depth: Option<usize>,
    /// Haar-random layers on top of the Clifford brickwork.
    #[arg(long = "haar-layers")]
    haar_layers: Option<usize>,
    /// Sweep split "m+k": m dismagicker + k disentangler sweeps. A plain
    /// integer means "m+0".
    #[arg(long)]
    sweeps: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Record per-sweep wall times (breaks byte-reproducibility of the CSV).
    #[arg(long)]
    timings: bool,
    /// Per-realization CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Aggregate CSV path.
    #[arg(long = "aggregate-out")]
    aggregate_out: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct RandomBenchFile {
    n: Option<usize>,
    realizations: Option<usize>,
    #[serde(rename = "clifford-depth")]
    clifford_depth: Option<usize>,
    #[serde(rename = "haar-layers")]
    haar_layers: Option<usize>,
    sweeps: Option<String>,
    seed: Option<u64>,
    timings: Option<bool>,
    out: Option<PathBuf>,
    #[serde(rename = "aggregate-out")]
    aggregate_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HeisenbergArgs {
    /// Chain length.
    #[arg(long = "L")]
    len: Option<usize>,
    /// Bond dimension of the cheap DMRG runs and the evolved state.
    #[arg(long = "D")]
    bond: Option<usize>,
    /// Number of joint sweeps.
    #[arg(long)]
    sweeps: Option<usize>,
    /// Random dismagicker candidates per bond.
    #[arg(long)]
    candidates: Option<usize>,
    /// Pauli samples per M2 estimate.
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Bond dimension of the cached reference run (long chains only).
    #[arg(long = "reference-bond")]
    reference_bond: Option<usize>,
    /// Relative cutoff for MPO conjugation and compression.
    #[arg(long = "mpo-cutoff")]
    mpo_cutoff: Option<f64>,
    /// Reference-cache directory; default $DISMAGICK_DATA_DIR or ./data.
    #[arg(long = "data-dir")]
    data_dir: Option<PathBuf>,
    /// Record per-sweep wall times (breaks byte-reproducibility of the CSV).
    #[arg(long)]
    timings: bool,
    /// Trajectory CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct HeisenbergFile {
    #[serde(rename = "L")]
    len: Option<usize>,
    #[serde(rename = "D")]
    bond: Option<usize>,
    sweeps: Option<usize>,
    candidates: Option<usize>,
    shots: Option<usize>,
    seed: Option<u64>,
    #[serde(rename = "reference-bond")]
    reference_bond: Option<usize>,
    #[serde(rename = "mpo-cutoff")]
    mpo_cutoff: Option<f64>,
    #[serde(rename = "data-dir")]
    data_dir: Option<PathBuf>,
    timings: Option<bool>,
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct M2Args {
    /// Named state: "zero", "ghz" or "t-product". Needs --n.
    #[arg(long, conflicts_with = "state")]
    fixture: Option<String>,
    /// Qubit count for --fixture.
    #[arg(long)]
    n: Option<usize>,
    /// A state file written by this toolkit (statevector or MPS).
    #[arg(long)]
    state: Option<PathBuf>,
    /// Sample the estimator instead of dense evaluation.
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct M2File {
    fixture: Option<String>,
    n: Option<usize>,
    state: Option<PathBuf>,
    shots: Option<usize>,
    seed: Option<u64>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(rename = "random-bench")]
    random_bench: Option<RandomBenchFile>,
    heisenberg: Option<HeisenbergFile>,
    m2: Option<M2File>,
}

fn load_config(path: &Option<PathBuf>) -> Result<ConfigFile, CliError> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))
        }
    }
}

fn parse_sweep_split(s: &str) -> Result<(usize, usize), CliError> {
    let bad = |e| CliError::Usage(format!("sweep split {s:?}: {e}"));
    match s.split_once('+') {
        Some((a, b)) => Ok((
            a.trim().parse().map_err(|e| bad(format!("{e}")))?,
            b.trim().parse().map_err(|e| bad(format!("{e}")))?,
        )),
        None => Ok((s.trim().parse().map_err(|e| bad(format!("{e}")))?, 0)),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    // OpenBLAS threading brings no speedup at these tensor sizes and the
    // worker pool already saturates the cores; pin it unless the user chose.
    if std::env::var_os("OPENBLAS_NUM_THREADS").is_none() {
        std::env::set_var("OPENBLAS_NUM_THREADS", "1");
    }
    let _ = env_logger::try_init();
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("warning: could not size the worker pool: {e}");
        }
    }
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let config = load_config(&cli.config)?;
    match cli.cmd {
        Command::RandomBench(args) => cmd_random_bench(args, config.random_bench.unwrap_or_default()),
        Command::Heisenberg(args) => cmd_heisenberg(args, config.heisenberg.unwrap_or_default()),
        Command::M2(args) => cmd_m2(args, config.m2.unwrap_or_default()),
    }
}

fn cmd_random_bench(args: RandomBenchArgs, file: RandomBenchFile) -> Result<(), CliError> {
    let defaults = RandomBenchConfig::default();
    let split = match args.sweeps.or(file.sweeps) {
        Some(s) => parse_sweep_split(&s)?,
        None => (defaults.dismagick_sweeps, defaults.disentangle_sweeps),
    };
    let cfg = RandomBenchConfig {
        qubits: args.n.or(file.n).unwrap_or(defaults.qubits),
        realizations: args
            .realizations
            .or(file.realizations)
            .unwrap_or(defaults.realizations),
        clifford_depth: args
            .clifford_depth
            .or(file.clifford_depth)
            .unwrap_or(defaults.clifford_depth),
        haar_layers: args
            .haar_layers
            .or(file.haar_layers)
            .unwrap_or(defaults.haar_layers),
        dismagick_sweeps: split.0,
        disentangle_sweeps: split.1,
        record_timings: args.timings || file.timings.unwrap_or(false),
        seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
        ..defaults
    };
    if cfg.qubits < 2 {
        return Err(CliError::Usage(format!("--n {}: need at least 2 qubits", cfg.qubits)));
    }
    if cfg.realizations == 0 {
        return Err(CliError::Usage("--realizations 0: nothing to do".into()));
    }

    let out = args
        .out
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from("random_bench.csv"));
    let agg_out = args
        .aggregate_out
        .or(file.aggregate_out)
        .unwrap_or_else(|| PathBuf::from("random_bench_aggregate.csv"));

    let outcome = run_random_bench(&cfg)?;

    let mut w = BufWriter::new(File::create(&out)?);
    write_per_realization_csv(&mut w, &outcome.trajectories)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(&agg_out)?);
    write_aggregate_csv(&mut w, &outcome.aggregates)?;
    w.flush()?;

    println!(
        "random-bench: n={} realizations={} sweeps={}+{} seed={}",
        cfg.qubits, cfg.realizations, cfg.dismagick_sweeps, cfg.disentangle_sweeps, cfg.seed
    );
    for strategy in cfg.strategies().iter().map(|s| s.name()) {
        let last = outcome
            .aggregates
            .iter()
            .filter(|a| a.strategy == strategy)
            .next_back();
        if let Some(a) = last {
            println!(
                "  {strategy:<14} final mean m2 {:.6}  mean ee {:.6}",
                a.mean_m2, a.mean_ee
            );
        }
    }
    println!("wrote {} and {}", out.display(), agg_out.display());
    Ok(())
}

fn cmd_heisenberg(args: HeisenbergArgs, file: HeisenbergFile) -> Result<(), CliError> {
    let defaults = HeisenbergConfig::default();
    let cfg = HeisenbergConfig {
        len: args.len.or(file.len).unwrap_or(defaults.len),
        bond: args.bond.or(file.bond).unwrap_or(defaults.bond),
        sweeps: args.sweeps.or(file.sweeps).unwrap_or(defaults.sweeps),
        candidates: args
            .candidates
            .or(file.candidates)
            .unwrap_or(defaults.candidates),
        shots: args.shots.or(file.shots).unwrap_or(defaults.shots),
        mpo_cutoff: args
            .mpo_cutoff
            .or(file.mpo_cutoff)
            .unwrap_or(defaults.mpo_cutoff),
        reference_bond: args
            .reference_bond
            .or(file.reference_bond)
            .unwrap_or(defaults.reference_bond),
        seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
        record_timings: args.timings || file.timings.unwrap_or(false),
        data_dir: args.data_dir.or(file.data_dir),
        ..defaults
    };
    let out = args
        .out
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from("heisenberg.csv"));

    let run = run_heisenberg(&cfg)?;

    let mut w = BufWriter::new(File::create(&out)?);
    write_heisenberg_csv(&mut w, &run.records)?;
    w.flush()?;

    println!(
        "heisenberg: L={} D={} sweeps={} candidates={} shots={} seed={}",
        cfg.len, cfg.bond, cfg.sweeps, cfg.candidates, cfg.shots, cfg.seed
    );
    println!("reference energy: {:.12}", run.reference_energy);
    for r in &run.records {
        println!(
            "  sweep {:>2}  m2 {:.4}  ee {:.4}  energy {:.10}  rel_error {:.3e}  gates {}",
            r.sweep, r.m2, r.ee, r.energy, r.relative_error, r.gates
        );
    }

    if cfg.len <= MAX_DENSE_MPO_QUBITS {
        let checks = dense_cross_checks(&run)?;
        let coherence_ok = checks.coherence_dev <= COHERENCE_TOL;
        let spectrum_ok = checks.spectrum_dev <= SPECTRUM_TOL;
        println!(
            "coherence_check: {} (|dE| = {:.3e}, tol {COHERENCE_TOL:.0e})",
            if coherence_ok { "pass" } else { "FAIL" },
            checks.coherence_dev
        );
        println!(
            "spectrum_check: {} (max dev = {:.3e}, tol {SPECTRUM_TOL:.0e})",
            if spectrum_ok { "pass" } else { "FAIL" },
            checks.spectrum_dev
        );
        if !coherence_ok || !spectrum_ok {
            return Err(CliError::Numerical(format!(
                "dense cross-checks failed at seed {}: coherence {:.3e}, spectrum {:.3e}",
                cfg.seed, checks.coherence_dev, checks.spectrum_dev
            )));
        }
    }
    println!("wrote {}", out.display());
    Ok(())
}

enum LoadedState {
    Dense(Statevector),
    Chain(Mps),
}

fn load_state_arg(path: &PathBuf) -> Result<LoadedState, CliError> {
    match peek_kind(path)?.as_str() {
        "statevector" => Ok(LoadedState::Dense(load_statevector(path)?)),
        "mps" => Ok(LoadedState::Chain(load_mps(path)?)),
        other => Err(CliError::Usage(format!(
            "{}: holds a {other:?}, not a state",
            path.display()
        ))),
    }
}

fn cmd_m2(args: M2Args, file: M2File) -> Result<(), CliError> {
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let shots = args.shots.or(file.shots);
    let fixture = args.fixture.or(file.fixture);
    let state_path = args.state.or(file.state);

    let state = match (&fixture, &state_path) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("--fixture and --state are exclusive".into()))
        }
        (None, None) => {
            return Err(CliError::Usage("need --fixture NAME or --state FILE".into()))
        }
        (Some(name), None) => {
            let n = args
                .n
                .or(file.n)
                .ok_or_else(|| CliError::Usage("--fixture needs --n".into()))?;
            let sv = match name.as_str() {
                "zero" => Statevector::zero_state(n),
                "ghz" => Statevector::ghz(n),
                "t-product" | "t_product" => Statevector::t_product(n),
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown fixture {other:?} (zero, ghz, t-product)"
                    )))
                }
            }
            .map_err(|e| CliError::Usage(e.to_string()))?;
            LoadedState::Dense(sv)
        }
        (None, Some(path)) => load_state_arg(path)?,
    };

    let numerical = |e: &dyn std::fmt::Display| CliError::Numerical(format!("{e} (seed {seed})"));

    let (qubits, est, ee) = match (&state, shots) {
        (LoadedState::Dense(sv), None) => {
            if sv.num_qubits() > MAX_EXACT_M2_QUBITS {
                return Err(CliError::Usage(format!(
                    "{} qubits exceed the dense limit {MAX_EXACT_M2_QUBITS}; pass --shots",
                    sv.num_qubits()
                )));
            }
            let est = crate::sre::SreEstimate::exact(exact_m2(sv).map_err(|e| numerical(&e))?);
            let ee = sv.half_chain_entropy().map_err(|e| numerical(&e))?;
            (sv.num_qubits(), est, ee)
        }
        (LoadedState::Dense(sv), Some(s)) => {
            let (mut mps, _) = Mps::from_statevector(sv, &TruncationConfig::exact())
                .map_err(|e| numerical(&e))?;
            let est = sampled_m2(&mps, s, seed).map_err(|e| numerical(&e))?;
            let ee = mps.half_chain_entropy().map_err(|e| numerical(&e))?;
            (sv.num_qubits(), est, ee)
        }
        (LoadedState::Chain(mps), Some(s)) => {
            let mut mps = mps.clone();
            let est = sampled_m2(&mps, s, seed).map_err(|e| numerical(&e))?;
            let ee = mps.half_chain_entropy().map_err(|e| numerical(&e))?;
            (mps.len(), est, ee)
        }
        (LoadedState::Chain(mps), None) => {
            if mps.len() > MAX_EXACT_M2_QUBITS {
                return Err(CliError::Usage(format!(
                    "{} sites exceed the dense limit {MAX_EXACT_M2_QUBITS}; pass --shots",
                    mps.len()
                )));
            }
            let sv = mps.to_statevector().map_err(|e| numerical(&e))?;
            let est = crate::sre::SreEstimate::exact(exact_m2(&sv).map_err(|e| numerical(&e))?);
            let mut mps = mps.clone();
            let ee = mps.half_chain_entropy().map_err(|e| numerical(&e))?;
            (sv.num_qubits(), est, ee)
        }
    };

    let mut doc = serde_json::json!({
        "qubits": qubits,
        "m2": est.value,
        "ee": ee,
        "method": match shots { Some(_) => "sampled", None => "exact" },
    });
    if let Some(s) = shots {
        doc["shots"] = serde_json::json!(s);
        doc["std_error"] = serde_json::json!(est.std_error);
        doc["seed"] = serde_json::json!(seed);
    }
    println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    Ok(())
}
