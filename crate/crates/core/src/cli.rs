//! Command-line front end: `select`, `simulate` and `validate`.
//!
//! Machine-readable reports go to stdout or to files under `--out-dir`;
//! diagnostics go to stderr. Exit codes: 0 success, 1 load, configuration or
//! failed-check errors, 2 unknown strategy or suite names and usage errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::{load_matrix, write_atomic, IoError, MatrixFormat};
use crate::matrix::pass_at_1;
use crate::simulator::{
    run_experiment, run_experiment_with_threads, ExperimentConfig, ExperimentReport, SimError,
    SweepAxis,
};
use crate::strategies::{B4Hyperparams, StrategyError, StrategyKind, StrategySpec};
use crate::validation::{run_suite, Suite, ValidationError, ValidationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the number of simulation threads.
pub const THREADS_ENV: &str = "PLAUSEL_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    UnknownStrategy(StrategyError),
    #[error(transparent)]
    UnknownSuite(ValidationError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Strategy(StrategyError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Validation(ValidationError),
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{THREADS_ENV} must be a positive integer, got {0:?}")]
    Threads(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownStrategy(_) | CliError::UnknownSuite(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "plausel", version, about = "Select generated code solutions from a passing matrix")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pick solutions from a passing matrix file.
    Select(SelectArgs),
    /// Run a Monte Carlo comparison of strategies on synthetic matrices.
    Simulate(SimulateArgs),
    /// Check the closed-form error predictors numerically.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct SelectArgs {
    /// Passing matrix in JSON or CSV.
    #[arg(long)]
    pub matrix: PathBuf,
    /// One of b4, codet, mbr-exec, maxpass, random.
    #[arg(long, default_value = "b4")]
    pub strategy: String,
    #[arg(long, default_value_t = 10.0)]
    pub beta0: f64,
    #[arg(long = "alpha-xy", default_value_t = 10.0)]
    pub alpha_xy: f64,
    /// Matrix format; inferred from the extension when omitted.
    #[arg(long)]
    pub format: Option<MatrixFormat>,
    /// Seed for the random strategy.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the report to `select.json` in this directory.
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, clap::Args)]
pub struct SimulateArgs {
    /// JSON experiment configuration; every field is optional.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the seed in the configuration (which defaults to 0).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "out-dir", default_value = "plausel-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, clap::Args)]
pub struct ValidateArgs {
    /// One of all, tails, maxpass, codet, bound.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the report to `validate.json` in this directory.
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
}

/// Summary of one consensus set in a select report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSummary {
    pub solutions: Vec<String>,
    pub passed_tests: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectReport {
    pub strategy: String,
    pub chosen_solutions: Vec<String>,
    /// Row shared by every chosen solution, or `None` when they differ.
    pub chosen_test_signature: Option<Vec<u8>>,
    pub consensus_sets: Vec<SetSummary>,
    /// B4 log posterior of each consensus set, in set order.
    pub per_set_log_scores: Option<Vec<f64>>,
    /// Score of each consensus set on the raw scale: the exponentiated B4
    /// posterior (which may underflow to 0), or the heuristic score of the
    /// other strategies. Random has no scores.
    pub per_set_scores: Option<Vec<f64>>,
    pub pass_at_1_if_truth_present: Option<f64>,
}

pub fn cmd_select(args: &SelectArgs) -> Result<SelectReport, CliError> {
    let kind: StrategyKind = args.strategy.parse().map_err(CliError::UnknownStrategy)?;
    let file = load_matrix(&args.matrix, args.format)?;
    let hyper = B4Hyperparams::b4(args.beta0, args.alpha_xy).map_err(CliError::Strategy)?;
    let spec = StrategySpec::from_kind(kind, hyper);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let result = spec.select(&file.matrix, &mut rng);
    let m = &file.matrix;

    let first = m.row(result.chosen[0]);
    let shared = result.chosen.iter().all(|&i| m.row(i) == first);
    let consensus_sets = result
        .partition
        .iter()
        .map(|set| SetSummary {
            solutions: set.solution_indices.iter().map(|&i| m.solution_label(i)).collect(),
            passed_tests: set.test_signature.ones_indices().iter().map(|&j| m.test_label(j)).collect(),
        })
        .collect();
    let (per_set_log_scores, per_set_scores) = match kind {
        StrategyKind::B4 => (
            result.per_set_scores.clone(),
            result
                .per_set_scores
                .as_ref()
                .map(|v| v.iter().map(|s| s.exp()).collect()),
        ),
        _ => (None, result.per_set_scores.clone()),
    };
    let pass = match &file.truth_x {
        Some(truth) => Some(pass_at_1(&result.chosen, truth).expect("selection is non-empty")),
        None => None,
    };
    Ok(SelectReport {
        strategy: kind.name().to_string(),
        chosen_solutions: result.chosen.iter().map(|&i| m.solution_label(i)).collect(),
        chosen_test_signature: shared.then(|| first.iter().map(|&b| u8::from(b)).collect()),
        consensus_sets,
        per_set_log_scores,
        per_set_scores,
        pass_at_1_if_truth_present: pass,
    })
}

/// Optional sweep in a simulation configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// Contents of a `simulate --config` file: experiment settings plus an
/// optional `sweep` key. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationFile {
    #[serde(flatten)]
    pub experiment: ExperimentConfig,
    pub sweep: Option<SweepSpec>,
}

impl SimulationFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        let sweep = match value.as_object_mut().and_then(|o| o.remove("sweep")) {
            None | Some(serde_json::Value::Null) => None,
            Some(v) => Some(serde_json::from_value(v)?),
        };
        let experiment = serde_json::from_value(value)?;
        Ok(Self { experiment, sweep })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub axis: Option<SweepAxis>,
    pub values: Vec<f64>,
    pub reports: Vec<ExperimentReport>,
}

/// Paths written by [`cmd_simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutputs {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub plots: Vec<PathBuf>,
    pub summary_data: SimulationSummary,
}

/// Thread cap from `PLAUSEL_THREADS`, if set.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Threads(v)),
        },
    }
}

fn run_with_cap(config: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentReport, SimError> {
    match threads {
        Some(n) => run_experiment_with_threads(config, n),
        None => run_experiment(config),
    }
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

/// The per-run CSV: `axis_value,strategy,mean_pass_at_1,std_err,trials,seed`.
/// `axis_value` is empty when no sweep is configured.
pub fn simulation_csv(summary: &SimulationSummary) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["axis_value", "strategy", "mean_pass_at_1", "std_err", "trials", "seed"])
        .expect("in-memory write");
    for (k, report) in summary.reports.iter().enumerate() {
        let axis_value = summary.values.get(k).map(f64::to_string).unwrap_or_default();
        for o in &report.outcomes {
            w.write_record([
                axis_value.clone(),
                o.strategy.clone(),
                o.mean_pass_at_1.to_string(),
                o.std_err.to_string(),
                o.trials.to_string(),
                report.config.seed.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Runs the configured experiment or sweep and writes `simulate.csv`,
/// `summary.json` and one `plot_<strategy>.csv` (columns `x,y,err`) per
/// strategy into `out_dir`. Without a sweep, `x` is the number of solutions.
pub fn cmd_simulate(
    args: &SimulateArgs,
    threads: Option<usize>,
) -> Result<SimulationOutputs, CliError> {
    let mut file = match &args.config {
        None => SimulationFile {
            experiment: ExperimentConfig::default(),
            sweep: None,
        },
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| IoError::Read {
                path: path.clone(),
                source,
            })?;
            SimulationFile::from_json(&text).map_err(|e| CliError::Config {
                path: path.clone(),
                message: e.to_string(),
            })?
        }
    };
    if let Some(seed) = args.seed {
        file.experiment.seed = seed;
    }
    let config = &file.experiment;
    config.validate()?;

    let summary = match &file.sweep {
        None => SimulationSummary {
            axis: None,
            values: Vec::new(),
            reports: vec![run_with_cap(config, threads)?],
        },
        Some(sweep) => {
            if sweep.values.is_empty() {
                return Err(SimError::Config("sweep needs at least one value".into()).into());
            }
            let configs = sweep
                .values
                .iter()
                .map(|&v| sweep.axis.apply(config, v))
                .collect::<Result<Vec<_>, _>>()?;
            let reports = configs
                .iter()
                .map(|c| run_with_cap(c, threads))
                .collect::<Result<Vec<_>, _>>()?;
            SimulationSummary {
                axis: Some(sweep.axis),
                values: sweep.values.clone(),
                reports,
            }
        }
    };

    fs::create_dir_all(&args.out_dir).map_err(|source| IoError::Write {
        path: args.out_dir.clone(),
        source,
    })?;
    let csv_path = args.out_dir.join("simulate.csv");
    write_atomic(&csv_path, simulation_csv(&summary).as_bytes())?;
    let summary_path = args.out_dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary).expect("report is serializable") + "\n";
    write_atomic(&summary_path, json.as_bytes())?;

    let mut plots = Vec::new();
    for (k, label) in config.strategy_labels().iter().enumerate() {
        let mut text = String::from("x,y,err\n");
        for (r, report) in summary.reports.iter().enumerate() {
            let x = summary
                .values
                .get(r)
                .copied()
                .unwrap_or(report.config.n_solutions as f64);
            let o = &report.outcomes[k];
            text.push_str(&format!("{x},{},{}\n", o.mean_pass_at_1, o.std_err));
        }
        let path = args.out_dir.join(format!("plot_{}.csv", file_stem(label)));
        write_atomic(&path, text.as_bytes())?;
        plots.push(path);
    }
    Ok(SimulationOutputs {
        csv: csv_path,
        summary: summary_path,
        plots,
        summary_data: summary,
    })
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<ValidationReport, CliError> {
    let suite: Suite = args.suite.parse().map_err(CliError::UnknownSuite)?;
    run_suite(suite, args.seed).map_err(CliError::Validation)
}

fn write_report(dir: &Path, name: &str, json: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| IoError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    write_atomic(&dir.join(name), json.as_bytes())?;
    Ok(())
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Select(args) => {
            let report = cmd_select(args)?;
            let json = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
            if let Some(dir) = &args.out_dir {
                write_report(dir, "select.json", &json)?;
            }
            print!("{json}");
            Ok(EXIT_OK)
        }
        Command::Simulate(args) => {
            let out = cmd_simulate(args, threads_from_env()?)?;
            print!("{}", fs::read_to_string(&out.csv).map_err(|source| IoError::Read {
                path: out.csv.clone(),
                source,
            })?);
            eprintln!("wrote {} and {}", out.csv.display(), out.summary.display());
            Ok(EXIT_OK)
        }
        Command::Validate(args) => {
            let report = cmd_validate(args)?;
            let json = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
            if let Some(dir) = &args.out_dir {
                write_report(dir, "validate.json", &json)?;
            }
            print!("{json}");
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!(
                    "check {}/{} failed: measured {} against {} ({})",
                    c.suite, c.name, c.measured, c.tolerance, c.detail
                );
            }
            Ok(if report.passed { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
