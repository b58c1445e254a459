//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when input data cannot be used, 2 on usage
//! errors (bad flags or parameter values).

mod commands;
mod diagnose;
mod sweep;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::dataio;
use crate::ensemble::{EnsembleConfig, EnsembleStrategy, DEFAULT_R_VALUES};
use crate::error::NafsError;
use crate::evaluation::MetricReport;
use crate::graph::Graph;
use crate::matrix::DenseMatrix;
use crate::smoothing::{DistanceMode, SmoothingConfig, Weighting};

#[derive(Debug, Parser)]
#[command(
    name = "nafs",
    version,
    about = "Node-adaptive feature smoothing toolkit"
)]
pub struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Print the JSON report (or CSV table) to standard output.
    #[arg(long, global = true)]
    pub stdout: bool,

    /// Report a runtime of 0 so that reports are byte-identical across runs.
    #[arg(long, global = true)]
    pub no_timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smooth node features and write the embedding.
    Embed(commands::EmbedArgs),
    /// K-Means clustering of an embedding against ground-truth labels.
    Cluster(commands::ClusterArgs),
    /// Link prediction with held-out edges and an inner-product decoder.
    Linkpred(commands::LinkpredArgs),
    /// Over-smoothing diagnostics.
    #[command(subcommand)]
    Diagnose(diagnose::DiagnoseCommand),
    /// Evaluate a range of smoothing depths and rank them.
    Sweep(sweep::SweepArgs),
    /// Generate an Erdős–Rényi graph with standard-normal features.
    GenEr(commands::GenErArgs),
}

#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Data(NafsError),
}

impl From<NafsError> for CliError {
    fn from(e: NafsError) -> Self {
        match e {
            NafsError::Parameter(msg) => CliError::Usage(msg),
            other => CliError::Data(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Data(e) => write!(f, "{e}"),
        }
    }
}

pub(crate) type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Parses `std::env::args` and runs the command.
pub fn run() -> ExitCode {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nafs: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: &Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return usage("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Data(NafsError::Internal(e.to_string())))?;
    }
    let ctx = Context {
        stdout: cli.stdout,
        timing: !cli.no_timing,
    };
    match &cli.command {
        Command::Embed(a) => commands::embed(&ctx, a),
        Command::Cluster(a) => commands::cluster(&ctx, a),
        Command::Linkpred(a) => commands::linkpred(&ctx, a),
        Command::Diagnose(d) => diagnose::run(&ctx, d),
        Command::Sweep(a) => sweep::run(&ctx, a),
        Command::GenEr(a) => commands::gen_er(a),
    }
}

/// Global output settings shared by every command.
pub(crate) struct Context {
    pub stdout: bool,
    pub timing: bool,
}

impl Context {
    /// Runs `f`, returning its value and elapsed seconds (0 with timing off).
    pub fn timed<T>(&self, f: impl FnOnce() -> T) -> (T, f64) {
        let start = Instant::now();
        let value = f();
        let secs = if self.timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        };
        (value, secs)
    }

    pub fn echo_timing(&self, report: &mut MetricReport) {
        report.config("timing", if self.timing { "on" } else { "off" });
    }

    /// Writes canonical JSON to `path` and/or standard output.
    pub fn emit_json(&self, json: &str, path: Option<&Path>) -> CliResult<()> {
        if path.is_none() && !self.stdout {
            return usage("nowhere to write the report: pass --report or --stdout");
        }
        if let Some(p) = path {
            write_file(p, json.as_bytes())?;
        }
        if self.stdout {
            print!("{json}");
        }
        Ok(())
    }

    pub fn emit_report(&self, report: &MetricReport, path: Option<&Path>) -> CliResult<()> {
        self.emit_json(&dataio::report_json(report)?, path)
    }
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| {
        CliError::Data(NafsError::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    pub fn is_on(self) -> bool {
        self == Switch::On
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Mean,
    Max,
    Concat,
}

impl From<StrategyArg> for EnsembleStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Mean => EnsembleStrategy::Mean,
            StrategyArg::Max => EnsembleStrategy::Max,
            StrategyArg::Concat => EnsembleStrategy::Concat,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistanceArg {
    CosInitial,
    EuclidStationary,
}

impl From<DistanceArg> for DistanceMode {
    fn from(d: DistanceArg) -> Self {
        match d {
            DistanceArg::CosInitial => DistanceMode::CosInitial,
            DistanceArg::EuclidStationary => DistanceMode::EuclidStationary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Adaptive,
    Naive,
    SingleHop,
}

impl From<WeightingArg> for Weighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::Adaptive => Weighting::Adaptive,
            WeightingArg::Naive => Weighting::NaiveAverage,
            WeightingArg::SingleHop => Weighting::SingleHop,
        }
    }
}

/// Graph and features, either as two files or through a dataset manifest.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Edge list: two 0-based node ids per line, `#` comments allowed.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Feature matrix, binary or CSV; its row count fixes the node count.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Dataset manifest (JSON) naming graph, features, and optional labels.
    #[arg(long, conflicts_with_all = ["graph", "features"])]
    pub manifest: Option<PathBuf>,
}

pub(crate) struct Input {
    pub graph: Graph,
    pub features: DenseMatrix,
    pub labels: Option<Vec<usize>>,
}

impl InputArgs {
    pub(crate) fn load(&self) -> CliResult<Input> {
        if let Some(m) = &self.manifest {
            let d = dataio::load_dataset(m)?;
            return Ok(Input {
                graph: d.graph,
                features: d.features,
                labels: d.labels,
            });
        }
        let (Some(graph), Some(features)) = (&self.graph, &self.features) else {
            return usage("pass --graph and --features, or --manifest");
        };
        let features = dataio::load_features(features)?;
        let graph = dataio::load_edge_list(graph, Some(features.rows()))?;
        Ok(Input {
            graph,
            features,
            labels: None,
        })
    }

    pub fn echo(&self, report: &mut MetricReport) {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        if let Some(m) = path(&self.manifest) {
            report.config("manifest", m);
        }
        if let Some(g) = path(&self.graph) {
            report.config("graph", g);
        }
        if let Some(f) = path(&self.features) {
            report.config("features", f);
        }
    }
}

/// Smoothing flags shared by every command that builds embeddings.
#[derive(Debug, Clone, Args)]
pub struct SmoothingArgs {
    /// Operator exponents, comma separated.
    #[arg(long = "r", value_delimiter = ',', default_values_t = DEFAULT_R_VALUES.to_vec())]
    pub r: Vec<f64>,
    #[arg(long, value_enum, default_value_t = DistanceArg::CosInitial)]
    pub distance: DistanceArg,
    #[arg(long, value_enum, default_value_t = WeightingArg::Adaptive)]
    pub weighting: WeightingArg,
    /// L2-normalize input feature rows before smoothing.
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub normalize_rows: Switch,
    /// L2-normalize each branch's rows before pooling.
    #[arg(long)]
    pub post_normalize: bool,
    /// Run ensemble branches concurrently.
    #[arg(long)]
    pub parallel_branches: bool,
}

impl SmoothingArgs {
    pub fn smoothing(&self, k_max: usize) -> SmoothingConfig {
        SmoothingConfig {
            k_max,
            distance: self.distance.into(),
            weighting: self.weighting.into(),
            normalize_rows: self.normalize_rows.is_on(),
        }
    }

    pub(crate) fn ensemble(&self, strategy: StrategyArg) -> CliResult<EnsembleConfig> {
        let ens = EnsembleConfig {
            r_values: self.r.clone(),
            strategy: strategy.into(),
            post_normalize: self.post_normalize,
            parallel: self.parallel_branches,
        };
        ens.validate()?;
        Ok(ens)
    }

    pub fn echo(&self, report: &mut MetricReport) {
        let cfg = self.smoothing(0);
        report
            .config("r_values", Value::from(self.r.clone()))
            .config("distance", cfg.distance.as_str())
            .config("weighting", cfg.weighting.as_str())
            .config("normalize_rows", cfg.normalize_rows)
            .config("post_normalize", self.post_normalize);
    }
}

/// Writes a matrix as CSV when the path ends in `.csv`, binary otherwise.
pub(crate) fn save_matrix_auto(m: &DenseMatrix, path: &Path) -> CliResult<()> {
    let csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if csv {
        dataio::write_csv_matrix(m, path)?;
    } else {
        dataio::save_matrix(m, path)?;
    }
    Ok(())
}
