use std::path::PathBuf;

use clap::Args;

use super::{
    save_matrix_auto, usage, CliResult, Context, InputArgs, SmoothingArgs, StrategyArg, Switch,
};
use crate::dataio;
use crate::ensemble::nafs_ensemble;
use crate::evaluation::{repeated_clustering, score_split, split_edges, MetricReport, Task};
use crate::graph::{generate_er, normal_features};

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Maximal smoothing step K.
    #[arg(long, default_value_t = 20)]
    pub k_max: usize,
    #[command(flatten)]
    pub smoothing: SmoothingArgs,
    #[arg(long, value_enum, default_value_t = StrategyArg::Mean)]
    pub ensemble: StrategyArg,
    /// Recorded in the report; embedding is deterministic regardless.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Embedding output; `.csv` selects CSV, anything else the binary format.
    #[arg(long)]
    pub out: PathBuf,
    /// Report path (default: `<out>.report.json`).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub(super) fn embed(ctx: &Context, a: &EmbedArgs) -> CliResult<()> {
    let cfg = a.smoothing.smoothing(a.k_max);
    let ens = a.smoothing.ensemble(a.ensemble)?;
    let input = a.input.load()?;
    let (z, secs) = ctx.timed(|| nafs_ensemble(&input.graph, &input.features, &cfg, &ens));
    let z = z?;
    save_matrix_auto(&z, &a.out)?;

    let mut report = MetricReport::new(Task::Embed);
    a.input.echo(&mut report);
    a.smoothing.echo(&mut report);
    report
        .config("k_max", a.k_max)
        .config("ensemble", ens.strategy.as_str())
        .config("seed", a.seed)
        .config("out", a.out.display().to_string());
    ctx.echo_timing(&mut report);
    report
        .diagnostic("nodes", input.graph.node_count() as f64)
        .diagnostic("edges", input.graph.edge_count() as f64)
        .diagnostic("input_dim", input.features.cols() as f64)
        .diagnostic("embedding_dim", z.cols() as f64);
    report.runtime_seconds = secs;

    let default_path;
    let path = match (&a.report, ctx.stdout) {
        (Some(p), _) => Some(p.as_path()),
        (None, true) => None,
        (None, false) => {
            let mut s = a.out.clone().into_os_string();
            s.push(".report.json");
            default_path = PathBuf::from(s);
            Some(default_path.as_path())
        }
    };
    ctx.emit_report(&report, path)
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Embedding matrix, binary or CSV.
    #[arg(long)]
    pub embedding: PathBuf,
    /// Ground-truth labels, one integer per line.
    #[arg(long)]
    pub labels: PathBuf,
    /// Number of clusters c.
    #[arg(long)]
    pub clusters: usize,
    /// K-Means restarts per run; the lowest-inertia restart is kept.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    /// Independent seeded runs summarized as mean and standard deviation.
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub(super) fn cluster(ctx: &Context, a: &ClusterArgs) -> CliResult<()> {
    let z = dataio::load_features(&a.embedding)?;
    let labels = dataio::load_labels(&a.labels)?;
    let (rc, secs) =
        ctx.timed(|| repeated_clustering(&z, &labels, a.clusters, a.restarts, a.repeats, a.seed));
    let rc = rc?;
    let mut report = MetricReport::new(Task::Clustering);
    rc.fill_report(&mut report)?;
    report
        .config("embedding", a.embedding.display().to_string())
        .config("labels", a.labels.display().to_string())
        .config("clusters", a.clusters)
        .config("restarts", a.restarts)
        .config("repeats", a.repeats)
        .config("seed", a.seed);
    ctx.echo_timing(&mut report);
    report.runtime_seconds = secs;
    ctx.emit_report(&report, a.report.as_deref())
}

/// Flags for the held-out edge protocol.
#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    #[arg(long, default_value_t = 0.05)]
    pub val_frac: f64,
    #[arg(long, default_value_t = 0.10)]
    pub test_frac: f64,
    /// L2-normalize embedding rows before the inner-product decoder.
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub decoder_normalize: Switch,
}

impl SplitArgs {
    pub fn echo(&self, report: &mut MetricReport) {
        report
            .config("val_frac", self.val_frac)
            .config("test_frac", self.test_frac)
            .config("decoder_normalize", self.decoder_normalize.is_on());
    }
}

#[derive(Debug, Args)]
pub struct LinkpredArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 20)]
    pub k_max: usize,
    #[command(flatten)]
    pub smoothing: SmoothingArgs,
    #[arg(long, value_enum, default_value_t = StrategyArg::Mean)]
    pub ensemble: StrategyArg,
    #[command(flatten)]
    pub split: SplitArgs,
    /// Seed of the edge split and negative sampling.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub(super) fn linkpred(ctx: &Context, a: &LinkpredArgs) -> CliResult<()> {
    let cfg = a.smoothing.smoothing(a.k_max);
    let ens = a.smoothing.ensemble(a.ensemble)?;
    let input = a.input.load()?;
    let split = split_edges(&input.graph, a.split.val_frac, a.split.test_frac, a.seed)?;
    if split.test_pos.is_empty() {
        return usage("test split is empty: raise --test-frac");
    }
    // embed the training graph only, so held-out edges cannot leak
    let (z, secs) = ctx.timed(|| nafs_ensemble(&split.train_graph, &input.features, &cfg, &ens));
    let scores = score_split(&z?, &split, a.split.decoder_normalize.is_on())?;

    let mut report = MetricReport::new(Task::Linkpred);
    report
        .metric("test_auc", scores.test_auc)?
        .metric("test_ap", scores.test_ap)?;
    if let (Some(auc), Some(ap)) = (scores.val_auc, scores.val_ap) {
        report.metric("val_auc", auc)?.metric("val_ap", ap)?;
    }
    a.input.echo(&mut report);
    a.smoothing.echo(&mut report);
    a.split.echo(&mut report);
    report
        .config("k_max", a.k_max)
        .config("ensemble", ens.strategy.as_str())
        .config("seed", a.seed);
    ctx.echo_timing(&mut report);
    report
        .diagnostic("train_edges", split.train_graph.edge_count() as f64)
        .diagnostic("val_edges", split.val_pos.len() as f64)
        .diagnostic("test_edges", split.test_pos.len() as f64);
    report.runtime_seconds = secs;
    ctx.emit_report(&report, a.report.as_deref())
}

#[derive(Debug, Args)]
pub struct GenErArgs {
    #[arg(long)]
    pub nodes: usize,
    /// Probability of each possible edge.
    #[arg(long)]
    pub edge_prob: f64,
    /// Columns of the standard-normal feature matrix.
    #[arg(long, default_value_t = 64)]
    pub feat_dim: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Edge list output.
    #[arg(long)]
    pub graph_out: PathBuf,
    /// Feature output; `.csv` selects CSV, anything else the binary format.
    #[arg(long)]
    pub features_out: PathBuf,
}

pub(super) fn gen_er(a: &GenErArgs) -> CliResult<()> {
    let g = generate_er(a.nodes, a.edge_prob, a.seed)?;
    dataio::write_edge_list(&g, &a.graph_out)?;
    save_matrix_auto(
        &normal_features(a.nodes, a.feat_dim, a.seed),
        &a.features_out,
    )?;
    eprintln!(
        "generated {} nodes, {} edges, {} feature columns",
        g.node_count(),
        g.edge_count(),
        a.feat_dim
    );
    Ok(())
}
