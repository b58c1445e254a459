use std::cmp::Ordering;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::{json, Map, Value};

use super::commands::SplitArgs;
use super::{usage, CliError, CliResult, Context, InputArgs, SmoothingArgs, StrategyArg};
use crate::dataio::{self, canonical_json};
use crate::ensemble::for_each_k;
use crate::evaluation::{repeated_clustering, score_split, split_edges, EdgeSplit, LinkPredScores};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepTask {
    Cluster,
    Linkpred,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub task: SweepTask,
    #[command(flatten)]
    pub input: InputArgs,
    /// Smallest K evaluated.
    #[arg(long, default_value_t = 1)]
    pub k_min: usize,
    /// Largest K evaluated.
    #[arg(long, default_value_t = 20)]
    pub k_max: usize,
    #[command(flatten)]
    pub smoothing: SmoothingArgs,
    /// Ensemble strategies evaluated, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![StrategyArg::Mean])]
    pub strategies: Vec<StrategyArg>,
    /// Labels for the clustering task (default: from the manifest).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Number of clusters (default: number of distinct labels).
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[command(flatten)]
    pub split: SplitArgs,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// One evaluated configuration. `score` is the selection metric.
struct Row {
    k: usize,
    strategy: StrategyArg,
    score: f64,
    metrics: Map<String, Value>,
    /// Held-out metrics, published for the selected row only.
    test: Option<LinkPredScores>,
}

fn strategy_name(s: StrategyArg) -> &'static str {
    crate::ensemble::EnsembleStrategy::from(s).as_str()
}

pub(super) fn run(ctx: &Context, a: &SweepArgs) -> CliResult<()> {
    if a.k_min > a.k_max {
        return usage(format!("empty K range {}..={}", a.k_min, a.k_max));
    }
    let mut strategies = a.strategies.clone();
    strategies.dedup();
    if strategies.is_empty() {
        return usage("--strategies needs at least one entry");
    }
    for &s in &strategies {
        a.smoothing.ensemble(s)?;
    }
    if a.report.is_none() && !ctx.stdout {
        return usage("nowhere to write the report: pass --report or --stdout");
    }
    let input = a.input.load()?;
    let k_values: Vec<usize> = (a.k_min..=a.k_max).collect();
    let cfg = a.smoothing.smoothing(a.k_max);

    let mut rows = Vec::new();
    let mut secs = 0.0;
    let selection;
    match a.task {
        SweepTask::Cluster => {
            selection = "nmi_mean";
            let labels = match (&a.labels, input.labels) {
                (Some(p), _) => dataio::load_labels(p)?,
                (None, Some(l)) => l,
                (None, None) => {
                    return usage("clustering sweep needs --labels or a labelled manifest")
                }
            };
            let clusters = a.clusters.unwrap_or_else(|| {
                let mut d = labels.clone();
                d.sort_unstable();
                d.dedup();
                d.len()
            });
            for &s in &strategies {
                let ens = a.smoothing.ensemble(s)?;
                let (done, t) = ctx.timed(|| {
                    for_each_k(
                        &input.graph,
                        &input.features,
                        &cfg,
                        &ens,
                        &k_values,
                        |k, z| {
                            let rc = repeated_clustering(
                                z, &labels, clusters, a.restarts, a.repeats, a.seed,
                            )?;
                            let metrics = json!({
                                "acc_mean": rc.acc.0, "acc_std": rc.acc.1,
                                "nmi_mean": rc.nmi.0, "nmi_std": rc.nmi.1,
                                "ari_mean": rc.ari.0, "ari_std": rc.ari.1,
                            });
                            rows.push(Row {
                                k,
                                strategy: s,
                                score: rc.nmi.0,
                                metrics: as_map(metrics),
                                test: None,
                            });
                            Ok(())
                        },
                    )
                });
                done?;
                secs += t;
            }
        }
        SweepTask::Linkpred => {
            selection = "val_auc";
            let split = split_edges(&input.graph, a.split.val_frac, a.split.test_frac, a.seed)?;
            if split.val_pos.is_empty() || split.test_pos.is_empty() {
                return usage("linkpred sweep needs non-empty validation and test splits");
            }
            for &s in &strategies {
                let ens = a.smoothing.ensemble(s)?;
                let (done, t) = ctx.timed(|| {
                    for_each_k(
                        &split.train_graph,
                        &input.features,
                        &cfg,
                        &ens,
                        &k_values,
                        |k, z| {
                            rows.push(linkpred_row(
                                k,
                                s,
                                z,
                                &split,
                                a.split.decoder_normalize.is_on(),
                            )?);
                            Ok(())
                        },
                    )
                });
                done?;
                secs += t;
            }
        }
    }

    // best first; ties go to the smaller K, then to the earlier strategy
    let order = |s: StrategyArg| strategies.iter().position(|&t| t == s);
    rows.sort_by(|x, y| {
        y.score
            .partial_cmp(&x.score)
            .unwrap_or(Ordering::Equal)
            .then(x.k.cmp(&y.k))
            .then(order(x.strategy).cmp(&order(y.strategy)))
    });

    let best = &rows[0];
    let mut selected = json!({
        "k": best.k,
        "strategy": strategy_name(best.strategy),
        "metrics": Value::Object(best.metrics.clone()),
    });
    if let Some(t) = best.test {
        selected["test_auc"] = json!(t.test_auc);
        selected["test_ap"] = json!(t.test_ap);
    }
    let table: Vec<Value> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            json!({
                "rank": i + 1,
                "k": r.k,
                "strategy": strategy_name(r.strategy),
                "score": r.score,
                "metrics": Value::Object(r.metrics.clone()),
            })
        })
        .collect();

    let mut config = Map::new();
    let mut echo = crate::evaluation::MetricReport::new(crate::evaluation::Task::Sweep);
    a.input.echo(&mut echo);
    a.smoothing.echo(&mut echo);
    ctx.echo_timing(&mut echo);
    config.extend(echo.config);
    let task = match a.task {
        SweepTask::Cluster => "cluster",
        SweepTask::Linkpred => "linkpred",
    };
    config.insert("sweep_task".into(), json!(task));
    config.insert("k_min".into(), json!(a.k_min));
    config.insert("k_max".into(), json!(a.k_max));
    config.insert(
        "strategies".into(),
        json!(strategies
            .iter()
            .map(|&s| strategy_name(s))
            .collect::<Vec<_>>()),
    );
    config.insert("seed".into(), json!(a.seed));
    match a.task {
        SweepTask::Cluster => {
            config.insert("restarts".into(), json!(a.restarts));
            config.insert("repeats".into(), json!(a.repeats));
        }
        SweepTask::Linkpred => {
            config.insert("val_frac".into(), json!(a.split.val_frac));
            config.insert("test_frac".into(), json!(a.split.test_frac));
            config.insert(
                "decoder_normalize".into(),
                json!(a.split.decoder_normalize.is_on()),
            );
        }
    }

    let out = json!({
        "task": "sweep",
        "selection_metric": selection,
        "selected": selected,
        "rows": table,
        "config": Value::Object(config),
        "runtime_seconds": secs,
    });
    ctx.emit_json(&canonical_json(&out), a.report.as_deref())
}

fn linkpred_row(
    k: usize,
    strategy: StrategyArg,
    z: &DenseMatrix,
    split: &EdgeSplit,
    normalize: bool,
) -> crate::Result<Row> {
    let scores = score_split(z, split, normalize)?;
    let (val_auc, val_ap) = match (scores.val_auc, scores.val_ap) {
        (Some(a), Some(p)) => (a, p),
        _ => {
            return Err(crate::NafsError::Internal(
                "validation split vanished".into(),
            ))
        }
    };
    Ok(Row {
        k,
        strategy,
        score: val_auc,
        metrics: as_map(json!({ "val_auc": val_auc, "val_ap": val_ap })),
        test: Some(scores),
    })
}

fn as_map(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.into())
    }
}
