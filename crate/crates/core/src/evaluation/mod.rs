//! Downstream evaluation: K-Means node clustering and link prediction.

mod kmeans;
mod linkpred;
mod metrics;

pub use kmeans::{kmeans, ClusterResult, MAX_ITERATIONS};
pub use linkpred::{
    decode_scores, run_linkpred, score_split, split_edges, EdgeSplit, LinkPredScores, SplitConfig,
};
pub use metrics::{
    adjusted_rand_index, auc_ap, clustering_accuracy, clustering_metrics, normalized_mutual_info,
    ClusteringScores,
};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{NafsError, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Embed,
    Clustering,
    Linkpred,
    Diagnose,
    Sweep,
}

/// Outcome of one command: bounded metrics, free-form diagnostics, the
/// configuration that produced them, and the embedding runtime.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub task: Task,
    /// Every value lies in `[0, 1]`.
    pub metrics: BTreeMap<String, f64>,
    /// Unbounded companion values (raw ARI, counts, ...).
    pub diagnostics: BTreeMap<String, f64>,
    pub config: BTreeMap<String, serde_json::Value>,
    pub runtime_seconds: f64,
}

impl MetricReport {
    pub fn new(task: Task) -> Self {
        Self {
            task,
            metrics: BTreeMap::new(),
            diagnostics: BTreeMap::new(),
            config: BTreeMap::new(),
            runtime_seconds: 0.0,
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) -> Result<&mut Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(NafsError::Internal(format!(
                "metric `{name}` = {value} outside [0, 1]"
            )));
        }
        self.metrics.insert(name.to_string(), value);
        Ok(self)
    }

    pub fn diagnostic(&mut self, name: &str, value: f64) -> &mut Self {
        self.diagnostics.insert(name.to_string(), value);
        self
    }

    pub fn config(&mut self, key: &str, value: impl Into<serde_json::Value>) -> &mut Self {
        self.config.insert(key.to_string(), value.into());
        self
    }
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepeatedClustering {
    pub runs: Vec<ClusteringScores>,
    pub acc: (f64, f64),
    pub nmi: (f64, f64),
    pub ari: (f64, f64),
    pub ari_raw: (f64, f64),
}

impl RepeatedClustering {
    pub fn fill_report(&self, report: &mut MetricReport) -> Result<()> {
        report
            .metric("acc_mean", self.acc.0)?
            .metric("acc_std", self.acc.1)?
            .metric("nmi_mean", self.nmi.0)?
            .metric("nmi_std", self.nmi.1)?
            .metric("ari_mean", self.ari.0)?
            .metric("ari_std", self.ari.1)?;
        report
            .diagnostic("ari_raw_mean", self.ari_raw.0)
            .diagnostic("ari_raw_std", self.ari_raw.1)
            .diagnostic("repeats", self.runs.len() as f64);
        Ok(())
    }
}

/// Clusters `z` `repeats` times (each with `restarts` K-Means restarts and a
/// seed derived from `seed` and the repeat index) and summarizes ACC/NMI/ARI.
pub fn repeated_clustering(
    z: &DenseMatrix,
    truth: &[usize],
    clusters: usize,
    restarts: usize,
    repeats: usize,
    seed: u64,
) -> Result<RepeatedClustering> {
    if repeats == 0 {
        return Err(NafsError::param("repeats must be at least 1"));
    }
    if truth.len() != z.rows() {
        return Err(NafsError::dims(format!("{} labels", z.rows()), truth.len()));
    }
    let runs: Vec<ClusteringScores> = (0..repeats as u64)
        .map(|t| {
            let r = kmeans(z, clusters, restarts, seed.wrapping_add(t))?;
            clustering_metrics(&r.assignments, truth)
        })
        .collect::<Result<_>>()?;
    let col = |f: fn(&ClusteringScores) -> f64| mean_std(&runs.iter().map(f).collect::<Vec<_>>());
    Ok(RepeatedClustering {
        acc: col(|s| s.acc),
        nmi: col(|s| s.nmi),
        ari: col(|s| s.ari),
        ari_raw: col(|s| s.ari_raw),
        runs,
    })
}
