use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::metrics::auc_ap;
use crate::ensemble::{nafs_ensemble, EnsembleConfig};
use crate::error::{NafsError, Result};
use crate::graph::Graph;
use crate::matrix::{dot, DenseMatrix};
use crate::smoothing::SmoothingConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    pub val_frac: f64,
    pub test_frac: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            val_frac: 0.05,
            test_frac: 0.10,
            seed: 42,
        }
    }
}

/// Held-out positive edges with equally many sampled non-edges.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSplit {
    /// Input graph minus validation and test positives.
    pub train_graph: Graph,
    pub val_pos: Vec<(usize, usize)>,
    pub val_neg: Vec<(usize, usize)>,
    pub test_pos: Vec<(usize, usize)>,
    pub test_neg: Vec<(usize, usize)>,
    pub seed: u64,
}

/// Reserves `⌊m·val_frac⌋` and `⌊m·test_frac⌋` edges uniformly at random and
/// samples as many non-edges of the original graph for each split.
pub fn split_edges(g: &Graph, val_frac: f64, test_frac: f64, seed: u64) -> Result<EdgeSplit> {
    let valid = |f: f64| (0.0..1.0).contains(&f);
    if !valid(val_frac) || !valid(test_frac) || val_frac + test_frac >= 1.0 {
        return Err(NafsError::param(format!(
            "split fractions must be non-negative and sum below 1, got {val_frac} + {test_frac}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = g.edges();
    let m = edges.len();
    let n_val = (m as f64 * val_frac).floor() as usize;
    let n_test = (m as f64 * test_frac).floor() as usize;
    edges.shuffle(&mut rng);
    let val_pos = edges[..n_val].to_vec();
    let test_pos = edges[n_val..n_val + n_test].to_vec();
    let train_graph = Graph::from_edges(g.node_count(), &edges[n_val + n_test..])?;

    let negatives = sample_non_edges(g, n_val + n_test, &mut rng)?;
    let (val_neg, test_neg) = negatives.split_at(n_val);
    Ok(EdgeSplit {
        train_graph,
        val_pos,
        val_neg: val_neg.to_vec(),
        test_pos,
        test_neg: test_neg.to_vec(),
        seed,
    })
}

fn sample_non_edges(g: &Graph, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>> {
    let n = g.node_count();
    let all_pairs = n * n.saturating_sub(1) / 2;
    let available = all_pairs - g.edge_count();
    if count == 0 {
        return Ok(Vec::new());
    }
    if available < count {
        return Err(NafsError::param(format!(
            "graph too dense: need {count} non-edges, only {available} exist"
        )));
    }
    if 2 * count > available {
        // rejection sampling would crawl; enumerate instead
        let mut pool: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !g.has_edge(u, v))
            .collect();
        pool.shuffle(rng);
        pool.truncate(count);
        return Ok(pool);
    }
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let pair = (u.min(v), u.max(v));
        if g.has_edge(pair.0, pair.1) || !seen.insert(pair) {
            continue;
        }
        out.push(pair);
    }
    Ok(out)
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Inner-product decoder: `sigmoid(Z_u · Z_v)` per pair, on L2-normalized
/// rows when `normalize` is set.
pub fn decode_scores(
    z: &DenseMatrix,
    pairs: &[(usize, usize)],
    normalize: bool,
) -> Result<Vec<f64>> {
    let n = z.rows();
    if let Some(&(u, v)) = pairs.iter().find(|&&(u, v)| u >= n || v >= n) {
        return Err(NafsError::param(format!(
            "pair ({u}, {v}) out of range for {n} nodes"
        )));
    }
    let normalized;
    let z = if normalize {
        normalized = z.l2_row_normalized();
        &normalized
    } else {
        z
    };
    Ok(pairs
        .iter()
        .map(|&(u, v)| sigmoid(dot(z.row(u), z.row(v))))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkPredScores {
    pub val_auc: Option<f64>,
    pub val_ap: Option<f64>,
    pub test_auc: f64,
    pub test_ap: f64,
}

/// Scores an embedding against a split. Validation metrics are absent when
/// the validation split is empty.
pub fn score_split(z: &DenseMatrix, split: &EdgeSplit, normalize: bool) -> Result<LinkPredScores> {
    let (val_auc, val_ap) = if split.val_pos.is_empty() {
        (None, None)
    } else {
        let (a, p) = auc_ap(
            &decode_scores(z, &split.val_pos, normalize)?,
            &decode_scores(z, &split.val_neg, normalize)?,
        )?;
        (Some(a), Some(p))
    };
    let (test_auc, test_ap) = auc_ap(
        &decode_scores(z, &split.test_pos, normalize)?,
        &decode_scores(z, &split.test_neg, normalize)?,
    )?;
    Ok(LinkPredScores {
        val_auc,
        val_ap,
        test_auc,
        test_ap,
    })
}

/// Splits edges, embeds the training graph only, and scores held-out pairs.
pub fn run_linkpred(
    g: &Graph,
    x: &DenseMatrix,
    cfg: &SmoothingConfig,
    ens: &EnsembleConfig,
    split: &SplitConfig,
    normalize: bool,
) -> Result<LinkPredScores> {
    let s = split_edges(g, split.val_frac, split.test_frac, split.seed)?;
    let z = nafs_ensemble(&s.train_graph, x, cfg, ens)?;
    score_split(&z, &s, normalize)
}
