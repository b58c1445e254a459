//! Clustering and ranking metrics.
//!
//! Sums over contingency cells are taken in sorted order, so NMI and ARI are
//! bit-for-bit symmetric in their arguments and invariant under relabelling.

use std::collections::HashMap;

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;
use serde::Serialize;

use crate::error::{NafsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusteringScores {
    pub acc: f64,
    pub nmi: f64,
    /// Adjusted Rand index clamped at 0.
    pub ari: f64,
    /// Adjusted Rand index as computed, may be negative.
    pub ari_raw: f64,
}

/// Contingency table between two labelings: `(cells, row sums, column sums)`.
/// Labels are remapped densely in order of first appearance.
struct Contingency {
    cells: Vec<Vec<u64>>,
    rows: Vec<u64>,
    cols: Vec<u64>,
    n: u64,
}

fn dense_labels(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = HashMap::new();
    let out = labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect();
    (out, map.len())
}

fn contingency(pred: &[usize], truth: &[usize]) -> Result<Contingency> {
    if pred.len() != truth.len() {
        return Err(NafsError::dims(
            format!("{} predicted labels", truth.len()),
            pred.len(),
        ));
    }
    if pred.is_empty() {
        return Err(NafsError::param("labelings are empty"));
    }
    let (p, kp) = dense_labels(pred);
    let (t, kt) = dense_labels(truth);
    let mut cells = vec![vec![0u64; kt]; kp];
    for (&a, &b) in p.iter().zip(&t) {
        cells[a][b] += 1;
    }
    let rows = cells.iter().map(|r| r.iter().sum()).collect();
    let cols = (0..kt).map(|j| cells.iter().map(|r| r[j]).sum()).collect();
    Ok(Contingency {
        cells,
        rows,
        cols,
        n: pred.len() as u64,
    })
}

fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

/// Accuracy under the best one-to-one matching of predicted to true labels.
pub fn clustering_accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let ct = contingency(pred, truth)?;
    let size = ct.rows.len().max(ct.cols.len());
    let mut weights = Matrix::new(size, size, 0i64);
    for (i, row) in ct.cells.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            weights[(i, j)] = v as i64;
        }
    }
    let (matched, _) = kuhn_munkres(&weights);
    Ok(matched as f64 / ct.n as f64)
}

fn entropy(counts: &[u64], n: u64) -> f64 {
    let n = n as f64;
    -sorted_sum(
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                p * p.ln()
            })
            .collect(),
    )
}

/// Mutual information normalized by the arithmetic mean of the two entropies.
pub fn normalized_mutual_info(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let ct = contingency(pred, truth)?;
    Ok(nmi_from(&ct))
}

fn nmi_from(ct: &Contingency) -> f64 {
    let hu = entropy(&ct.rows, ct.n);
    let hv = entropy(&ct.cols, ct.n);
    if hu == 0.0 && hv == 0.0 {
        return 1.0;
    }
    // I(U; V) = H(U) + H(V) - H(U, V); identical labelings give exactly 1
    let joint: Vec<u64> = ct.cells.iter().flatten().copied().collect();
    let mi = (hu + hv - entropy(&joint, ct.n)).max(0.0);
    (mi / (0.5 * (hu + hv))).clamp(0.0, 1.0)
}

fn pairs(k: u64) -> u128 {
    let k = k as u128;
    k * k.saturating_sub(1) / 2
}

/// Adjusted Rand index (unclamped).
pub fn adjusted_rand_index(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let ct = contingency(pred, truth)?;
    Ok(ari_from(&ct))
}

fn ari_from(ct: &Contingency) -> f64 {
    let index: u128 = ct.cells.iter().flatten().map(|&v| pairs(v)).sum();
    let sum_a: u128 = ct.rows.iter().map(|&v| pairs(v)).sum();
    let sum_b: u128 = ct.cols.iter().map(|&v| pairs(v)).sum();
    let total = pairs(ct.n) as f64;
    let expected = (sum_a as f64 * sum_b as f64) / total.max(1.0);
    let max_index = 0.5 * (sum_a as f64 + sum_b as f64);
    if max_index == expected {
        return 1.0;
    }
    (index as f64 - expected) / (max_index - expected)
}

pub fn clustering_metrics(pred: &[usize], truth: &[usize]) -> Result<ClusteringScores> {
    let ct = contingency(pred, truth)?;
    let acc = clustering_accuracy(pred, truth)?;
    let ari_raw = ari_from(&ct);
    Ok(ClusteringScores {
        acc,
        nmi: nmi_from(&ct),
        ari: ari_raw.clamp(0.0, 1.0),
        ari_raw,
    })
}

/// ROC AUC and average precision of positive versus negative scores.
///
/// AUC is the Mann–Whitney statistic with ties counted as one half, evaluated
/// exactly through doubled average ranks. AP sums `(R_k − R_{k−1}) · P_k` over
/// descending score thresholds, with tied scores forming one threshold.
pub fn auc_ap(pos: &[f64], neg: &[f64]) -> Result<(f64, f64)> {
    if pos.is_empty() || neg.is_empty() {
        return Err(NafsError::param(
            "AUC/AP need at least one positive and one negative score",
        ));
    }
    if pos.iter().chain(neg).any(|s| s.is_nan()) {
        return Err(NafsError::param("scores contain NaN"));
    }
    let mut all: Vec<(f64, bool)> = pos
        .iter()
        .map(|&s| (s, true))
        .chain(neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n_pos = pos.len() as u128;
    let n_neg = neg.len() as u128;

    let groups = tie_groups(&all);

    // ranks are 1-based; a tie group spanning [start, end) has average rank
    // (start + 1 + end) / 2, so doubled ranks stay integral
    let mut doubled_rank_sum: u128 = 0;
    for &(start, end) in &groups {
        let positives = all[start..end].iter().filter(|e| e.1).count() as u128;
        doubled_rank_sum += positives * (start as u128 + 1 + end as u128);
    }
    let doubled_u = doubled_rank_sum - n_pos * (n_pos + 1);
    let auc = doubled_u as f64 / (2 * n_pos * n_neg) as f64;

    let mut ap = 0.0;
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut prev_recall = 0.0;
    for &(start, end) in groups.iter().rev() {
        for e in &all[start..end] {
            if e.1 {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        let recall = tp as f64 / n_pos as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    Ok((auc, ap))
}

fn tie_groups(sorted: &[(f64, bool)]) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i].0 != sorted[start].0 {
            groups.push((start, i));
            start = i;
        }
    }
    groups
}
