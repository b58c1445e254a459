//! Dense reference implementations used as test oracles.
//!
//! Everything here is built directly from an edge list with `nalgebra` dense
//! matrices and brute force, sharing no code with the sparse pipeline.

#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use nafs::DenseMatrix;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn to_dmatrix(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn from_dmatrix(m: &DMatrix<f64>) -> DenseMatrix {
    let rows: Vec<Vec<f64>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect();
    if rows.is_empty() {
        return DenseMatrix::zeros(0, m.ncols());
    }
    DenseMatrix::from_rows(&rows).unwrap()
}

pub fn max_abs(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Deduplicated undirected edges without self loops.
pub fn clean_edges(edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let set: BTreeSet<(usize, usize)> = edges
        .iter()
        .filter(|(u, v)| u != v)
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect();
    set.into_iter().collect()
}

/// `A + I` as a dense matrix.
pub fn adjacency_with_loops(n: usize, edges: &[(usize, usize)]) -> DMatrix<f64> {
    let mut a = DMatrix::identity(n, n);
    for &(u, v) in &clean_edges(edges) {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    a
}

/// `D̃^(r-1) (A + I) D̃^(-r)` computed with explicit diagonal matrices.
pub fn dense_operator(n: usize, edges: &[(usize, usize)], r: f64) -> DMatrix<f64> {
    let a = adjacency_with_loops(n, edges);
    let d: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    let left = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        d.iter().map(|v| v.powf(r - 1.0)),
    ));
    let right = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        d.iter().map(|v| v.powf(-r)),
    ));
    left * a * right
}

/// `Â^k X` for `k = 0..=k_max`.
pub fn dense_powers(op: &DMatrix<f64>, x: &DMatrix<f64>, k_max: usize) -> Vec<DMatrix<f64>> {
    let mut out = vec![x.clone()];
    for k in 1..=k_max {
        out.push(op * &out[k - 1]);
    }
    out
}

/// `lim Â^k X` by power iteration until an iterate moves less than 1e-14.
pub fn power_limit(op: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut p = x.clone();
    for _ in 0..200_000 {
        let next = op * &p;
        let delta = max_abs(&next, &p);
        p = next;
        if delta < 1e-14 {
            break;
        }
    }
    p
}

pub fn row_l2(a: &DMatrix<f64>, b: &DMatrix<f64>, i: usize) -> f64 {
    (0..a.ncols())
        .map(|c| (a[(i, c)] - b[(i, c)]).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn row_cos(a: &DMatrix<f64>, b: &DMatrix<f64>, i: usize) -> f64 {
    let dot: f64 = (0..a.ncols()).map(|c| a[(i, c)] * b[(i, c)]).sum();
    let na: f64 = (0..a.ncols())
        .map(|c| a[(i, c)].powi(2))
        .sum::<f64>()
        .sqrt();
    let nb: f64 = (0..b.ncols())
        .map(|c| b[(i, c)].powi(2))
        .sum::<f64>()
        .sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Plain softmax without max subtraction (inputs in tests are small).
pub fn softmax(v: &[f64]) -> Vec<f64> {
    let e: Vec<f64> = v.iter().map(|x| x.exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleDistance {
    Cos,
    Euclid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleWeighting {
    Adaptive,
    Naive,
    SingleHop,
}

/// `Σ_k W(k) Â^k X` with every ingredient computed densely.
pub fn dense_nafs(
    n: usize,
    edges: &[(usize, usize)],
    x: &DMatrix<f64>,
    r: f64,
    k_max: usize,
    dist: OracleDistance,
    weighting: OracleWeighting,
) -> DMatrix<f64> {
    let op = dense_operator(n, edges, r);
    let powers = dense_powers(&op, x, k_max);
    let limit = power_limit(&op, x);
    let mut out = DMatrix::zeros(n, x.ncols());
    for i in 0..n {
        let d: Vec<f64> = powers
            .iter()
            .map(|p| match dist {
                OracleDistance::Cos => row_cos(p, x, i),
                OracleDistance::Euclid => row_l2(p, &limit, i),
            })
            .collect();
        let w = match weighting {
            OracleWeighting::Adaptive => softmax(&d),
            OracleWeighting::Naive => vec![1.0 / (k_max + 1) as f64; k_max + 1],
            OracleWeighting::SingleHop => {
                let mut w = vec![0.0; k_max + 1];
                w[k_max] = 1.0;
                w
            }
        };
        for (k, p) in powers.iter().enumerate() {
            for c in 0..x.ncols() {
                out[(i, c)] += w[k] * p[(i, c)];
            }
        }
    }
    out
}

/// Euclid distance to the dense limit, `n × (k_max + 1)`.
pub fn dense_distances(
    n: usize,
    edges: &[(usize, usize)],
    x: &DMatrix<f64>,
    r: f64,
    k_max: usize,
) -> Vec<Vec<f64>> {
    let op = dense_operator(n, edges, r);
    let powers = dense_powers(&op, x, k_max);
    let limit = power_limit(&op, x);
    (0..n)
        .map(|i| powers.iter().map(|p| row_l2(p, &limit, i)).collect())
        .collect()
}

/// Seeded pseudo-random graph: each pair kept with probability `p`.
pub fn random_edges(n: usize, p: f64, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..n)
        .tuple_combinations()
        .filter(|_| rng.gen::<f64>() < p)
        .collect()
}

pub fn normal_matrix(n: usize, f: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * f)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    DenseMatrix::from_vec(n, f, data).unwrap()
}

/// AUC by counting every positive/negative pair.
pub fn brute_auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut twice = 0u64;
    for &p in pos {
        for &q in neg {
            twice += if p > q {
                2
            } else if p == q {
                1
            } else {
                0
            };
        }
    }
    twice as f64 / (2 * pos.len() * neg.len()) as f64
}

/// Accuracy under the best mapping of predicted ids to true ids, by trying
/// every injective assignment.
pub fn brute_acc(pred: &[usize], truth: &[usize]) -> f64 {
    let kp = pred.iter().max().map_or(0, |m| m + 1);
    let kt = truth.iter().max().map_or(0, |m| m + 1);
    let size = kp.max(kt);
    let mut best = 0usize;
    for perm in (0..size).permutations(size) {
        let hits = pred
            .iter()
            .zip(truth)
            .filter(|(&p, &t)| perm[p] == t)
            .count();
        best = best.max(hits);
    }
    best as f64 / pred.len() as f64
}
