use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{NafsError, Result};
use crate::matrix::DenseMatrix;

/// Lloyd iterations per restart before giving up on a fixpoint.
pub const MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    /// Cluster id per row, in `0..c`.
    pub assignments: Vec<usize>,
    /// `c × dim` centroids.
    pub centroids: DenseMatrix,
    /// Sum of squared distances to the assigned centroid.
    pub inertia: f64,
    /// Inertia after each Lloyd iteration of the returned restart.
    pub inertia_trace: Vec<f64>,
    /// Final inertia of every restart, in restart order.
    pub restart_inertias: Vec<f64>,
}

/// K-Means with k-means++ seeding, best of `restarts` runs.
///
/// Restart `t` draws from ChaCha stream `t` of `seed`, so results do not
/// depend on how restarts are scheduled across threads.
pub fn kmeans(z: &DenseMatrix, c: usize, restarts: usize, seed: u64) -> Result<ClusterResult> {
    let n = z.rows();
    if c == 0 {
        return Err(NafsError::param("number of clusters must be at least 1"));
    }
    if restarts == 0 {
        return Err(NafsError::param("restarts must be at least 1"));
    }
    if c > n {
        return Err(NafsError::param(format!(
            "cannot form {c} clusters from {n} points"
        )));
    }
    z.ensure_finite()?;

    let runs: Vec<Run> = (0..restarts)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            lloyd(z, c, &mut rng)
        })
        .collect();
    let restart_inertias: Vec<f64> = runs.iter().map(|r| r.inertia).collect();
    // first restart wins ties
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.inertia < a.inertia { b } else { a })
        .expect("restarts >= 1");
    Ok(ClusterResult {
        assignments: best.assignments,
        centroids: best.centroids,
        inertia: best.inertia,
        inertia_trace: best.trace,
        restart_inertias,
    })
}

struct Run {
    assignments: Vec<usize>,
    centroids: DenseMatrix,
    inertia: f64,
    trace: Vec<f64>,
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus_init(z: &DenseMatrix, c: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let n = z.rows();
    let mut centroids = DenseMatrix::zeros(c, z.cols());
    let first = rng.gen_range(0..n);
    centroids.row_mut(0).copy_from_slice(z.row(first));
    let mut closest: Vec<f64> = (0..n).map(|i| sq_dist(z.row(i), z.row(first))).collect();
    for j in 1..c {
        let total: f64 = closest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut cum = 0.0;
            let mut pick = n - 1;
            for (i, &d) in closest.iter().enumerate() {
                cum += d;
                if cum > target && d > 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.gen_range(0..n)
        };
        centroids.row_mut(j).copy_from_slice(z.row(pick));
        for (i, d) in closest.iter_mut().enumerate() {
            *d = d.min(sq_dist(z.row(i), z.row(pick)));
        }
    }
    centroids
}

/// Nearest centroid per row. On a tie the current cluster (if any) is kept,
/// otherwise the lowest index wins.
fn assign(z: &DenseMatrix, centroids: &DenseMatrix, current: Option<&[usize]>) -> Vec<usize> {
    (0..z.rows())
        .map(|i| {
            let row = z.row(i);
            let mut best = match current {
                Some(a) => (a[i], sq_dist(row, centroids.row(a[i]))),
                None => (0, f64::INFINITY),
            };
            for j in 0..centroids.rows() {
                let d = sq_dist(row, centroids.row(j));
                if d < best.1 {
                    best = (j, d);
                }
            }
            best.0
        })
        .collect()
}

fn update_centroids(z: &DenseMatrix, assignments: &[usize], c: usize) -> (DenseMatrix, Vec<usize>) {
    let mut centroids = DenseMatrix::zeros(c, z.cols());
    let mut counts = vec![0usize; c];
    for (i, &a) in assignments.iter().enumerate() {
        counts[a] += 1;
        for (s, &v) in centroids.row_mut(a).iter_mut().zip(z.row(i)) {
            *s += v;
        }
    }
    for j in 0..c {
        if counts[j] > 0 {
            let k = counts[j] as f64;
            centroids.row_mut(j).iter_mut().for_each(|v| *v /= k);
        }
    }
    (centroids, counts)
}

fn lloyd(z: &DenseMatrix, c: usize, rng: &mut ChaCha8Rng) -> Run {
    let mut centroids = plus_plus_init(z, c, rng);
    let mut assignments = assign(z, &centroids, None);
    let mut trace = Vec::new();
    for iteration in 1..=MAX_ITERATIONS {
        let (mut next, mut counts) = update_centroids(z, &assignments, c);
        // An empty cluster takes the point farthest from its own centroid,
        // drawn from a cluster that can spare it.
        while let Some(empty) = counts.iter().position(|&k| k == 0) {
            let victim = (0..z.rows())
                .filter(|&i| counts[assignments[i]] > 1)
                .map(|i| (i, sq_dist(z.row(i), next.row(assignments[i]))))
                .fold((usize::MAX, f64::NEG_INFINITY), |acc, cur| {
                    if cur.1 > acc.1 {
                        cur
                    } else {
                        acc
                    }
                })
                .0;
            assignments[victim] = empty;
            let updated = update_centroids(z, &assignments, c);
            next = updated.0;
            counts = updated.1;
        }
        centroids = next;
        let inertia: f64 = (0..z.rows())
            .map(|i| sq_dist(z.row(i), centroids.row(assignments[i])))
            .sum();
        trace.push(inertia);
        let reassigned = assign(z, &centroids, Some(&assignments));
        if reassigned == assignments || iteration == MAX_ITERATIONS {
            break;
        }
        assignments = reassigned;
    }
    let inertia = *trace.last().expect("at least one iteration");
    Run {
        assignments,
        centroids,
        inertia,
        trace,
    }
}
