use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Graph;
use crate::error::{NafsError, Result};
use crate::matrix::DenseMatrix;

/// G(n, p) random graph: every unordered pair is an edge independently with
/// probability `p`. Deterministic per `seed`.
///
/// Uses geometric skipping over the pair sequence, so the cost is O(n + m)
/// rather than O(n²).
pub fn generate_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(NafsError::param(format!(
            "edge probability must lie in [0, 1], got {p}"
        )));
    }
    let mut edges = Vec::new();
    if p == 0.0 || n < 2 {
        return Graph::from_edges(n, &edges);
    }
    if p == 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push((w, v));
            }
        }
        return Graph::from_edges(n, &edges);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_q = (1.0 - p).ln();
    let limit = (n as f64) * (n as f64);
    let n = n as i64;
    let mut v: i64 = 1;
    let mut w: i64 = -1;
    while v < n {
        let u: f64 = rng.gen();
        let skip = ((1.0 - u).ln() / log_q).floor().min(limit);
        w += 1 + skip as i64;
        while w >= v && v < n {
            w -= v;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v as usize));
        }
    }
    Graph::from_edges(n as usize, &edges)
}

/// Standard-normal `n × f` matrix drawn from stream 1 of `seed`, independent
/// of the stream `generate_er` uses.
pub fn normal_features(n: usize, f: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let data = (0..n * f)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    DenseMatrix::from_vec(n, f, data).expect("length is n * f")
}
