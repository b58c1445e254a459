use serde::Serialize;

use super::{DistanceMode, SmoothingStream, Weighting};
use crate::error::{NafsError, Result};
use crate::graph::{Graph, NormalizedOperator};
use crate::matrix::DenseMatrix;

/// Nodes whose degree lies in `min_degree..=max_degree`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeBucket {
    pub min_degree: usize,
    pub max_degree: usize,
}

impl DegreeBucket {
    pub fn new(min_degree: usize, max_degree: usize) -> Self {
        Self {
            min_degree,
            max_degree,
        }
    }

    pub fn contains(&self, degree: usize) -> bool {
        (self.min_degree..=self.max_degree).contains(&degree)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketCurve {
    pub bucket: DegreeBucket,
    pub nodes: usize,
    /// Mean euclid-stationary distance per step `0..=K`; `None` for an empty bucket.
    pub mean_distance: Option<Vec<f64>>,
}

/// Degree at quantile `q` of the sorted degree sequence (nearest rank, rounding down).
pub fn degree_quantile(g: &Graph, q: f64) -> usize {
    let mut d = g.degrees();
    if d.is_empty() {
        return 0;
    }
    d.sort_unstable();
    let idx = ((q.clamp(0.0, 1.0)) * (d.len() - 1) as f64).floor() as usize;
    d[idx]
}

/// Mean over-smoothing distance per degree bucket and step, showing how fast
/// each group of nodes approaches the stationary state. `x` is used as given.
pub fn smoothing_speed_report(
    g: &Graph,
    x: &DenseMatrix,
    r: f64,
    k_max: usize,
    buckets: &[DegreeBucket],
) -> Result<Vec<BucketCurve>> {
    if buckets.is_empty() {
        return Err(NafsError::param("at least one degree bucket is required"));
    }
    let op = NormalizedOperator::new(g, r)?;
    let mut stream = SmoothingStream::new(
        &op,
        x.clone(),
        DistanceMode::EuclidStationary,
        Weighting::SingleHop,
    )?;
    stream.advance_to(k_max)?;
    let distances = stream.profile()?.distances;

    Ok(buckets
        .iter()
        .map(|&bucket| {
            let members: Vec<usize> = (0..g.node_count())
                .filter(|&i| bucket.contains(g.degree(i)))
                .collect();
            let mean_distance = (!members.is_empty()).then(|| {
                (0..=k_max)
                    .map(|k| {
                        members.iter().map(|&i| distances.get(i, k)).sum::<f64>()
                            / members.len() as f64
                    })
                    .collect()
            });
            BucketCurve {
                bucket,
                nodes: members.len(),
                mean_distance,
            }
        })
        .collect())
}
