use rayon::prelude::*;

use super::{
    row_distance, smoothing_weights, stationary_state, DistanceMode, StationaryState,
    WeightProfile, Weighting,
};
use crate::error::{NafsError, Result};
use crate::graph::NormalizedOperator;
use crate::matrix::DenseMatrix;

/// Incremental smoothing that holds the embedding for the current `K` at
/// every step.
///
/// Adaptive weighting uses an online softmax: each node keeps its running
/// maximum distance, the normalizer relative to that maximum, and an
/// accumulator rescaled whenever the maximum grows. After `advance_to(K)` the
/// embedding is exactly the one for maximal step `K`, so a sweep over `K`
/// costs a single propagation pass.
pub struct SmoothingStream<'a, 'g> {
    op: &'a NormalizedOperator<'g>,
    mode: DistanceMode,
    weighting: Weighting,
    initial: DenseMatrix,
    stationary: Option<StationaryState>,
    current: DenseMatrix,
    scratch: DenseMatrix,
    acc: DenseMatrix,
    run_max: Vec<f64>,
    run_sum: Vec<f64>,
    /// One vector of per-node distances per absorbed step.
    distances: Vec<Vec<f64>>,
}

impl<'a, 'g> SmoothingStream<'a, 'g> {
    /// Starts at step 0 with `x` as `X^(0)`.
    pub fn new(
        op: &'a NormalizedOperator<'g>,
        x: DenseMatrix,
        mode: DistanceMode,
        weighting: Weighting,
    ) -> Result<Self> {
        let n = op.node_count();
        if x.rows() != n {
            return Err(NafsError::dims(format!("{n} rows"), x.rows()));
        }
        x.ensure_finite()?;
        let stationary = match mode {
            DistanceMode::EuclidStationary => Some(stationary_state(
                op,
                &x,
                &op.graph().connected_components(),
            )?),
            DistanceMode::CosInitial => None,
        };
        let (rows, cols) = x.shape();
        let acc = match weighting {
            Weighting::SingleHop => DenseMatrix::zeros(0, 0),
            _ => DenseMatrix::zeros(rows, cols),
        };
        let mut stream = Self {
            op,
            mode,
            weighting,
            current: x.clone(),
            initial: x,
            stationary,
            scratch: DenseMatrix::zeros(rows, cols),
            acc,
            run_max: vec![f64::NEG_INFINITY; n],
            run_sum: vec![0.0; n],
            distances: Vec::new(),
        };
        stream.absorb()?;
        Ok(stream)
    }

    /// Index `k` of the most recent step absorbed.
    pub fn step(&self) -> usize {
        self.distances.len() - 1
    }

    pub fn current(&self) -> &DenseMatrix {
        &self.current
    }

    pub fn stationary(&self) -> Option<&StationaryState> {
        self.stationary.as_ref()
    }

    pub fn advance(&mut self) -> Result<()> {
        self.op.spmm_into(&self.current, &mut self.scratch)?;
        std::mem::swap(&mut self.current, &mut self.scratch);
        self.absorb()
    }

    pub fn advance_to(&mut self, k: usize) -> Result<()> {
        while self.step() < k {
            self.advance()?;
        }
        Ok(())
    }

    fn absorb(&mut self) -> Result<()> {
        let reference = match self.mode {
            DistanceMode::CosInitial => &self.initial,
            DistanceMode::EuclidStationary => {
                &self.stationary.as_ref().expect("computed in new").matrix
            }
        };
        let mode = self.mode;
        let current = &self.current;
        let dist: Vec<f64> = (0..current.rows())
            .into_par_iter()
            .map(|i| row_distance(mode, current.row(i), reference.row(i)))
            .collect();
        if let Some(i) = dist.iter().position(|d| !d.is_finite()) {
            return Err(NafsError::NonFinite {
                row: i,
                col: self.distances.len(),
            });
        }

        let f = current.cols();
        match self.weighting {
            Weighting::SingleHop => {}
            Weighting::NaiveAverage => {
                for (a, &v) in self.acc.as_mut_slice().iter_mut().zip(current.as_slice()) {
                    *a += v;
                }
            }
            Weighting::Adaptive => {
                let update = |i: usize, acc: &mut [f64], max: &mut f64, sum: &mut f64| {
                    let d = dist[i];
                    let row = current.row(i);
                    if d > *max {
                        // also covers the first step, where max = -inf and scale = 0
                        let scale = (*max - d).exp();
                        for (a, &v) in acc.iter_mut().zip(row) {
                            *a = *a * scale + v;
                        }
                        *sum = *sum * scale + 1.0;
                        *max = d;
                    } else {
                        let e = (d - *max).exp();
                        for (a, &v) in acc.iter_mut().zip(row) {
                            *a += e * v;
                        }
                        *sum += e;
                    }
                };
                if f == 0 {
                    let mut empty: [f64; 0] = [];
                    for i in 0..current.rows() {
                        update(i, &mut empty, &mut self.run_max[i], &mut self.run_sum[i]);
                    }
                } else {
                    self.acc
                        .as_mut_slice()
                        .par_chunks_exact_mut(f)
                        .zip(self.run_max.par_iter_mut())
                        .zip(self.run_sum.par_iter_mut())
                        .enumerate()
                        .for_each(|(i, ((acc, max), sum))| update(i, acc, max, sum));
                }
            }
        }
        self.distances.push(dist);
        Ok(())
    }

    /// `X̂` for maximal step `K = self.step()`.
    pub fn embedding(&self) -> DenseMatrix {
        match self.weighting {
            Weighting::SingleHop => self.current.clone(),
            Weighting::NaiveAverage => {
                let mut out = self.acc.clone();
                let steps = self.distances.len() as f64;
                out.as_mut_slice().iter_mut().for_each(|v| *v /= steps);
                out
            }
            Weighting::Adaptive => {
                let mut out = self.acc.clone();
                for i in 0..out.rows() {
                    let s = self.run_sum[i];
                    out.row_mut(i).iter_mut().for_each(|v| *v /= s);
                }
                out
            }
        }
    }

    /// Distances and weights for steps `0..=self.step()`.
    pub fn profile(&self) -> Result<WeightProfile> {
        let n = self.current.rows();
        let steps = self.distances.len();
        let mut d = DenseMatrix::zeros(n, steps);
        for (k, col) in self.distances.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                d.set(i, k, v);
            }
        }
        smoothing_weights(&d, self.weighting)
    }
}
