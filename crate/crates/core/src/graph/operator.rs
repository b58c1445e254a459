use rayon::prelude::*;

use super::Graph;
use crate::error::{NafsError, Result};
use crate::matrix::DenseMatrix;

/// Implicit normalized adjacency `D̃^(r-1) (A + I) D̃^(-r)` with `d̃_i = d_i + 1`.
///
/// Self loops are never stored in the graph. Entry `(i, j)` for `j == i` or `j`
/// adjacent to `i` equals `d̃_i^(r-1) * d̃_j^(-r)`; every other entry is zero.
/// `r = 0` is the row-stochastic random-walk matrix, `r = 1` its
/// column-stochastic transpose, `r = 0.5` the symmetric GCN normalization.
#[derive(Debug, Clone)]
pub struct NormalizedOperator<'g> {
    graph: &'g Graph,
    r: f64,
    dtilde: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl<'g> NormalizedOperator<'g> {
    pub fn new(graph: &'g Graph, r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(NafsError::param(format!("r must lie in [0, 1], got {r}")));
        }
        let dtilde: Vec<f64> = (0..graph.node_count())
            .map(|i| (graph.degree(i) + 1) as f64)
            .collect();
        let left = dtilde.iter().map(|d| d.powf(r - 1.0)).collect();
        let right = dtilde.iter().map(|d| d.powf(-r)).collect();
        Ok(Self {
            graph,
            r,
            dtilde,
            left,
            right,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn dtilde(&self) -> &[f64] {
        &self.dtilde
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Value of the implicit matrix at `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j || self.graph.has_edge(i, j) {
            self.left[i] * self.right[j]
        } else {
            0.0
        }
    }

    /// Materializes the operator densely. Intended for small graphs only.
    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.node_count();
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            out.set(i, i, self.left[i] * self.right[i]);
            for &j in self.graph.neighbors(i) {
                out.set(i, j, self.left[i] * self.right[j]);
            }
        }
        out
    }

    /// `Â_r · X`.
    pub fn spmm(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        let mut out = DenseMatrix::zeros(x.rows(), x.cols());
        self.spmm_into(x, &mut out)?;
        Ok(out)
    }

    /// `out ← Â_r · X`. Each output row accumulates the self term first and then
    /// neighbours in ascending index order, so results do not depend on the
    /// number of worker threads.
    pub fn spmm_into(&self, x: &DenseMatrix, out: &mut DenseMatrix) -> Result<()> {
        let n = self.node_count();
        if x.rows() != n {
            return Err(NafsError::dims(format!("{n} rows"), x.rows()));
        }
        if out.shape() != x.shape() {
            return Err(NafsError::dims(
                format!("{:?} output", x.shape()),
                format!("{:?}", out.shape()),
            ));
        }
        let f = x.cols();
        if f == 0 || n == 0 {
            return Ok(());
        }
        out.as_mut_slice()
            .par_chunks_exact_mut(f)
            .enumerate()
            .for_each(|(i, acc)| {
                let w = self.right[i];
                for (a, &v) in acc.iter_mut().zip(x.row(i)) {
                    *a = w * v;
                }
                for &j in self.graph.neighbors(i) {
                    let w = self.right[j];
                    for (a, &v) in acc.iter_mut().zip(x.row(j)) {
                        *a += w * v;
                    }
                }
                let scale = self.left[i];
                acc.iter_mut().for_each(|a| *a *= scale);
            });
        Ok(())
    }
}
