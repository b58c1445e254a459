//! Feature ensemble across operators `Â_r` for several values of `r`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{NafsError, Result};
use crate::graph::{Graph, NormalizedOperator};
use crate::matrix::{DenseMatrix, Embedding};
use crate::smoothing::{nafs_single, SmoothingConfig, SmoothingStream};

/// Default operator family `r ∈ {0, 0.1, …, 0.5}`.
pub const DEFAULT_R_VALUES: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];

/// Operator family used for link prediction on PubMed-like graphs.
pub const LINKPRED_PUBMED_R_VALUES: [f64; 3] = [0.3, 0.4, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnsembleStrategy {
    #[default]
    Mean,
    Max,
    Concat,
}

impl EnsembleStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            EnsembleStrategy::Mean => "mean",
            EnsembleStrategy::Max => "max",
            EnsembleStrategy::Concat => "concat",
        }
    }
}

impl fmt::Display for EnsembleStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnsembleStrategy {
    type Err = NafsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(EnsembleStrategy::Mean),
            "max" => Ok(EnsembleStrategy::Max),
            "concat" => Ok(EnsembleStrategy::Concat),
            other => Err(NafsError::param(format!(
                "unknown ensemble strategy `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub r_values: Vec<f64>,
    pub strategy: EnsembleStrategy,
    /// L2-normalize each branch's rows before pooling.
    pub post_normalize: bool,
    /// Run branches on the rayon pool instead of one after another.
    pub parallel: bool,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            r_values: DEFAULT_R_VALUES.to_vec(),
            strategy: EnsembleStrategy::Mean,
            post_normalize: false,
            parallel: false,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.r_values.is_empty() {
            return Err(NafsError::param("ensemble needs at least one r value"));
        }
        for (i, &r) in self.r_values.iter().enumerate() {
            if !(0.0..=1.0).contains(&r) {
                return Err(NafsError::param(format!("r must lie in [0, 1], got {r}")));
            }
            if self.r_values[..i].contains(&r) {
                return Err(NafsError::param(format!("duplicate r value {r}")));
            }
        }
        Ok(())
    }
}

/// Pools branch outputs into one embedding. Concat keeps branch order.
pub fn pool(
    branches: &[DenseMatrix],
    strategy: EnsembleStrategy,
    post_normalize: bool,
) -> Result<Embedding> {
    let first = branches
        .first()
        .ok_or_else(|| NafsError::Internal("no branches to pool".into()))?;
    if let Some(b) = branches.iter().find(|b| b.shape() != first.shape()) {
        return Err(NafsError::Internal(format!(
            "branch shapes differ: {:?} vs {:?}",
            first.shape(),
            b.shape()
        )));
    }
    let normalized: Vec<DenseMatrix>;
    let branches: &[DenseMatrix] = if post_normalize {
        normalized = branches
            .iter()
            .map(DenseMatrix::l2_row_normalized)
            .collect();
        &normalized
    } else {
        branches
    };
    match strategy {
        EnsembleStrategy::Concat => {
            let refs: Vec<&DenseMatrix> = branches.iter().collect();
            DenseMatrix::hconcat(&refs)
        }
        EnsembleStrategy::Mean => {
            let mut out = DenseMatrix::zeros(first.rows(), first.cols());
            for b in branches {
                for (o, &v) in out.as_mut_slice().iter_mut().zip(b.as_slice()) {
                    *o += v;
                }
            }
            let t = branches.len() as f64;
            out.as_mut_slice().iter_mut().for_each(|v| *v /= t);
            Ok(out)
        }
        EnsembleStrategy::Max => {
            let mut out = branches[0].clone();
            for b in &branches[1..] {
                for (o, &v) in out.as_mut_slice().iter_mut().zip(b.as_slice()) {
                    *o = o.max(v);
                }
            }
            Ok(out)
        }
    }
}

/// Full pipeline: one smoothing branch per `r`, then pooling.
pub fn nafs_ensemble(
    g: &Graph,
    x: &DenseMatrix,
    cfg: &SmoothingConfig,
    ens: &EnsembleConfig,
) -> Result<Embedding> {
    ens.validate()?;
    let branches: Vec<DenseMatrix> = if ens.parallel {
        ens.r_values
            .par_iter()
            .map(|&r| nafs_single(g, x, r, cfg).map(|s| s.matrix))
            .collect::<Result<_>>()?
    } else {
        ens.r_values
            .iter()
            .map(|&r| nafs_single(g, x, r, cfg).map(|s| s.matrix))
            .collect::<Result<_>>()?
    };
    pool(&branches, ens.strategy, ens.post_normalize)
}

/// Calls `visit(k, Z_k)` with the ensemble embedding for every maximal step
/// `k` in `k_values` (ascending), using one propagation pass per branch.
/// `cfg.k_max` is ignored.
pub fn for_each_k<F>(
    g: &Graph,
    x: &DenseMatrix,
    cfg: &SmoothingConfig,
    ens: &EnsembleConfig,
    k_values: &[usize],
    mut visit: F,
) -> Result<()>
where
    F: FnMut(usize, &Embedding) -> Result<()>,
{
    ens.validate()?;
    if k_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NafsError::param("k values must be strictly increasing"));
    }
    let x0 = cfg.prepare_features(x);
    let ops: Vec<NormalizedOperator<'_>> = ens
        .r_values
        .iter()
        .map(|&r| NormalizedOperator::new(g, r))
        .collect::<Result<_>>()?;
    let mut streams: Vec<SmoothingStream<'_, '_>> = ops
        .iter()
        .map(|op| SmoothingStream::new(op, x0.clone(), cfg.distance, cfg.weighting))
        .collect::<Result<_>>()?;
    for &k in k_values {
        let mut branches = Vec::with_capacity(streams.len());
        for s in streams.iter_mut() {
            s.advance_to(k)?;
            branches.push(s.embedding());
        }
        let z = pool(&branches, ens.strategy, ens.post_normalize)?;
        visit(k, &z)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_er;

    fn features(n: usize, f: usize, salt: usize) -> DenseMatrix {
        let data = (0..n * f)
            .map(|v| (((v + salt) * 2654435761 % 1009) as f64) / 500.0 - 1.0)
            .collect();
        DenseMatrix::from_vec(n, f, data).unwrap()
    }

    #[test]
    fn single_branch_equals_branch() {
        let g = generate_er(20, 0.2, 1).unwrap();
        let x = features(20, 3, 0);
        let cfg = SmoothingConfig {
            k_max: 4,
            ..SmoothingConfig::default()
        };
        let branch = nafs_single(&g, &x, 0.3, &cfg).unwrap().matrix;
        for strategy in [
            EnsembleStrategy::Mean,
            EnsembleStrategy::Max,
            EnsembleStrategy::Concat,
        ] {
            let ens = EnsembleConfig {
                r_values: vec![0.3],
                strategy,
                ..EnsembleConfig::default()
            };
            assert_eq!(nafs_ensemble(&g, &x, &cfg, &ens).unwrap(), branch);
        }
    }

    #[test]
    fn identical_branches_are_idempotent() {
        let b = features(5, 4, 3);
        for s in [EnsembleStrategy::Mean, EnsembleStrategy::Max] {
            let z = pool(&[b.clone(), b.clone(), b.clone()], s, false).unwrap();
            assert!(z.max_abs_diff(&b) < 1e-15);
        }
    }

    #[test]
    fn concat_slices_match_branches() {
        let g = generate_er(20, 0.2, 5).unwrap();
        let x = features(20, 3, 1);
        let cfg = SmoothingConfig {
            k_max: 5,
            ..SmoothingConfig::default()
        };
        let ens = EnsembleConfig {
            r_values: vec![0.1, 0.4],
            strategy: EnsembleStrategy::Concat,
            ..EnsembleConfig::default()
        };
        let z = nafs_ensemble(&g, &x, &cfg, &ens).unwrap();
        assert_eq!(z.cols(), 6);
        let b1 = nafs_single(&g, &x, 0.1, &cfg).unwrap().matrix;
        let b2 = nafs_single(&g, &x, 0.4, &cfg).unwrap().matrix;
        for i in 0..20 {
            assert_eq!(&z.row(i)[..3], b1.row(i));
            assert_eq!(&z.row(i)[3..], b2.row(i));
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = generate_er(40, 0.1, 6).unwrap();
        let x = features(40, 4, 2);
        let cfg = SmoothingConfig::default();
        let mut ens = EnsembleConfig::default();
        let seq = nafs_ensemble(&g, &x, &cfg, &ens).unwrap();
        ens.parallel = true;
        assert_eq!(nafs_ensemble(&g, &x, &cfg, &ens).unwrap(), seq);
    }

    #[test]
    fn rejects_bad_r_lists() {
        let g = generate_er(5, 0.5, 0).unwrap();
        let x = features(5, 2, 0);
        let cfg = SmoothingConfig::default();
        for r_values in [vec![], vec![0.1, 0.1], vec![1.2]] {
            let ens = EnsembleConfig {
                r_values,
                ..EnsembleConfig::default()
            };
            assert!(nafs_ensemble(&g, &x, &cfg, &ens).is_err());
        }
    }

    #[test]
    fn sweep_matches_direct_runs() {
        let g = generate_er(30, 0.15, 8).unwrap();
        let x = features(30, 3, 4);
        let ens = EnsembleConfig {
            r_values: vec![0.0, 0.5],
            strategy: EnsembleStrategy::Max,
            ..EnsembleConfig::default()
        };
        let mut seen = Vec::new();
        for_each_k(
            &g,
            &x,
            &SmoothingConfig::default(),
            &ens,
            &[1, 3, 7],
            |k, z| {
                let cfg = SmoothingConfig {
                    k_max: k,
                    ..SmoothingConfig::default()
                };
                let direct = nafs_ensemble(&g, &x, &cfg, &ens).unwrap();
                assert!(z.max_abs_diff(&direct) < 1e-15);
                seen.push(k);
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(seen, vec![1, 3, 7]);
    }

    #[test]
    fn parses_strategies() {
        assert_eq!(
            "concat".parse::<EnsembleStrategy>().unwrap(),
            EnsembleStrategy::Concat
        );
        assert!("sum".parse::<EnsembleStrategy>().is_err());
    }
}
