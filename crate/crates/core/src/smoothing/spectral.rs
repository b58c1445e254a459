//! Spectral quantities of the smoothing operator and the decay bounds built on them.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{NafsError, Result};
use crate::graph::{Graph, NormalizedOperator};
use crate::matrix::{dot, l2_norm, DenseMatrix};

/// Largest graph for which the spectrum is computed with a dense eigensolve.
pub const DENSE_EIGEN_LIMIT: usize = 2000;
const POWER_TOLERANCE: f64 = 1e-8;
const POWER_MAX_ITERS: usize = 200_000;

/// Spectrum of `S = D̃^(-1/2) (A + I) D̃^(-1/2)`, which is similar to `Â_0`
/// and to every `Â_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralInfo {
    /// Second-largest eigenvalue.
    pub lambda2: f64,
    /// Smallest eigenvalue.
    pub lambda_min: f64,
    /// `Σ_j d̃_j ‖X_j‖²`.
    pub cdx: f64,
}

impl SpectralInfo {
    /// Rate at which `Â^k` approaches its limit: the largest eigenvalue
    /// magnitude once the leading eigenvalue 1 is removed. Equals `lambda2`
    /// unless the bottom of the spectrum is further from zero.
    pub fn decay_rate(&self) -> f64 {
        self.lambda2.max(-self.lambda_min)
    }
}

pub fn spectral_info(g: &Graph, x: &DenseMatrix) -> Result<SpectralInfo> {
    let n = g.node_count();
    if x.rows() != n {
        return Err(NafsError::dims(format!("{n} rows"), x.rows()));
    }
    let cdx = weighted_sq_norm(g, x);
    let (lambda2, lambda_min) = if n < 2 {
        (0.0, if n == 1 { 1.0 } else { 0.0 })
    } else if n <= DENSE_EIGEN_LIMIT {
        dense_extremes(g)
    } else {
        power_extremes(g)?
    };
    Ok(SpectralInfo {
        lambda2,
        lambda_min,
        cdx,
    })
}

fn weighted_sq_norm(g: &Graph, x: &DenseMatrix) -> f64 {
    (0..g.node_count())
        .map(|j| (g.degree(j) + 1) as f64 * dot(x.row(j), x.row(j)))
        .sum()
}

fn dense_extremes(g: &Graph) -> (f64, f64) {
    let n = g.node_count();
    let dt: Vec<f64> = (0..n).map(|i| (g.degree(i) + 1) as f64).collect();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        s[(i, i)] = 1.0 / dt[i];
        for &j in g.neighbors(i) {
            s[(i, j)] = 1.0 / (dt[i] * dt[j]).sqrt();
        }
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    (eig[1], eig[n - 1])
}

/// Power iteration on shifted copies of `S`: `(I + S) / 2` deflated by the
/// leading eigenvector gives `lambda2`, `(I - S) / 2` gives `lambda_min`.
fn power_extremes(g: &Graph) -> Result<(f64, f64)> {
    let n = g.node_count();
    let s = NormalizedOperator::new(g, 0.5)?;
    let components = g.connected_components();
    let lambda2 = if components.is_connected() {
        let mut lead: Vec<f64> = (0..n).map(|i| ((g.degree(i) + 1) as f64).sqrt()).collect();
        let norm = l2_norm(&lead);
        lead.iter_mut().for_each(|v| *v /= norm);
        let mu = power_iterate(&s, 1.0, Some(&lead), 1)?;
        2.0 * mu - 1.0
    } else {
        // each component contributes an eigenvalue 1
        1.0
    };
    let mu = power_iterate(&s, -1.0, None, 2)?;
    Ok((lambda2, 1.0 - 2.0 * mu))
}

/// Dominant eigenvalue of `(I + sign·S) / 2`, optionally restricted to the
/// orthogonal complement of `deflate`.
fn power_iterate(
    s: &NormalizedOperator<'_>,
    sign: f64,
    deflate: Option<&[f64]>,
    seed: u64,
) -> Result<f64> {
    let n = s.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DenseMatrix::from_vec(n, 1, (0..n).map(|_| rng.gen::<f64>() - 0.5).collect())?;
    let project = |v: &mut [f64]| {
        if let Some(u) = deflate {
            let c = dot(v, u);
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
        }
        let norm = l2_norm(v);
        if norm > 0.0 {
            v.iter_mut().for_each(|a| *a /= norm);
        }
    };
    project(v.as_mut_slice());
    let mut sv = DenseMatrix::zeros(n, 1);
    let mut rayleigh = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        s.spmm_into(&v, &mut sv)?;
        let mut w: Vec<f64> = v
            .as_slice()
            .iter()
            .zip(sv.as_slice())
            .map(|(a, b)| 0.5 * (a + sign * b))
            .collect();
        if let Some(u) = deflate {
            let c = dot(&w, u);
            w.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
        }
        rayleigh = dot(v.as_slice(), &w);
        let residual = w
            .iter()
            .zip(v.as_slice())
            .map(|(a, b)| (a - rayleigh * b).powi(2))
            .sum::<f64>()
            .sqrt();
        v.as_mut_slice().copy_from_slice(&w);
        project(v.as_mut_slice());
        if residual < POWER_TOLERANCE {
            break;
        }
    }
    Ok(rayleigh)
}

fn require_connected(g: &Graph, context: &str) -> Result<()> {
    let components = g.connected_components().count();
    if components > 1 {
        return Err(NafsError::Disconnected {
            components,
            context: context.to_string(),
        });
    }
    Ok(())
}

/// Per-node upper bound on the euclid-stationary distance after `k` steps of
/// `Â_0`: `ρ^k · sqrt(cdx / d̃_i)` with `ρ = spectral.decay_rate()` and `cdx`
/// taken from `x`.
pub fn theorem1_bound(
    g: &Graph,
    x: &DenseMatrix,
    spectral: &SpectralInfo,
    k: usize,
) -> Result<Vec<f64>> {
    require_connected(g, "the distance decay bound")?;
    if x.rows() != g.node_count() {
        return Err(NafsError::dims(
            format!("{} rows", g.node_count()),
            x.rows(),
        ));
    }
    let cdx = weighted_sq_norm(g, x);
    let decay = spectral.decay_rate().powi(k as i32);
    Ok((0..g.node_count())
        .map(|i| decay * (cdx / (g.degree(i) + 1) as f64).sqrt())
        .collect())
}

/// Per-node closed-form step count after which node `i` is expected within
/// `epsilon` of its stationary row:
/// `⌈log_ρ(2 d̃_i ε / Σ_j d̃_j ‖X_j‖₁)⌉`, clamped below at zero.
pub fn mixing_time_bound(
    g: &Graph,
    x: &DenseMatrix,
    spectral: &SpectralInfo,
    epsilon: f64,
) -> Result<Vec<usize>> {
    require_connected(g, "the mixing-time bound")?;
    if !(epsilon > 0.0) {
        return Err(NafsError::param(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let rate = spectral.decay_rate();
    if !(rate > 0.0 && rate < 1.0) {
        return Err(NafsError::param(format!(
            "decay rate must lie in (0, 1) for a mixing-time bound, got {rate}"
        )));
    }
    if x.rows() != g.node_count() {
        return Err(NafsError::dims(
            format!("{} rows", g.node_count()),
            x.rows(),
        ));
    }
    let total: f64 = (0..g.node_count())
        .map(|j| (g.degree(j) + 1) as f64 * x.row(j).iter().map(|v| v.abs()).sum::<f64>())
        .sum();
    Ok((0..g.node_count())
        .map(|i| {
            let ratio = 2.0 * (g.degree(i) + 1) as f64 * epsilon / total;
            if !(ratio < 1.0) {
                0
            } else {
                (ratio.ln() / rate.ln()).ceil().max(0.0) as usize
            }
        })
        .collect())
}
