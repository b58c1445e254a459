//! Node-adaptive feature smoothing.
//!
//! Features are propagated `K` times through a normalized operator. For each
//! node and step the distance of the smoothed row from the over-smoothed limit
//! is measured, turned into per-node softmax weights over the steps, and the
//! steps are averaged with those weights. Nodes that approach the limit fast
//! (typically high-degree ones) keep most weight on their early, still
//! distinguishable representations.
//!
//! The building blocks ([`propagate`], [`stationary_state`],
//! [`distance_profile`], [`smoothing_weights`], [`combine`]) are exposed for
//! inspection; [`nafs_single`] runs the same pipeline through a streaming
//! [`SmoothingStream`] that never holds more than a few `n × f` buffers.

mod spectral;
mod speed;
mod stream;

pub use spectral::{mixing_time_bound, spectral_info, theorem1_bound, SpectralInfo};
pub use speed::{degree_quantile, smoothing_speed_report, BucketCurve, DegreeBucket};
pub use stream::SmoothingStream;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{NafsError, Result};
use crate::graph::{ComponentMap, Graph, NormalizedOperator};
use crate::matrix::{cosine_similarity, l2_distance, DenseMatrix};

/// How `D_i(k)` is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// Cosine similarity between `[Â^k X]_i` and the input row `X_i`. Needs no
    /// stationary state. A zero vector on either side gives 0.
    #[default]
    CosInitial,
    /// Euclidean distance between `[Â^k X]_i` and `[Â^∞ X]_i`.
    EuclidStationary,
}

/// How per-step weights are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Per-node softmax over `D_i(0..=K)`.
    #[default]
    Adaptive,
    /// `1 / (K + 1)` for every step.
    NaiveAverage,
    /// All weight on step `K`.
    SingleHop,
}

impl DistanceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DistanceMode::CosInitial => "cos-initial",
            DistanceMode::EuclidStationary => "euclid-stationary",
        }
    }
}

impl Weighting {
    pub fn as_str(self) -> &'static str {
        match self {
            Weighting::Adaptive => "adaptive",
            Weighting::NaiveAverage => "naive",
            Weighting::SingleHop => "single-hop",
        }
    }
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceMode {
    type Err = NafsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cos-initial" | "cos" => Ok(DistanceMode::CosInitial),
            "euclid-stationary" | "euclid" => Ok(DistanceMode::EuclidStationary),
            other => Err(NafsError::param(format!("unknown distance mode `{other}`"))),
        }
    }
}

impl FromStr for Weighting {
    type Err = NafsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(Weighting::Adaptive),
            "naive" | "naive-average" => Ok(Weighting::NaiveAverage),
            "single-hop" => Ok(Weighting::SingleHop),
            other => Err(NafsError::param(format!("unknown weighting `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoothingConfig {
    /// Maximal smoothing step `K`.
    pub k_max: usize,
    pub distance: DistanceMode,
    pub weighting: Weighting,
    /// L2-normalize input rows before smoothing.
    pub normalize_rows: bool,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            k_max: 20,
            distance: DistanceMode::CosInitial,
            weighting: Weighting::Adaptive,
            normalize_rows: true,
        }
    }
}

impl SmoothingConfig {
    /// The matrix actually smoothed: `x`, row-normalized when configured.
    pub fn prepare_features(&self, x: &DenseMatrix) -> DenseMatrix {
        if self.normalize_rows {
            x.l2_row_normalized()
        } else {
            x.clone()
        }
    }
}

/// `X^(0) … X^(K)` with `X^(k) = Â X^(k-1)`.
#[derive(Debug, Clone)]
pub struct MultiScaleFeatures {
    steps: Vec<DenseMatrix>,
}

impl MultiScaleFeatures {
    pub fn k_max(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn step(&self, k: usize) -> &DenseMatrix {
        &self.steps[k]
    }

    pub fn steps(&self) -> &[DenseMatrix] {
        &self.steps
    }

    pub fn initial(&self) -> &DenseMatrix {
        &self.steps[0]
    }
}

pub fn propagate(
    op: &NormalizedOperator<'_>,
    x: &DenseMatrix,
    k_max: usize,
) -> Result<MultiScaleFeatures> {
    if x.rows() != op.node_count() {
        return Err(NafsError::dims(
            format!("{} rows", op.node_count()),
            x.rows(),
        ));
    }
    let mut steps = Vec::with_capacity(k_max + 1);
    steps.push(x.clone());
    for k in 1..=k_max {
        let next = op.spmm(&steps[k - 1])?;
        steps.push(next);
    }
    Ok(MultiScaleFeatures { steps })
}

/// Rows of `Â^∞ X`, evaluated per connected component.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryState {
    pub matrix: DenseMatrix,
}

/// Closed-form limit of repeated smoothing.
///
/// Within a component `c`, `Â^∞[i, j] = d̃_i^r · d̃_j^(1-r) / (2 m_c + n_c)` and
/// entries across components are zero. Computed as a per-component weighted
/// feature sum followed by a per-node `d̃_i^r` scaling.
pub fn stationary_state(
    op: &NormalizedOperator<'_>,
    x: &DenseMatrix,
    components: &ComponentMap,
) -> Result<StationaryState> {
    let n = op.node_count();
    if x.rows() != n {
        return Err(NafsError::dims(format!("{n} rows"), x.rows()));
    }
    if components.component_id.len() != n {
        return Err(NafsError::dims(
            format!("component map over {n} nodes"),
            components.component_id.len(),
        ));
    }
    let r = op.r();
    let f = x.cols();
    let dt = op.dtilde();
    let mut sums = DenseMatrix::zeros(components.count(), f);
    for j in 0..n {
        let c = components.component_id[j];
        let w = dt[j].powf(1.0 - r);
        for (s, &v) in sums.row_mut(c).iter_mut().zip(x.row(j)) {
            *s += w * v;
        }
    }
    for c in 0..components.count() {
        let volume = (2 * components.edge_counts[c] + components.node_counts[c]) as f64;
        sums.row_mut(c).iter_mut().for_each(|s| *s /= volume);
    }
    let mut matrix = DenseMatrix::zeros(n, f);
    for i in 0..n {
        let scale = dt[i].powf(r);
        let c = components.component_id[i];
        for (o, &s) in matrix.row_mut(i).iter_mut().zip(sums.row(c)) {
            *o = scale * s;
        }
    }
    Ok(StationaryState { matrix })
}

/// `D_i` for one row, given the reference row for the chosen mode
/// (`X_i` for cos-initial, `[Â^∞ X]_i` for euclid-stationary).
#[inline]
pub(crate) fn row_distance(mode: DistanceMode, row: &[f64], reference: &[f64]) -> f64 {
    match mode {
        DistanceMode::CosInitial => cosine_similarity(row, reference),
        DistanceMode::EuclidStationary => l2_distance(row, reference),
    }
}

/// Per-node distances at every step: an `n × (K + 1)` matrix.
pub fn distance_profile(
    scales: &MultiScaleFeatures,
    stationary: Option<&StationaryState>,
    mode: DistanceMode,
) -> Result<DenseMatrix> {
    let reference = match mode {
        DistanceMode::CosInitial => scales.initial(),
        DistanceMode::EuclidStationary => {
            &stationary
                .ok_or_else(|| {
                    NafsError::param("euclid-stationary distances need the stationary state")
                })?
                .matrix
        }
    };
    if reference.shape() != scales.initial().shape() {
        return Err(NafsError::dims(
            format!("{:?}", scales.initial().shape()),
            format!("{:?}", reference.shape()),
        ));
    }
    let n = reference.rows();
    let steps = scales.k_max() + 1;
    let mut out = DenseMatrix::zeros(n, steps);
    if steps == 0 || n == 0 {
        return Ok(out);
    }
    out.as_mut_slice()
        .par_chunks_exact_mut(steps)
        .enumerate()
        .for_each(|(i, d)| {
            for (k, dk) in d.iter_mut().enumerate() {
                *dk = row_distance(mode, scales.step(k).row(i), reference.row(i));
            }
        });
    Ok(out)
}

/// Per-node distances `D_i(k)` and weights `w_i(k)`, both `n × (K + 1)`.
/// Column `k` of `weights` is the diagonal of `W(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    pub distances: DenseMatrix,
    pub weights: DenseMatrix,
}

impl WeightProfile {
    pub fn k_max(&self) -> usize {
        self.weights.cols().saturating_sub(1)
    }

    /// Diagonal of `W(k)`.
    pub fn step_weights(&self, k: usize) -> Vec<f64> {
        (0..self.weights.rows())
            .map(|i| self.weights.get(i, k))
            .collect()
    }
}

pub fn smoothing_weights(distances: &DenseMatrix, weighting: Weighting) -> Result<WeightProfile> {
    if let Some((row, col)) = distances.first_non_finite() {
        return Err(NafsError::NonFinite { row, col });
    }
    let (n, steps) = distances.shape();
    if steps == 0 {
        return Err(NafsError::param("distance profile has no steps"));
    }
    let mut weights = DenseMatrix::zeros(n, steps);
    match weighting {
        Weighting::Adaptive => {
            for i in 0..n {
                softmax_into(distances.row(i), weights.row_mut(i));
            }
        }
        Weighting::NaiveAverage => {
            let w = 1.0 / steps as f64;
            weights.as_mut_slice().fill(w);
        }
        Weighting::SingleHop => {
            for i in 0..n {
                weights.set(i, steps - 1, 1.0);
            }
        }
    }
    Ok(WeightProfile {
        distances: distances.clone(),
        weights,
    })
}

/// Max-subtracted softmax.
pub(crate) fn softmax_into(values: &[f64], out: &mut [f64]) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (o, &v) in out.iter_mut().zip(values) {
        *o = (v - max).exp();
        total += *o;
    }
    out.iter_mut().for_each(|o| *o /= total);
}

/// `X̂ = Σ_k W(k) X^(k)`.
pub fn combine(scales: &MultiScaleFeatures, profile: &WeightProfile) -> Result<DenseMatrix> {
    let (n, f) = scales.initial().shape();
    let steps = scales.k_max() + 1;
    if profile.weights.shape() != (n, steps) {
        return Err(NafsError::dims(
            format!("weights of shape ({n}, {steps})"),
            format!("{:?}", profile.weights.shape()),
        ));
    }
    let mut out = DenseMatrix::zeros(n, f);
    for i in 0..n {
        let acc = out.row_mut(i);
        for k in 0..steps {
            let w = profile.weights.get(i, k);
            for (a, &v) in acc.iter_mut().zip(scales.step(k).row(i)) {
                *a += w * v;
            }
        }
    }
    Ok(out)
}

/// Output of one smoothing branch.
#[derive(Debug, Clone)]
pub struct SmoothedEmbedding {
    /// `X̂`, `n × f`.
    pub matrix: DenseMatrix,
    pub profile: WeightProfile,
}

/// One smoothing branch for operator `Â_r`.
pub fn nafs_single(
    g: &Graph,
    x: &DenseMatrix,
    r: f64,
    cfg: &SmoothingConfig,
) -> Result<SmoothedEmbedding> {
    let op = NormalizedOperator::new(g, r)?;
    let x0 = cfg.prepare_features(x);
    let mut stream = SmoothingStream::new(&op, x0, cfg.distance, cfg.weighting)?;
    stream.advance_to(cfg.k_max)?;
    let matrix = stream.embedding();
    matrix.ensure_finite()?;
    let profile = stream.profile()?;
    Ok(SmoothedEmbedding { matrix, profile })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_er;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn random_features(n: usize, f: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n * f)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        DenseMatrix::from_vec(n, f, data).unwrap()
    }

    fn euclid_cfg(k_max: usize) -> SmoothingConfig {
        SmoothingConfig {
            k_max,
            distance: DistanceMode::EuclidStationary,
            weighting: Weighting::Adaptive,
            normalize_rows: false,
        }
    }

    #[test]
    fn triangle_propagation_reaches_uniform() {
        let g = triangle();
        let op = NormalizedOperator::new(&g, 0.0).unwrap();
        let ms = propagate(&op, &DenseMatrix::identity(3), 2).unwrap();
        assert_eq!(ms.k_max(), 2);
        for k in 1..=2 {
            assert!(ms
                .step(k)
                .as_slice()
                .iter()
                .all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
        }
    }

    #[test]
    fn propagate_k0_is_input() {
        let g = triangle();
        let op = NormalizedOperator::new(&g, 0.0).unwrap();
        let x = random_features(3, 2, 1);
        let ms = propagate(&op, &x, 0).unwrap();
        assert_eq!(ms.steps().len(), 1);
        assert_eq!(ms.initial(), &x);
    }

    #[test]
    fn triangle_stationary_is_one_third() {
        let g = triangle();
        let op = NormalizedOperator::new(&g, 0.0).unwrap();
        let st =
            stationary_state(&op, &DenseMatrix::identity(3), &g.connected_components()).unwrap();
        assert!(st
            .matrix
            .as_slice()
            .iter()
            .all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn isolated_node_stationary_is_itself() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let x = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [2.5, -4.0]]).unwrap();
        for r in [0.0, 0.3, 1.0] {
            let op = NormalizedOperator::new(&g, r).unwrap();
            let st = stationary_state(&op, &x, &g.connected_components()).unwrap();
            assert!((st.matrix.get(2, 0) - 2.5).abs() < 1e-15);
            assert!((st.matrix.get(2, 1) + 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn stationary_is_fixed_point() {
        let g = generate_er(40, 0.08, 5).unwrap();
        let x = random_features(40, 3, 2);
        for r in [0.0, 0.25, 0.5, 1.0] {
            let op = NormalizedOperator::new(&g, r).unwrap();
            let st = stationary_state(&op, &x, &g.connected_components()).unwrap();
            let next = op.spmm(&st.matrix).unwrap();
            assert!(next.max_abs_diff(&st.matrix) < 1e-9, "r = {r}");
        }
    }

    #[test]
    fn triangle_euclid_distances() {
        let g = triangle();
        let op = NormalizedOperator::new(&g, 0.0).unwrap();
        let x = DenseMatrix::identity(3);
        let ms = propagate(&op, &x, 1).unwrap();
        let st = stationary_state(&op, &x, &g.connected_components()).unwrap();
        let d = distance_profile(&ms, Some(&st), DistanceMode::EuclidStationary).unwrap();
        let expected = 6f64.sqrt() / 3.0;
        for i in 0..3 {
            assert!((d.get(i, 0) - expected).abs() < 1e-15);
            assert!(d.get(i, 1).abs() < 1e-15);
        }
    }

    #[test]
    fn euclid_needs_stationary() {
        let g = triangle();
        let op = NormalizedOperator::new(&g, 0.0).unwrap();
        let ms = propagate(&op, &DenseMatrix::identity(3), 1).unwrap();
        assert!(distance_profile(&ms, None, DistanceMode::EuclidStationary).is_err());
    }

    #[test]
    fn cosine_step_zero_is_one() {
        let g = generate_er(25, 0.2, 3).unwrap();
        let op = NormalizedOperator::new(&g, 0.4).unwrap();
        let ms = propagate(&op, &random_features(25, 4, 3), 3).unwrap();
        let d = distance_profile(&ms, None, DistanceMode::CosInitial).unwrap();
        for i in 0..25 {
            assert!((d.get(i, 0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cosine_zero_row_gives_zero() {
        let g = triangle();
        let op = NormalizedOperator::new(&g, 0.0).unwrap();
        let x = DenseMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let ms = propagate(&op, &x, 3).unwrap();
        let d = distance_profile(&ms, None, DistanceMode::CosInitial).unwrap();
        assert!(d.row(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn softmax_of_constants_is_uniform() {
        let d = DenseMatrix::from_rows(&[[0.7; 4], [3.0; 4]]).unwrap();
        let p = smoothing_weights(&d, Weighting::Adaptive).unwrap();
        assert!(p
            .weights
            .as_slice()
            .iter()
            .all(|w| (w - 0.25).abs() < 1e-15));
    }

    #[test]
    fn triangle_softmax_weights() {
        let d0 = 6f64.sqrt() / 3.0;
        let d = DenseMatrix::from_rows(&[[d0, 0.0]]).unwrap();
        let p = smoothing_weights(&d, Weighting::Adaptive).unwrap();
        let e = d0.exp();
        assert!((p.weights.get(0, 0) - e / (e + 1.0)).abs() < 1e-15);
        assert!((p.weights.get(0, 1) - 1.0 / (e + 1.0)).abs() < 1e-15);
        assert!((p.weights.get(0, 0) - 0.6935).abs() < 1e-4);
    }

    #[test]
    fn single_hop_and_naive() {
        let d = DenseMatrix::from_rows(&[[5.0, 1.0, 2.0]]).unwrap();
        let sh = smoothing_weights(&d, Weighting::SingleHop).unwrap();
        assert_eq!(sh.weights.row(0), &[0.0, 0.0, 1.0]);
        let nv = smoothing_weights(&d, Weighting::NaiveAverage).unwrap();
        assert!(nv
            .weights
            .row(0)
            .iter()
            .all(|w| (w - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn nan_distance_rejected() {
        let d = DenseMatrix::from_rows(&[[0.0, f64::NAN]]).unwrap();
        assert!(smoothing_weights(&d, Weighting::Adaptive).is_err());
    }

    #[test]
    fn large_distances_stay_finite() {
        let d = DenseMatrix::from_rows(&[[900.0, 1000.0, 950.0]]).unwrap();
        let p = smoothing_weights(&d, Weighting::Adaptive).unwrap();
        assert!(p.weights.as_slice().iter().all(|w| w.is_finite()));
        assert!((p.weights.row(0).iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn combine_identity_and_average() {
        let g = generate_er(12, 0.3, 7).unwrap();
        let op = NormalizedOperator::new(&g, 0.2).unwrap();
        let ms = propagate(&op, &random_features(12, 3, 7), 1).unwrap();
        let mut first = DenseMatrix::zeros(12, 2);
        (0..12).for_each(|i| first.set(i, 0, 1.0));
        let profile = WeightProfile {
            distances: DenseMatrix::zeros(12, 2),
            weights: first,
        };
        assert_eq!(combine(&ms, &profile).unwrap(), *ms.initial());

        let uniform =
            smoothing_weights(&DenseMatrix::zeros(12, 2), Weighting::NaiveAverage).unwrap();
        let avg = combine(&ms, &uniform).unwrap();
        for i in 0..12 {
            for c in 0..3 {
                let want = 0.5 * (ms.step(0).get(i, c) + ms.step(1).get(i, c));
                assert!((avg.get(i, c) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn k0_returns_prepared_input() {
        let g = generate_er(20, 0.2, 2).unwrap();
        let x = random_features(20, 5, 2);
        for (distance, weighting) in [
            (DistanceMode::CosInitial, Weighting::Adaptive),
            (DistanceMode::EuclidStationary, Weighting::NaiveAverage),
            (DistanceMode::CosInitial, Weighting::SingleHop),
        ] {
            let cfg = SmoothingConfig {
                k_max: 0,
                distance,
                weighting,
                normalize_rows: true,
            };
            let out = nafs_single(&g, &x, 0.5, &cfg).unwrap();
            assert!(out.matrix.max_abs_diff(&x.l2_row_normalized()) < 1e-15);
        }
    }

    #[test]
    fn triangle_pipeline_matches_worked_example() {
        let g = triangle();
        let out = nafs_single(&g, &DenseMatrix::identity(3), 0.0, &euclid_cfg(1)).unwrap();
        let e = (6f64.sqrt() / 3.0).exp();
        let (w0, w1) = (e / (e + 1.0), 1.0 / (e + 1.0));
        for i in 0..3 {
            for c in 0..3 {
                let delta = if i == c { 1.0 } else { 0.0 };
                let want = w0 * delta + w1 / 3.0;
                assert!((out.matrix.get(i, c) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pipeline_equals_explicit_composition() {
        let g = generate_er(30, 0.15, 21).unwrap();
        let x = random_features(30, 4, 21);
        for distance in [DistanceMode::CosInitial, DistanceMode::EuclidStationary] {
            for weighting in [
                Weighting::Adaptive,
                Weighting::NaiveAverage,
                Weighting::SingleHop,
            ] {
                let cfg = SmoothingConfig {
                    k_max: 6,
                    distance,
                    weighting,
                    normalize_rows: true,
                };
                let streamed = nafs_single(&g, &x, 0.3, &cfg).unwrap();

                let op = NormalizedOperator::new(&g, 0.3).unwrap();
                let x0 = cfg.prepare_features(&x);
                let ms = propagate(&op, &x0, cfg.k_max).unwrap();
                let st = stationary_state(&op, &x0, &g.connected_components()).unwrap();
                let d = distance_profile(&ms, Some(&st), distance).unwrap();
                let p = smoothing_weights(&d, weighting).unwrap();
                let explicit = combine(&ms, &p).unwrap();

                assert!(streamed.matrix.max_abs_diff(&explicit) < 1e-12);
                assert!(streamed.profile.distances.max_abs_diff(&p.distances) < 1e-15);
                assert!(streamed.profile.weights.max_abs_diff(&p.weights) < 1e-15);
            }
        }
    }

    #[test]
    fn er50_both_modes_smoke() {
        let g = generate_er(50, 0.1, 50).unwrap();
        let x = random_features(50, 6, 50);
        for distance in [DistanceMode::CosInitial, DistanceMode::EuclidStationary] {
            let cfg = SmoothingConfig {
                k_max: 10,
                distance,
                ..SmoothingConfig::default()
            };
            let out = nafs_single(&g, &x, 0.5, &cfg).unwrap();
            assert!(out.matrix.first_non_finite().is_none());
            for i in 0..50 {
                let s: f64 = out.profile.weights.row(i).iter().sum();
                assert!((s - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn adaptive_weight_positive_wherever_distance_positive() {
        let g = generate_er(40, 0.1, 13).unwrap();
        let out = nafs_single(&g, &random_features(40, 3, 13), 0.0, &euclid_cfg(30)).unwrap();
        let p = &out.profile;
        for i in 0..40 {
            for k in 0..=30 {
                if p.distances.get(i, k) > 0.0 {
                    assert!(p.weights.get(i, k) > 0.0);
                }
            }
        }
    }

    #[test]
    fn parses_mode_names() {
        assert_eq!(
            "cos-initial".parse::<DistanceMode>().unwrap(),
            DistanceMode::CosInitial
        );
        assert_eq!(
            "euclid-stationary".parse::<DistanceMode>().unwrap(),
            DistanceMode::EuclidStationary
        );
        assert_eq!(
            "naive".parse::<Weighting>().unwrap(),
            Weighting::NaiveAverage
        );
        assert_eq!(
            "single-hop".parse::<Weighting>().unwrap(),
            Weighting::SingleHop
        );
        assert!("bogus".parse::<Weighting>().is_err());
    }
}
