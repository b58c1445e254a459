mod common;

use common::*;
use nafs::evaluation::{
    adjusted_rand_index, auc_ap, clustering_accuracy, clustering_metrics, decode_scores, kmeans,
    normalized_mutual_info, run_linkpred, split_edges, SplitConfig,
};
use nafs::{generate_er, nafs_ensemble, DenseMatrix, EnsembleConfig, Graph, SmoothingConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn labels(max_len: usize, max_class: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (1..max_len).prop_flat_map(move |n| {
        (
            prop::collection::vec(0..max_class, n),
            prop::collection::vec(0..max_class, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_auc_equals_pair_counting(
        pos in prop::collection::vec(0u8..20, 1..100),
        neg in prop::collection::vec(0u8..20, 1..100),
    ) {
        // coarse integer scores force plenty of ties
        let pos: Vec<f64> = pos.into_iter().map(f64::from).collect();
        let neg: Vec<f64> = neg.into_iter().map(f64::from).collect();
        let (auc, ap) = auc_ap(&pos, &neg).unwrap();
        prop_assert_eq!(auc, brute_auc(&pos, &neg));
        prop_assert!((0.0..=1.0).contains(&ap));
    }

    #[test]
    fn hungarian_equals_exhaustive((pred, truth) in labels(40, 5)) {
        prop_assert_eq!(clustering_accuracy(&pred, &truth).unwrap(), brute_acc(&pred, &truth));
    }

    #[test]
    fn nmi_and_ari_symmetric_and_relabel_invariant(
        (pred, truth) in labels(60, 6),
        shift in 1usize..50,
    ) {
        let nmi = normalized_mutual_info(&pred, &truth).unwrap();
        let ari = adjusted_rand_index(&pred, &truth).unwrap();
        prop_assert_eq!(nmi, normalized_mutual_info(&truth, &pred).unwrap());
        prop_assert_eq!(ari, adjusted_rand_index(&truth, &pred).unwrap());
        // reversing ids and shifting them is a relabelling
        let relabel: Vec<usize> = pred.iter().map(|&p| 10 - p + shift).collect();
        prop_assert_eq!(nmi, normalized_mutual_info(&relabel, &truth).unwrap());
        prop_assert_eq!(ari, adjusted_rand_index(&relabel, &truth).unwrap());
        let s = clustering_metrics(&pred, &truth).unwrap();
        for v in [s.acc, s.nmi, s.ari] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn kmeans_contract(seed in 0u64..1000, c in 1usize..6) {
        let z = normal_matrix(40, 3, seed);
        let r = kmeans(&z, c, 4, seed).unwrap();
        prop_assert!(r.assignments.iter().all(|&a| a < c));
        prop_assert!(r.restart_inertias.iter().all(|&v| r.inertia <= v));
        prop_assert!(r.inertia_trace.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        let recomputed: f64 = (0..40)
            .map(|i| {
                let ctr = r.centroids.row(r.assignments[i]);
                z.row(i).iter().zip(ctr).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            })
            .sum();
        prop_assert!((recomputed - r.inertia).abs() <= 1e-9 * (1.0 + r.inertia));
    }
}

#[test]
fn metric_examples() {
    let s = clustering_metrics(&[0, 0, 0, 0], &[0, 0, 1, 1]).unwrap();
    assert_eq!((s.nmi, s.ari), (0.0, 0.0));
    assert_eq!(
        clustering_accuracy(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(),
        1.0
    );
    assert_eq!(auc_ap(&[0.9, 0.4], &[0.6, 0.1]).unwrap().0, 0.75);
    assert!(clustering_metrics(&[0, 1, 2], &[0, 1]).is_err());
}

#[test]
fn split_determinism_and_seed_sensitivity() {
    let g = generate_er(200, 0.05, 1).unwrap();
    let a = split_edges(&g, 0.05, 0.1, 7).unwrap();
    assert_eq!(a, split_edges(&g, 0.05, 0.1, 7).unwrap());
    let trains: Vec<Graph> = (0..5)
        .map(|s| split_edges(&g, 0.05, 0.1, 100 + s).unwrap().train_graph)
        .collect();
    for i in 0..5 {
        for j in i + 1..5 {
            assert_ne!(trains[i], trains[j]);
        }
    }
}

#[test]
fn negatives_exclude_every_original_edge() {
    let g = generate_er(60, 0.3, 2).unwrap();
    let s = split_edges(&g, 0.1, 0.2, 3).unwrap();
    assert_eq!(s.val_neg.len(), s.val_pos.len());
    assert_eq!(s.test_neg.len(), s.test_pos.len());
    for &(u, v) in s.val_neg.iter().chain(&s.test_neg) {
        assert_ne!(u, v);
        assert!(!g.has_edge(u, v));
    }
    assert_eq!(
        s.train_graph.edge_count() + s.val_pos.len() + s.test_pos.len(),
        g.edge_count()
    );
}

#[test]
fn decoder_reference_values() {
    let z = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
    let s = decode_scores(&z, &[(0, 1), (0, 2)], true).unwrap();
    assert_eq!(s[0], 0.5);
    assert!((s[1] - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-15);
}

/// Planted two-community graph with community-indicator-plus-noise features.
fn planted(n: usize, seed: u64) -> (Graph, DenseMatrix, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if truth[u] == truth[v] { 0.15 } else { 0.01 };
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let mut x = normal_matrix(n, 8, seed);
    x.as_mut_slice().iter_mut().for_each(|v| *v *= 0.5);
    for i in 0..n {
        x.row_mut(i)[truth[i]] += 1.0;
    }
    (Graph::from_edges(n, &edges).unwrap(), x, truth)
}

#[test]
fn community_graph_link_prediction_beats_chance() {
    let (g, x, _) = planted(200, 4);
    let scores = run_linkpred(
        &g,
        &x,
        &SmoothingConfig::default(),
        &EnsembleConfig::default(),
        &SplitConfig::default(),
        true,
    )
    .unwrap();
    // community membership alone caps AUC near 0.75 here
    assert!(scores.test_auc > 0.65, "auc {}", scores.test_auc);
    assert!(scores.val_auc.is_some());
}

#[test]
fn own_edges_score_above_sampled_non_edges() {
    let (g, x, _) = planted(200, 6);
    let z = nafs_ensemble(
        &g,
        &x,
        &SmoothingConfig::default(),
        &EnsembleConfig::default(),
    )
    .unwrap();
    let pos = g.edges();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut neg = Vec::new();
    while neg.len() < pos.len() {
        let (u, v) = (rng.gen_range(0..200), rng.gen_range(0..200));
        if u != v && !g.has_edge(u, v) {
            neg.push((u, v));
        }
    }
    let (auc, _) = auc_ap(
        &decode_scores(&z, &pos, true).unwrap(),
        &decode_scores(&z, &neg, true).unwrap(),
    )
    .unwrap();
    assert!(auc > 0.65, "auc {auc}");
}

#[test]
fn smoothing_helps_clustering_on_planted_communities() {
    let (g, x, truth) = planted(200, 5);
    let raw = kmeans(&x, 2, 10, 0).unwrap();
    let z = nafs_ensemble(
        &g,
        &x,
        &SmoothingConfig::default(),
        &EnsembleConfig::default(),
    )
    .unwrap();
    let smoothed = kmeans(&z, 2, 10, 0).unwrap();
    let nmi_raw = normalized_mutual_info(&raw.assignments, &truth).unwrap();
    let nmi_smooth = normalized_mutual_info(&smoothed.assignments, &truth).unwrap();
    assert!(nmi_smooth > nmi_raw, "{nmi_smooth} <= {nmi_raw}");
}
