//! Spectral clustering and k-means on shapes with known answers, plus an
//! independent pair-counting oracle for the adjusted Rand index.

use diffspec::clustering::{adjusted_rand_index, kmeans, spectral_cluster, ClusterConfig};
use diffspec::kernel::Bandwidth;
use diffspec::synth::gen_blobs;
use diffspec::PointCloud;
use ndarray::Array2;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// ARI from the 2×2 pair-agreement table.
fn pair_count_ari(a: &[usize], b: &[usize]) -> f64 {
    let (mut both, mut only_a, mut only_b, mut neither) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => both += 1.0,
                (true, false) => only_a += 1.0,
                (false, true) => only_b += 1.0,
                (false, false) => neither += 1.0,
            }
        }
    }
    let denom = (both + only_a) * (only_a + neither) + (both + only_b) * (only_b + neither);
    if denom == 0.0 {
        return 1.0;
    }
    2.0 * (both * neither - only_a * only_b) / denom
}

fn circles(per_ring: usize, seed: u64) -> (PointCloud, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, 0.05).unwrap();
    let mut rows = Vec::new();
    let mut truth = Vec::new();
    for (ring, radius) in [1.0, 3.0].into_iter().enumerate() {
        for _ in 0..per_ring {
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            rows.push(radius * angle.cos() + jitter.sample(&mut rng));
            rows.push(radius * angle.sin() + jitter.sample(&mut rng));
            truth.push(ring);
        }
    }
    let pts = Array2::from_shape_vec((2 * per_ring, 2), rows).unwrap();
    (PointCloud::new(pts).unwrap(), truth)
}

#[test]
fn separated_blobs_are_recovered_exactly() {
    for seed in 0..3 {
        let cloud = gen_blobs(300, 3, 10, 50.0, 1.0, seed).unwrap();
        let got = spectral_cluster(&cloud, 3, seed, &ClusterConfig::default()).unwrap();
        assert_eq!(got.k, 3);
        assert_eq!(adjusted_rand_index(&got.ids, cloud.labels().unwrap()), 1.0);
    }
}

#[test]
fn concentric_circles_are_separated() {
    let (cloud, truth) = circles(200, 4);
    let config = ClusterConfig {
        bandwidth: Bandwidth::Fixed(0.1),
        ..ClusterConfig::default()
    };
    let got = spectral_cluster(&cloud, 2, 0, &config).unwrap();
    let ari = adjusted_rand_index(&got.ids, &truth);
    assert!(ari >= 0.95, "{ari}");
}

#[test]
fn clustering_is_deterministic() {
    let cloud = gen_blobs(150, 3, 5, 4.0, 1.0, 8).unwrap();
    let a = spectral_cluster(&cloud, 3, 21, &ClusterConfig::default()).unwrap();
    let b = spectral_cluster(&cloud, 3, 21, &ClusterConfig::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn reordering_points_reorders_the_partition() {
    let cloud = gen_blobs(120, 3, 6, 50.0, 1.0, 2).unwrap();
    let mut perm: Vec<usize> = (0..120).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(2));
    let shuffled = cloud.select(&perm).unwrap();
    let a = spectral_cluster(&cloud, 3, 0, &ClusterConfig::default()).unwrap();
    let b = spectral_cluster(&shuffled, 3, 0, &ClusterConfig::default()).unwrap();
    let a_in_b_order: Vec<usize> = perm.iter().map(|&i| a.ids[i]).collect();
    assert_eq!(adjusted_rand_index(&a_in_b_order, &b.ids), 1.0);
}

#[test]
fn kmeans_inertia_never_rises() {
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = Array2::from_shape_fn((200, 3), |_| rng.random::<f64>());
        let run = kmeans(data.view(), 5, &mut rng, 300, 0.0);
        assert!(!run.history.is_empty() && run.history.len() <= 300);
        for w in run.history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", run.history);
        }
        assert!((run.inertia - run.history.last().unwrap()).abs() <= 1e-9 * run.inertia.max(1.0));
        let used: std::collections::BTreeSet<usize> = run.ids.iter().copied().collect();
        assert!(used.iter().all(|&c| c < 5));
    }
}

#[test]
fn ari_examples() {
    assert_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[1, 1, 0, 0]), 1.0);
    let v = adjusted_rand_index(&[0, 0, 1, 1], &[0, 1, 0, 1]);
    assert!((v - pair_count_ari(&[0, 0, 1, 1], &[0, 1, 0, 1])).abs() < 1e-12);
    assert!(v < 0.0);
}

proptest! {
    #[test]
    fn ari_matches_pair_counting(
        pairs in proptest::collection::vec((0usize..4, 0usize..4), 2..80),
    ) {
        let (a, b): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        let ours = adjusted_rand_index(&a, &b);
        let oracle = pair_count_ari(&a, &b);
        prop_assert!((ours - oracle).abs() < 1e-10, "{ours} vs {oracle}");
        prop_assert!((ours - adjusted_rand_index(&b, &a)).abs() < 1e-12);
    }
}
