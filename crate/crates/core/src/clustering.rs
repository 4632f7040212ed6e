//! Normalized spectral clustering.
//!
//! 1. Build the anisotropic kernel and its symmetric conjugate `A`.
//! 2. Take the eigenvectors of the `k` largest eigenvalues of `A` (the
//!    bottom of the normalized Laplacian `I − A`).
//! 3. Scale each row of that `n × k` embedding to unit length.
//! 4. Run k-means++ / Lloyd with several seeded restarts and keep the lowest
//!    inertia.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use serde::Serialize;

use crate::cloud::PointCloud;
use crate::error::{invalid, Result};
use crate::kernel::{build_kernel, Bandwidth, KernelConfig};
use crate::rng::keyed;
use crate::spectrum::symmetric_eigen;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterConfig {
    pub bandwidth: Bandwidth,
    pub restarts: usize,
    pub max_iter: usize,
    /// Lloyd stops once the relative inertia change drops below this.
    pub tol: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            bandwidth: Bandwidth::MedianHeuristic,
            restarts: 10,
            max_iter: 300,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterAssignment {
    pub ids: Vec<usize>,
    pub k: usize,
    pub inertia: f64,
}

/// One k-means run: final ids, inertia and the inertia after every
/// assignment step.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansRun {
    pub ids: Vec<usize>,
    pub inertia: f64,
    pub history: Vec<f64>,
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(row: ArrayView1<'_, f64>, centers: &Array2<f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.rows().into_iter().enumerate() {
        let d = sq_dist(row, center);
        // Strict comparison keeps the lowest index on ties.
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn kmeans_pp<R: Rng>(data: ArrayView2<'_, f64>, k: usize, rng: &mut R) -> Array2<f64> {
    let n = data.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = data
        .rows()
        .into_iter()
        .map(|r| sq_dist(r, data.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total weight")
        } else {
            // Every remaining point coincides with a center.
            (0..n).find(|i| !chosen.contains(i)).expect("k <= n")
        };
        chosen.push(next);
        for (i, r) in data.rows().into_iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(r, data.row(next)));
        }
    }
    data.select(Axis(0), &chosen)
}

/// k-means++ seeding followed by Lloyd iterations.
pub fn kmeans<R: Rng>(
    data: ArrayView2<'_, f64>,
    k: usize,
    rng: &mut R,
    max_iter: usize,
    tol: f64,
) -> KMeansRun {
    let (n, dim) = data.dim();
    let mut centers = kmeans_pp(data, k, rng);
    let mut ids = vec![0usize; n];
    let mut history = Vec::new();
    for _ in 0..max_iter.max(1) {
        let mut inertia = 0.0;
        for (i, row) in data.rows().into_iter().enumerate() {
            let (c, d) = nearest(row, &centers);
            ids[i] = c;
            inertia += d;
        }
        let converged = history
            .last()
            .is_some_and(|&prev: &f64| prev - inertia <= tol * prev.max(f64::MIN_POSITIVE));
        history.push(inertia);
        if converged || inertia == 0.0 {
            break;
        }
        let mut sums = Array2::<f64>::zeros((k, dim));
        let mut counts = vec![0usize; k];
        for (i, row) in data.rows().into_iter().enumerate() {
            let mut s = sums.row_mut(ids[i]);
            s += &row;
            counts[ids[i]] += 1;
        }
        for c in 0..k {
            // An emptied cluster keeps its previous center.
            if counts[c] > 0 {
                let mean = &sums.row(c) / counts[c] as f64;
                centers.row_mut(c).assign(&mean);
            }
        }
    }
    KMeansRun {
        ids,
        inertia: *history.last().expect("at least one iteration"),
        history,
    }
}

/// Row-normalized spectral embedding from the top `k` eigenvectors of the
/// symmetric diffusion conjugate. Zero rows stay zero.
pub fn spectral_embedding(cloud: &PointCloud, k: usize, bandwidth: Bandwidth) -> Result<Array2<f64>> {
    let config = KernelConfig {
        bandwidth,
        ..KernelConfig::default()
    };
    let kernel = build_kernel(cloud, &config)?;
    let (_, vectors) = symmetric_eigen(&kernel.symmetric)?;
    let mut embedding = vectors.slice(ndarray::s![.., ..k]).to_owned();
    for mut row in embedding.rows_mut() {
        let norm = row.dot(&row).sqrt();
        if norm > 0.0 {
            row /= norm;
        }
    }
    Ok(embedding)
}

/// Clusters a cloud into `k` groups. Deterministic for a given seed.
pub fn spectral_cluster(
    cloud: &PointCloud,
    k: usize,
    seed: u64,
    config: &ClusterConfig,
) -> Result<ClusterAssignment> {
    if k < 2 || k > cloud.n() {
        return Err(invalid(format!(
            "cluster count must satisfy 2 <= k <= n, got k={k}, n={}",
            cloud.n()
        )));
    }
    if config.restarts < 1 {
        return Err(invalid("restarts must be at least 1"));
    }
    let embedding = spectral_embedding(cloud, k, config.bandwidth)?;
    let best = (0..config.restarts)
        .map(|r| {
            let mut rng = keyed(seed, &[r as u64]);
            kmeans(embedding.view(), k, &mut rng, config.max_iter, config.tol)
        })
        .reduce(|best, run| if run.inertia < best.inertia { run } else { best })
        .expect("at least one restart");
    Ok(ClusterAssignment {
        ids: best.ids,
        k,
        inertia: best.inertia,
    })
}

/// Adjusted Rand index between two labelings of the same points.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let choose2 = |v: u64| (v * v.saturating_sub(1)) as f64 / 2.0;
    let index: f64 = table.iter().flatten().map(|&v| choose2(v)).sum();
    let rows: f64 = table.iter().map(|r| choose2(r.iter().sum())).sum();
    let cols: f64 = (0..kb).map(|j| choose2(table.iter().map(|r| r[j]).sum())).sum();
    let total = choose2(n as u64);
    let expected = rows * cols / total;
    let max = 0.5 * (rows + cols);
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn ari_examples() {
        assert_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[1, 1, 0, 0]), 1.0);
        assert!(adjusted_rand_index(&[0, 0, 1, 1], &[0, 1, 0, 1]) < 0.0);
    }

    #[test]
    fn kmeans_splits_obvious_groups() {
        let data = array![[0.0, 0.0], [0.1, 0.0], [5.0, 5.0], [5.1, 5.0]];
        let mut rng = keyed(1, &[]);
        let run = kmeans(data.view(), 2, &mut rng, 300, 1e-6);
        assert_eq!(adjusted_rand_index(&run.ids, &[0, 0, 1, 1]), 1.0);
        assert!((run.inertia - 0.01).abs() < 1e-12);
    }

    #[test]
    fn k_equal_n_gives_singletons() {
        let c = PointCloud::new(array![[0.0, 0.0], [1.0, 0.3], [2.0, -1.0], [0.5, 4.0], [3.0, 3.0]]).unwrap();
        let a = spectral_cluster(&c, 5, 3, &ClusterConfig::default()).unwrap();
        let mut ids = a.ids.clone();
        ids.sort_unstable();
        assert_eq!(ids, vec![0, 1, 2, 3, 4]);
        assert!(a.inertia.abs() < 1e-20);
    }

    #[test]
    fn rejects_bad_k() {
        let c = PointCloud::new(array![[0.0], [1.0], [2.0]]).unwrap();
        let cfg = ClusterConfig::default();
        assert!(spectral_cluster(&c, 4, 0, &cfg).is_err());
        assert!(spectral_cluster(&c, 1, 0, &cfg).is_err());
    }
}
