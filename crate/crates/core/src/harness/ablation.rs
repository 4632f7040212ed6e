//! Alternative entropies used to show which ingredients of DSE matter.
//!
//! * **DMEE**: Shannon entropy of the `n²` entries of `P`, normalized to sum
//!   to one (each row of `P` sums to one, so the total is `n`).
//! * **k-NN spectral**: spectral entropy of the symmetrized binary k-nearest
//!   neighbour adjacency.
//! * **Gaussian spectral**: spectral entropy of the raw affinity `G`.
//!
//! The variant spectra are not diffusion spectra (the adjacency is not
//! positive semidefinite and `G` has eigenvalues above one), so they go
//! through [`spectral_entropy`] on `|λ|` without the clamp rule. They are not
//! diffusion operators either, so no diffusion time applies: their
//! eigenvalues enter unpowered (`t = 1`). Only the DSE reference uses `t`.

use std::collections::BTreeMap;

use ndarray::Array2;

use crate::cloud::PointCloud;
use crate::error::{invalid, Result};
use crate::kernel::{build_kernel, pairwise_sq_dists, KernelConfig};
use crate::spectrum::{
    dse, spectral_entropy, symmetric_eigenvalues_raw, EntropyMethod, EntropyReport, Spectrum,
};

/// Neighbour count for the k-NN variant when none is given.
pub const DEFAULT_KNN_K: usize = 10;

/// Shannon entropy (bits) of the entries of a row-stochastic matrix.
pub fn matrix_entry_entropy(p: &Array2<f64>) -> f64 {
    let total: f64 = p.sum();
    -p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| {
            let q = v / total;
            q * q.log2()
        })
        .sum::<f64>()
}

/// Symmetrized binary k-NN adjacency: `i ~ j` when either is among the other's
/// `k` nearest neighbours (self excluded, ties broken by lower index).
pub fn knn_adjacency(sq_dists: &Array2<f64>, k: usize) -> Array2<f64> {
    let n = sq_dists.nrows();
    let mut adj = Array2::zeros((n, n));
    for i in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| sq_dists[[i, a]].total_cmp(&sq_dists[[i, b]]).then(a.cmp(&b)));
        for &j in order.iter().take(k) {
            adj[[i, j]] = 1.0;
            adj[[j, i]] = 1.0;
        }
    }
    adj
}

/// DSE together with the three ablation variants, keyed by method.
///
/// Requires `1 ≤ knn_k < n`. The reported σ is the one used for `G` and `P`.
pub fn ablation_entropies(
    cloud: &PointCloud,
    knn_k: usize,
    config: &KernelConfig,
    t: f64,
) -> Result<BTreeMap<EntropyMethod, EntropyReport>> {
    let n = cloud.n();
    if knn_k < 1 || knn_k >= n {
        return Err(invalid(format!("knn_k must satisfy 1 <= k < n, got k={knn_k}, n={n}")));
    }
    let kernel = build_kernel(cloud, config)?;
    let sigma = Some(kernel.sigma);
    let report = |method, value, t| EntropyReport {
        method,
        value,
        t,
        sigma,
        n,
    };

    let mut out = BTreeMap::new();
    let mut diffusion = dse(&Spectrum::from_eigenvalues(symmetric_eigenvalues_raw(&kernel.symmetric)?)?, t)?;
    diffusion.sigma = sigma;
    out.insert(EntropyMethod::Dse, diffusion);
    out.insert(
        EntropyMethod::Dmee,
        report(EntropyMethod::Dmee, matrix_entry_entropy(&kernel.transition()), None),
    );
    let adj = knn_adjacency(&pairwise_sq_dists(cloud.points())?, knn_k);
    out.insert(
        EntropyMethod::KnnSpectral,
        report(
            EntropyMethod::KnnSpectral,
            spectral_entropy(&symmetric_eigenvalues_raw(&adj)?, 1.0)?,
            Some(1.0),
        ),
    );
    out.insert(
        EntropyMethod::GaussianSpectral,
        report(
            EntropyMethod::GaussianSpectral,
            spectral_entropy(&symmetric_eigenvalues_raw(&kernel.gaussian)?, 1.0)?,
            Some(1.0),
        ),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn uniform_transition_has_maximal_entry_entropy() {
        let p = Array2::from_elem((4, 4), 0.25);
        assert!((matrix_entry_entropy(&p) - 4.0).abs() < 1e-12);
        assert!((matrix_entry_entropy(&Array2::eye(4)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn knn_on_a_line() {
        let pts = array![[0.0], [1.0], [3.0], [7.0]];
        let sq = pairwise_sq_dists(pts.view()).unwrap();
        let adj = knn_adjacency(&sq, 1);
        // Nearest neighbours: 0→1, 1→0, 2→1, 3→2.
        let expected = array![
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0]
        ];
        assert_eq!(adj, expected);
    }

    #[test]
    fn far_apart_points_give_flat_gaussian_spectrum() {
        let pts = Array2::from_shape_fn((6, 6), |(i, j)| if i == j { 100.0 } else { 0.0 });
        let cloud = PointCloud::new(pts).unwrap();
        let out = ablation_entropies(&cloud, 2, &KernelConfig::fixed(1.0), 1.0).unwrap();
        assert!((out[&EntropyMethod::GaussianSpectral].value - 6f64.log2()).abs() < 1e-9);
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn rejects_bad_k() {
        let cloud = PointCloud::new(array![[0.0], [1.0], [2.0]]).unwrap();
        assert!(ablation_entropies(&cloud, 0, &KernelConfig::default(), 1.0).is_err());
        assert!(ablation_entropies(&cloud, 3, &KernelConfig::default(), 1.0).is_err());
    }
}
