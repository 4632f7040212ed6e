//! Seeded generators for the synthetic dataset families.
//!
//! Every generator is a pure function of its arguments and seed.

use ndarray::{Array1, Array2};
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::Serialize;

use crate::cloud::PointCloud;
use crate::error::{invalid, Result};
use crate::rng::seeded;

/// Sizes of `k` classes sharing `n` points as evenly as possible.
pub fn balanced_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|c| n / k + usize::from(c < n % k)).collect()
}

fn gaussian_vector<R: Rng>(rng: &mut R, d: usize) -> Array1<f64> {
    Array1::from_shape_fn(d, |_| rng.sample(StandardNormal))
}

/// `k` random unit directions in `ℝ^d`. When `k ≤ d` they are orthonormal
/// (first `k` columns of a Haar-random orthogonal matrix, via twice-iterated
/// Gram–Schmidt); otherwise they are independent uniform directions.
pub fn random_directions<R: Rng>(rng: &mut R, k: usize, d: usize) -> Vec<Array1<f64>> {
    let mut dirs: Vec<Array1<f64>> = Vec::with_capacity(k);
    while dirs.len() < k {
        let mut v = gaussian_vector(rng, d);
        if dirs.len() < d {
            for _ in 0..2 {
                for q in &dirs {
                    let proj = q.dot(&v);
                    v.scaled_add(-proj, q);
                }
            }
        }
        let norm = v.dot(&v).sqrt();
        if norm > 1e-8 {
            dirs.push(v / norm);
        }
    }
    dirs
}

fn labelled(points: Array2<f64>, sizes: &[usize]) -> Result<PointCloud> {
    let labels = sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
        .collect();
    PointCloud::with_labels(points, labels)
}

/// `k` isotropic Gaussian blobs in `ℝ^d`.
///
/// Centers sit at `separation · u_c` for random unit directions `u_c`
/// (orthonormal when `k ≤ d`, so centers are `separation·√2` apart). Each
/// blob holds `n/k` (±1) points with per-coordinate standard deviation
/// `noise_std`. Rows are grouped by blob; labels are blob ids.
pub fn gen_blobs(
    n: usize,
    k: usize,
    d: usize,
    separation: f64,
    noise_std: f64,
    seed: u64,
) -> Result<PointCloud> {
    if k < 1 || d < 1 || n < 2 * k {
        return Err(invalid(format!("blobs need k >= 1, d >= 1, n >= 2k (n={n}, k={k}, d={d})")));
    }
    if !(separation >= 0.0 && noise_std >= 0.0 && separation.is_finite() && noise_std.is_finite()) {
        return Err(invalid("separation and noise_std must be finite and nonnegative"));
    }
    let mut rng = seeded(seed);
    let centers: Vec<Array1<f64>> = if k == 1 {
        vec![Array1::zeros(d)]
    } else {
        random_directions(&mut rng, k, d)
            .into_iter()
            .map(|u| u * separation)
            .collect()
    };
    let sizes = balanced_sizes(n, k);
    let mut points = Array2::zeros((n, d));
    let mut row = 0;
    for (center, &size) in centers.iter().zip(&sizes) {
        for _ in 0..size {
            for j in 0..d {
                let z: f64 = rng.sample(StandardNormal);
                points[[row, j]] = center[j] + noise_std * z;
            }
            row += 1;
        }
    }
    labelled(points, &sizes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldDist {
    /// `U[−1, 1]` per intrinsic coordinate.
    Uniform,
    /// `N(0, 1)` per intrinsic coordinate.
    Gaussian,
}

impl ManifoldDist {
    /// Standard deviation of one intrinsic coordinate.
    pub fn coordinate_std(self) -> f64 {
        match self {
            ManifoldDist::Uniform => 1.0 / 3f64.sqrt(),
            ManifoldDist::Gaussian => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ManifoldSpec {
    pub n: usize,
    pub intrinsic_dim: usize,
    pub ambient_dim: usize,
    pub dist: ManifoldDist,
    /// Noise standard deviation as a fraction of the intrinsic coordinate std.
    pub noise_level: f64,
    /// Embed through a random rotation of the ambient space (otherwise the
    /// signal occupies the first `intrinsic_dim` axes).
    pub rotate: bool,
}

/// A `d`-dimensional uniform or Gaussian sample embedded in `ℝ^D`.
///
/// The sample fills the first `d` coordinates, is zero-padded to `D`, mapped
/// through a random rotation of `ℝ^D` (only its first `d` columns are ever
/// needed, so the embedding costs `O(n·d·D)`), and then every ambient
/// coordinate receives Gaussian noise of standard deviation
/// `noise_level · coordinate_std`.
pub fn gen_manifold(spec: &ManifoldSpec, seed: u64) -> Result<PointCloud> {
    let ManifoldSpec {
        n,
        intrinsic_dim: d,
        ambient_dim: big_d,
        dist,
        noise_level,
        rotate,
    } = *spec;
    if n < 1 || d < 1 || d > big_d {
        return Err(invalid(format!(
            "manifold needs n >= 1 and 1 <= d <= D (n={n}, d={d}, D={big_d})"
        )));
    }
    if !(0.0..1.0).contains(&noise_level) {
        return Err(invalid(format!("noise_level must lie in [0, 1), got {noise_level}")));
    }
    let mut rng = seeded(seed);
    let latent = match dist {
        ManifoldDist::Uniform => {
            let u = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
            Array2::from_shape_fn((n, d), |_| u.sample(&mut rng))
        }
        ManifoldDist::Gaussian => Array2::from_shape_fn((n, d), |_| rng.sample(StandardNormal)),
    };
    let mut points = if rotate {
        let frame = random_directions(&mut rng, d, big_d);
        let mut basis = Array2::zeros((d, big_d));
        for (i, q) in frame.iter().enumerate() {
            basis.row_mut(i).assign(q);
        }
        latent.dot(&basis)
    } else {
        let mut padded = Array2::zeros((n, big_d));
        padded.slice_mut(ndarray::s![.., ..d]).assign(&latent);
        padded
    };
    if noise_level > 0.0 {
        let std = noise_level * dist.coordinate_std();
        points.mapv_inplace(|v| v + std * rng.sample::<f64, _>(StandardNormal));
    }
    PointCloud::new(points)
}

/// A star-shaped tree: `k` unit-length straight branches leaving the origin
/// in random directions (orthonormal when `k ≤ d`), `n/k` (±1) points per
/// branch placed uniformly along it, plus isotropic Gaussian noise. Rows are
/// grouped by branch; labels are branch ids.
pub fn gen_tree(n: usize, k: usize, d: usize, noise_std: f64, seed: u64) -> Result<PointCloud> {
    if k < 2 || d < 3 || n < 10 * k {
        return Err(invalid(format!("tree needs k >= 2, d >= 3, n >= 10k (n={n}, k={k}, d={d})")));
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(invalid("noise_std must be finite and nonnegative"));
    }
    let mut rng = seeded(seed);
    let dirs = random_directions(&mut rng, k, d);
    let sizes = balanced_sizes(n, k);
    let unit = Uniform::new_inclusive(0.0, 1.0).expect("valid range");
    let mut points = Array2::zeros((n, d));
    let mut row = 0;
    for (dir, &size) in dirs.iter().zip(&sizes) {
        for _ in 0..size {
            let s: f64 = unit.sample(&mut rng);
            for j in 0..d {
                let z: f64 = if noise_std > 0.0 { rng.sample(StandardNormal) } else { 0.0 };
                points[[row, j]] = s * dir[j] + noise_std * z;
            }
            row += 1;
        }
    }
    labelled(points, &sizes)
}

/// Replaces a uniformly chosen `round(p·n)` subset of positions with labels
/// drawn uniformly from `0..num_classes`. A replacement may coincide with the
/// original label, so the expected changed fraction is `p·(1 − 1/C)`.
pub fn corrupt_labels(labels: &[usize], p: f64, num_classes: usize, seed: u64) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("corruption fraction must lie in [0, 1], got {p}")));
    }
    if num_classes < 1 {
        return Err(invalid("num_classes must be positive"));
    }
    let mut out = labels.to_vec();
    let count = (p * labels.len() as f64).round() as usize;
    if count == 0 {
        return Ok(out);
    }
    let mut rng = seeded(seed);
    for pos in index::sample(&mut rng, labels.len(), count) {
        out[pos] = rng.random_range(0..num_classes);
    }
    Ok(out)
}

/// `(1 − w)·S + w·I` for a random symmetric positive definite `S = QΛQᵀ`
/// whose eigenvalues are uniform on `(0, 1]` and rescaled to a maximum of 1.
pub fn gen_psd_identity_mix(n: usize, w: f64, seed: u64) -> Result<Array2<f64>> {
    if n < 1 {
        return Err(invalid("matrix size must be positive"));
    }
    if !(0.0..=1.0).contains(&w) {
        return Err(invalid(format!("weight must lie in [0, 1], got {w}")));
    }
    let mut rng = seeded(seed);
    let mut eig: Vec<f64> = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
    let top = eig.iter().copied().fold(0.0, f64::max);
    eig.iter_mut().for_each(|v| *v /= top);
    let q = random_directions(&mut rng, n, n);
    let mut s = Array2::<f64>::zeros((n, n));
    for (lambda, col) in eig.iter().zip(&q) {
        for i in 0..n {
            let a = lambda * col[i];
            for j in 0..n {
                s[[i, j]] += a * col[j];
            }
        }
    }
    // Symmetrize away rounding differences between s[i,j] and s[j,i].
    let mut m = Array2::<f64>::eye(n) * w;
    for i in 0..n {
        for j in 0..n {
            m[[i, j]] += (1.0 - w) * 0.5 * (s[[i, j]] + s[[j, i]]);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_sizes_differ_by_at_most_one() {
        assert_eq!(balanced_sizes(10, 3), vec![4, 3, 3]);
        assert_eq!(balanced_sizes(9, 3), vec![3, 3, 3]);
    }

    #[test]
    fn single_blob_all_label_zero() {
        let c = gen_blobs(20, 1, 4, 10.0, 1.0, 3).unwrap();
        assert_eq!(c.n(), 20);
        assert!(c.labels().unwrap().iter().all(|&l| l == 0));
    }

    #[test]
    fn blob_params_validated() {
        assert!(gen_blobs(5, 3, 2, 1.0, 1.0, 0).is_err());
        assert!(gen_blobs(10, 0, 2, 1.0, 1.0, 0).is_err());
        assert!(gen_blobs(10, 2, 2, f64::NAN, 1.0, 0).is_err());
    }

    #[test]
    fn uniform_manifold_without_rotation_stays_in_cube() {
        let spec = ManifoldSpec {
            n: 200,
            intrinsic_dim: 5,
            ambient_dim: 5,
            dist: ManifoldDist::Uniform,
            noise_level: 0.0,
            rotate: false,
        };
        let c = gen_manifold(&spec, 1).unwrap();
        assert!(c.points().iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn rotation_preserves_pairwise_geometry() {
        let base = ManifoldSpec {
            n: 30,
            intrinsic_dim: 3,
            ambient_dim: 40,
            dist: ManifoldDist::Gaussian,
            noise_level: 0.0,
            rotate: false,
        };
        let flat = gen_manifold(&base, 9).unwrap();
        let rotated = gen_manifold(&ManifoldSpec { rotate: true, ..base }, 9).unwrap();
        let a = crate::kernel::pairwise_sq_dists(flat.points()).unwrap();
        let b = crate::kernel::pairwise_sq_dists(rotated.points()).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-10 * (1.0 + x));
        }
    }

    #[test]
    fn manifold_params_validated() {
        let bad = ManifoldSpec {
            n: 10,
            intrinsic_dim: 5,
            ambient_dim: 4,
            dist: ManifoldDist::Uniform,
            noise_level: 0.0,
            rotate: true,
        };
        assert!(gen_manifold(&bad, 0).is_err());
        let noisy = ManifoldSpec {
            ambient_dim: 5,
            noise_level: 1.0,
            ..bad
        };
        assert!(gen_manifold(&noisy, 0).is_err());
    }

    #[test]
    fn noiseless_two_branch_tree_lies_on_rays() {
        let c = gen_tree(40, 2, 5, 0.0, 4).unwrap();
        for rows in c.class_indices() {
            // Every point is a nonnegative multiple of the branch direction.
            let pts = c.points();
            let far = rows
                .iter()
                .copied()
                .max_by(|&a, &b| pts.row(a).dot(&pts.row(a)).total_cmp(&pts.row(b).dot(&pts.row(b))))
                .unwrap();
            let dir = pts.row(far).to_owned() / pts.row(far).dot(&pts.row(far)).sqrt();
            for &r in &rows {
                let p = pts.row(r);
                let s = p.dot(&dir);
                assert!(s >= 0.0);
                let residual = &p - &(&dir * s);
                assert!(residual.dot(&residual).sqrt() < 1e-12);
            }
        }
    }

    #[test]
    fn tree_params_validated() {
        assert!(gen_tree(100, 1, 5, 0.1, 0).is_err());
        assert!(gen_tree(100, 2, 2, 0.1, 0).is_err());
        assert!(gen_tree(19, 2, 5, 0.1, 0).is_err());
    }

    #[test]
    fn zero_corruption_is_identity() {
        let labels: Vec<usize> = (0..50).map(|i| i % 4).collect();
        assert_eq!(corrupt_labels(&labels, 0.0, 4, 11).unwrap(), labels);
        assert!(corrupt_labels(&labels, 1.5, 4, 11).is_err());
    }

    #[test]
    fn psd_mix_endpoints() {
        let m = gen_psd_identity_mix(6, 1.0, 2).unwrap();
        assert_eq!(m, Array2::eye(6));
        assert!(gen_psd_identity_mix(6, -0.1, 2).is_err());
    }
}
