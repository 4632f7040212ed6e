//! Gaussian affinity, anisotropic kernel and the symmetric diffusion conjugate.
//!
//! ```text
//! G_ij = exp(−‖x_i − x_j‖² / σ)                 (self-affinity G_ii = 1 included)
//! K_ij = G_ij / (r_i r_j)^α,   r_i = Σ_j G_ij
//! P    = D⁻¹ K,                 D_ii = Σ_j K_ij  (row-stochastic diffusion operator)
//! A    = D^{-1/2} K D^{-1/2}                     (symmetric, similar to P)
//! ```
//!
//! `A` and `P` share their eigenvalues, so the spectrum of the diffusion
//! operator is read off a real symmetric matrix without forming `P`.
//!
//! Every fill is computed row by row with a fixed summation order, so results
//! do not depend on the number of rayon worker threads.

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rayon::prelude::*;
use serde::Serialize;

use crate::cloud::PointCloud;
use crate::error::{invalid, Error, Result};

/// Default cap on the number of points handled by the dense kernel.
pub const DEFAULT_MAX_POINTS: usize = 10_000;

/// The anisotropy exponent used for every DSE/DSMI computation.
pub const STANDARD_ALPHA: f64 = 0.5;

/// How the Gaussian bandwidth σ is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// Median of the off-diagonal squared pairwise distances.
    MedianHeuristic,
    /// An explicit σ > 0 (in squared-distance units).
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelConfig {
    pub bandwidth: Bandwidth,
    /// Anisotropy α ∈ [0, 1]. Anything other than ½ is non-standard.
    pub alpha: f64,
    pub max_points: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            bandwidth: Bandwidth::MedianHeuristic,
            alpha: STANDARD_ALPHA,
            max_points: DEFAULT_MAX_POINTS,
        }
    }
}

impl KernelConfig {
    /// Standard configuration with an explicit bandwidth.
    pub fn fixed(sigma: f64) -> Self {
        Self {
            bandwidth: Bandwidth::Fixed(sigma),
            ..Self::default()
        }
    }

    pub fn is_standard(&self) -> bool {
        self.alpha == STANDARD_ALPHA
    }

    fn validate(&self) -> Result<()> {
        if let Bandwidth::Fixed(s) = self.bandwidth {
            if !(s > 0.0 && s.is_finite()) {
                return Err(invalid(format!("sigma must be a positive finite number, got {s}")));
            }
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(invalid(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        Ok(())
    }
}

/// All matrices produced by [`build_kernel`].
#[derive(Debug, Clone)]
pub struct KernelMatrices {
    /// Gaussian affinity `G`.
    pub gaussian: Array2<f64>,
    /// Anisotropic kernel `K`.
    pub anisotropic: Array2<f64>,
    /// Row sums of `K`.
    pub degree: Array1<f64>,
    /// Symmetric conjugate `A = D^{-1/2} K D^{-1/2}`.
    pub symmetric: Array2<f64>,
    /// The bandwidth actually used.
    pub sigma: f64,
}

impl KernelMatrices {
    /// The row-stochastic diffusion operator `P = D⁻¹ K`.
    pub fn transition(&self) -> Array2<f64> {
        let mut p = self.anisotropic.clone();
        Zip::from(p.rows_mut())
            .and(&self.degree)
            .for_each(|mut row, &d| row /= d);
        p
    }
}

/// Sum of squared differences with four fixed-order partial sums.
#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let (tail_a, tail_b) = (chunks_a.remainder(), chunks_b.remainder());
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for l in 0..4 {
            let d = ca[l] - cb[l];
            acc[l] += d * d;
        }
    }
    let mut tail = 0.0;
    for (x, y) in tail_a.iter().zip(tail_b) {
        let d = x - y;
        tail += d * d;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Squared Euclidean distances between all rows of `points`.
pub fn pairwise_sq_dists(points: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    if let Some(v) = points.iter().find(|v| !v.is_finite()) {
        return Err(invalid(format!("non-finite coordinate {v}")));
    }
    let n = points.nrows();
    // Row-major contiguous copy so each row is a slice.
    let rows: Vec<Vec<f64>> = points.outer_iter().map(|r| r.to_vec()).collect();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| sq_dist(&rows[i], &rows[j]).max(0.0))
                .collect()
        })
        .collect();
    let mut out = Array2::zeros((n, n));
    for (i, row) in upper.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let j = i + 1 + off;
            out[[i, j]] = v;
            out[[j, i]] = v;
        }
    }
    Ok(out)
}

/// Median of the `n(n−1)/2` off-diagonal squared distances.
///
/// An even count takes the mean of the two middle values. When the median is
/// zero (mostly duplicated points) the smallest positive distance is used.
pub fn median_heuristic_sigma(sq_dists: &Array2<f64>) -> Result<f64> {
    let n = sq_dists.nrows();
    if n < 2 || sq_dists.ncols() != n {
        return Err(invalid(format!(
            "median heuristic needs a square matrix with n >= 2, got {}x{}",
            n,
            sq_dists.ncols()
        )));
    }
    let mut values: Vec<f64> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            values.push(sq_dists[[i, j]]);
        }
    }
    let m = values.len();
    let median = if m % 2 == 1 {
        *values.select_nth_unstable_by(m / 2, f64::total_cmp).1
    } else {
        let (lower, hi, _) = values.select_nth_unstable_by(m / 2, f64::total_cmp);
        let hi = *hi;
        let lo = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lo + hi)
    };
    if median > 0.0 {
        return Ok(median);
    }
    values
        .iter()
        .copied()
        .filter(|&v| v > 0.0)
        .min_by(f64::total_cmp)
        .ok_or_else(|| Error::DegenerateData("all points are identical".into()))
}

/// Resolves the configured bandwidth for a given distance matrix. A single
/// point has no pairwise distances; its kernel is `[[1]]` for any σ, so σ = 1
/// is reported.
pub fn resolve_sigma(sq_dists: &Array2<f64>, bandwidth: Bandwidth) -> Result<f64> {
    match bandwidth {
        Bandwidth::Fixed(s) => Ok(s),
        Bandwidth::MedianHeuristic if sq_dists.nrows() == 1 => Ok(1.0),
        Bandwidth::MedianHeuristic => median_heuristic_sigma(sq_dists),
    }
}

/// Builds `G`, `K`, the degree vector and `A` for a cloud.
pub fn build_kernel(cloud: &PointCloud, config: &KernelConfig) -> Result<KernelMatrices> {
    config.validate()?;
    if cloud.n() > config.max_points {
        return Err(invalid(format!(
            "{} points exceed the dense-kernel cap of {}",
            cloud.n(),
            config.max_points
        )));
    }
    let sq = pairwise_sq_dists(cloud.points())?;
    let sigma = resolve_sigma(&sq, config.bandwidth)?;
    kernel_from_sq_dists(sq, sigma, config.alpha)
}

/// Kernel construction from precomputed squared distances. Consumes the
/// distance matrix and reuses its storage for `G`.
pub fn kernel_from_sq_dists(sq_dists: Array2<f64>, sigma: f64, alpha: f64) -> Result<KernelMatrices> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid(format!("sigma must be a positive finite number, got {sigma}")));
    }
    let mut gaussian = sq_dists;
    gaussian
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .for_each(|mut row| row.mapv_inplace(|d| (-d / sigma).exp()));

    let scale: Array1<f64> = gaussian
        .rows()
        .into_iter()
        .map(|r| r.iter().sum::<f64>().powf(alpha))
        .collect();

    let mut anisotropic = gaussian.clone();
    anisotropic
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v /= scale[i] * scale[j];
            }
        });

    let degree: Array1<f64> = anisotropic.rows().into_iter().map(|r| r.iter().sum()).collect();
    // K_ii > 0 for every i, so every degree is positive.
    assert!(degree.iter().all(|&d| d > 0.0), "non-positive kernel degree");

    let root: Array1<f64> = degree.mapv(f64::sqrt);
    let mut symmetric = anisotropic.clone();
    symmetric
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v /= root[i] * root[j];
            }
        });

    Ok(KernelMatrices {
        gaussian,
        anisotropic,
        degree,
        symmetric,
        sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn cloud(points: Array2<f64>) -> PointCloud {
        PointCloud::new(points).unwrap()
    }

    #[test]
    fn one_dimensional_distance() {
        let d = pairwise_sq_dists(array![[0.0], [3.0]].view()).unwrap();
        assert_eq!(d, array![[0.0, 9.0], [9.0, 0.0]]);
        let single = pairwise_sq_dists(array![[1.0, 2.0]].view()).unwrap();
        assert_eq!(single, array![[0.0]]);
    }

    #[test]
    fn distances_reject_non_finite() {
        assert!(pairwise_sq_dists(array![[0.0], [f64::NAN]].view()).is_err());
    }

    #[test]
    fn median_examples() {
        assert_eq!(median_heuristic_sigma(&array![[0.0, 9.0], [9.0, 0.0]]).unwrap(), 9.0);
        let m = array![[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]];
        assert_eq!(median_heuristic_sigma(&m).unwrap(), 1.0);
    }

    #[test]
    fn median_errors_and_fallback() {
        assert!(matches!(
            median_heuristic_sigma(&array![[0.0]]),
            Err(Error::InvalidInput(_))
        ));
        let dup = pairwise_sq_dists(array![[1.0], [1.0], [1.0]].view()).unwrap();
        assert!(matches!(median_heuristic_sigma(&dup), Err(Error::DegenerateData(_))));
        // Four identical points and one outlier: median 0, smallest positive wins.
        let pts = array![[0.0], [0.0], [0.0], [0.0], [2.0]];
        let d = pairwise_sq_dists(pts.view()).unwrap();
        assert_eq!(median_heuristic_sigma(&d).unwrap(), 4.0);
    }

    #[test]
    fn single_point_kernel() {
        let k = build_kernel(&cloud(array![[3.0, -1.0]]), &KernelConfig::default()).unwrap();
        assert_eq!(k.gaussian, array![[1.0]]);
        assert_eq!(k.anisotropic, array![[1.0]]);
        assert_eq!(k.symmetric, array![[1.0]]);
    }

    #[test]
    fn two_points_closed_form() {
        // Distance sqrt(sigma): G_01 = e^-1, both rows sum to 1 + e^-1.
        let sigma: f64 = 2.5;
        let pts = array![[0.0, 0.0], [sigma.sqrt(), 0.0]];
        let k = build_kernel(&cloud(pts), &KernelConfig::fixed(sigma)).unwrap();
        let e = (-1.0f64).exp();
        let r = 1.0 + e;
        assert_eq!(k.gaussian[[0, 0]], 1.0);
        assert!((k.gaussian[[0, 1]] - e).abs() < 1e-15);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let g = if i == j { 1.0 } else { e };
            assert!((k.anisotropic[[i, j]] - g / r).abs() < 1e-15);
            // Degrees are exactly one, so A = K.
            assert!((k.symmetric[[i, j]] - g / r).abs() < 1e-15);
        }
        assert!((k.degree[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sigma_and_cap() {
        let c = cloud(array![[0.0], [1.0]]);
        assert!(build_kernel(&c, &KernelConfig::fixed(0.0)).is_err());
        assert!(build_kernel(&c, &KernelConfig::fixed(-1.0)).is_err());
        let capped = KernelConfig {
            max_points: 1,
            ..KernelConfig::default()
        };
        assert!(build_kernel(&c, &capped).is_err());
    }

    #[test]
    fn matrices_are_exactly_symmetric() {
        let pts = Array2::from_shape_fn((17, 4), |(i, j)| ((i * 31 + j * 7) % 13) as f64 * 0.37);
        let k = build_kernel(&cloud(pts), &KernelConfig::default()).unwrap();
        for m in [&k.gaussian, &k.anisotropic, &k.symmetric] {
            assert_eq!(m, &m.t());
        }
        assert!(k.gaussian.diag().iter().all(|&g| g == 1.0));
        assert!(k.gaussian.iter().all(|&g| g > 0.0 && g <= 1.0));
    }
}
