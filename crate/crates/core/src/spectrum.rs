//! Eigenvalues of the diffusion operator and diffusion spectral entropy.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::{Mat, Par};
use ndarray::Array2;
use serde::Serialize;

use crate::cloud::PointCloud;
use crate::error::{invalid, Error, Result};
use crate::kernel::{build_kernel, KernelConfig};

/// Eigenvalues in `[−NEG_CLAMP, 0)` are roundoff and are clamped to zero;
/// anything more negative means the kernel was not positive semidefinite.
pub const NEG_CLAMP: f64 = 1e-8;

const SYMMETRY_TOL: f64 = 1e-10;

/// Powered eigenvalues are computed in log space beyond this diffusion time.
const LOG_SPACE_T: f64 = 50.0;

/// Powered (relative) weights below this are treated as exact zeros.
const POWER_FLOOR: f64 = 1e-300;

/// Descending eigenvalues of a diffusion operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    clamped_count: usize,
}

impl Spectrum {
    /// Validates and sorts raw eigenvalues: negatives down to `−1e-8` are
    /// clamped to zero and counted, values outside `[−1e-8, 1 + 1e-8]` are
    /// rejected.
    pub fn from_eigenvalues(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("empty spectrum"));
        }
        let mut clamped_count = 0;
        for v in values.iter_mut() {
            if !v.is_finite() {
                return Err(Error::NumericalFailure(format!("non-finite eigenvalue {v}")));
            }
            if *v < -NEG_CLAMP {
                return Err(Error::NumericalFailure(format!(
                    "eigenvalue {v} below -{NEG_CLAMP}: kernel is not positive semidefinite"
                )));
            }
            if *v > 1.0 + NEG_CLAMP {
                return Err(Error::NumericalFailure(format!(
                    "eigenvalue {v} exceeds 1: not a diffusion spectrum"
                )));
            }
            if *v < 0.0 {
                *v = 0.0;
                clamped_count += 1;
            }
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self {
            eigenvalues: values,
            clamped_count,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn clamped_count(&self) -> usize {
        self.clamped_count
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMethod {
    /// Diffusion spectral entropy.
    Dse,
    /// Classic Shannon entropy by binning.
    Cse,
    /// Shannon entropy of the entries of `P`.
    Dmee,
    /// Spectral entropy of the binary k-NN adjacency.
    KnnSpectral,
    /// Spectral entropy of the Gaussian affinity `G`.
    GaussianSpectral,
}

/// An entropy value in bits with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub method: EntropyMethod,
    pub value: f64,
    /// Diffusion time; `None` for binning estimators.
    pub t: Option<f64>,
    /// Resolved bandwidth; `None` when no kernel was built.
    pub sigma: Option<f64>,
    pub n: usize,
}

fn to_faer(a: &Array2<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

fn check_symmetric(a: &Array2<f64>) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n || n == 0 {
        return Err(invalid(format!("expected a non-empty square matrix, got {:?}", a.dim())));
    }
    for i in 0..n {
        for j in i + 1..n {
            if (a[[i, j]] - a[[j, i]]).abs() > SYMMETRY_TOL {
                return Err(invalid(format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// All eigenvalues of a real symmetric matrix, ascending. Values only, single
/// threaded so the result does not depend on the thread pool.
pub fn symmetric_eigenvalues_raw(a: &Array2<f64>) -> Result<Vec<f64>> {
    check_symmetric(a)?;
    let n = a.nrows();
    let m = to_faer(a);
    let mut s = faer::diag::Diag::<f64>::zeros(n);
    let par = Par::Seq;
    let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<f64>(
        n,
        ComputeEigenvectors::No,
        par,
        Default::default(),
    ));
    evd::self_adjoint_evd(
        m.as_ref(),
        s.as_mut(),
        None,
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|e| Error::NumericalFailure(format!("eigensolver did not converge: {e:?}")))?;
    Ok(s.column_vector().iter().copied().collect())
}

/// Eigenpairs of a real symmetric matrix, eigenvalues descending; column `i`
/// of the returned matrix is the eigenvector of eigenvalue `i`.
pub fn symmetric_eigen(a: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    check_symmetric(a)?;
    let n = a.nrows();
    let m = to_faer(a);
    let mut s = faer::diag::Diag::<f64>::zeros(n);
    let mut u = Mat::<f64>::zeros(n, n);
    let par = Par::Seq;
    let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<f64>(
        n,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    ));
    evd::self_adjoint_evd(
        m.as_ref(),
        s.as_mut(),
        Some(u.as_mut()),
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|e| Error::NumericalFailure(format!("eigensolver did not converge: {e:?}")))?;
    // faer returns ascending order; flip.
    let values: Vec<f64> = s.column_vector().iter().rev().copied().collect();
    let vectors = Array2::from_shape_fn((n, n), |(i, j)| u[(i, n - 1 - j)]);
    Ok((values, vectors))
}

/// The spectrum of a symmetric diffusion conjugate (or any symmetric matrix
/// whose eigenvalues lie in `[0, 1]`).
pub fn eigenvalues_symmetric(a: &Array2<f64>) -> Result<Spectrum> {
    Spectrum::from_eigenvalues(symmetric_eigenvalues_raw(a)?)
}

/// Shannon entropy (bits) of `|λ_i|^t` normalized to a distribution, with
/// `0 · log 0 = 0`. Works on arbitrary real spectra; diffusion spectra are
/// nonnegative so the absolute value is a no-op there.
pub fn spectral_entropy(values: &[f64], t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("diffusion time must be positive, got {t}")));
    }
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let top = abs.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Err(Error::NumericalFailure("all eigenvalues are zero".into()));
    }
    let weights: Vec<f64> = if t > LOG_SPACE_T {
        let log_top = top.ln();
        abs.iter()
            .map(|&v| {
                if v == 0.0 {
                    0.0
                } else {
                    (t * (v.ln() - log_top)).exp()
                }
            })
            .collect()
    } else {
        abs.iter().map(|&v| v.powf(t)).collect()
    };
    let weights: Vec<f64> = weights
        .into_iter()
        .map(|w| if w < POWER_FLOOR { 0.0 } else { w })
        .collect();
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Err(Error::NumericalFailure("all powered eigenvalues vanished".into()));
    }
    Ok(weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0))
}

/// Diffusion spectral entropy of a spectrum at diffusion time `t`.
pub fn dse(spectrum: &Spectrum, t: f64) -> Result<EntropyReport> {
    Ok(EntropyReport {
        method: EntropyMethod::Dse,
        value: spectral_entropy(spectrum.eigenvalues(), t)?,
        t: Some(t),
        sigma: None,
        n: spectrum.len(),
    })
}

/// Builds the kernel, extracts the spectrum and evaluates DSE.
pub fn dse_of_cloud(cloud: &PointCloud, config: &KernelConfig, t: f64) -> Result<EntropyReport> {
    let (report, _) = dse_with_spectrum(cloud, config, t)?;
    Ok(report)
}

/// As [`dse_of_cloud`], also returning the spectrum.
pub fn dse_with_spectrum(
    cloud: &PointCloud,
    config: &KernelConfig,
    t: f64,
) -> Result<(EntropyReport, Spectrum)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("diffusion time must be positive, got {t}")));
    }
    let kernel = build_kernel(cloud, config)?;
    let spectrum = eigenvalues_symmetric(&kernel.symmetric)?;
    let mut report = dse(&spectrum, t)?;
    report.sigma = Some(kernel.sigma);
    Ok((report, spectrum))
}

/// Entropy (bits) of the spectrum made of one eigenvalue `top` and `n − 1`
/// copies of `second`: the two-level relaxation in which every eigenvalue
/// below the second is raised to it. It bounds the `t = 1` DSE of any
/// spectrum with those two leading eigenvalues from above.
pub fn two_level_entropy(n: usize, top: f64, second: f64) -> f64 {
    assert!(n >= 1 && top > 0.0 && second >= 0.0);
    let total = top + (n - 1) as f64 * second;
    let h = |w: f64| {
        if w == 0.0 {
            0.0
        } else {
            let p = w / total;
            -p * p.log2()
        }
    };
    h(top) + (n - 1) as f64 * h(second)
}

/// The kernel-moment constant `β = (1 + 4/σ)^{−d/2}` for i.i.d. standard
/// Gaussian data.
pub fn gaussian_beta(d: usize, sigma: f64) -> f64 {
    (1.0 + 4.0 / sigma).powf(-(d as f64) / 2.0)
}

/// Approximate upper bound on the expected `t = 1` DSE of `n` i.i.d.
/// standard Gaussian points in `ℝ^d` at bandwidth σ:
///
/// ```text
/// log₂(n / (1−β)) − (1/n + (n−1)β/n) · log₂(1 + βn / (1−β))
/// ```
pub fn dse_upper_bound(n: usize, d: usize, sigma: f64) -> Result<f64> {
    if n < 2 || d < 1 {
        return Err(invalid(format!("bound needs n >= 2 and d >= 1, got n={n}, d={d}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    let beta = gaussian_beta(d, sigma);
    assert!(beta < 1.0, "beta must be below 1 for sigma > 0 and d >= 1");
    let nf = n as f64;
    Ok((nf / (1.0 - beta)).log2()
        - (1.0 / nf + (nf - 1.0) / nf * beta) * (1.0 + beta * nf / (1.0 - beta)).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identity_spectrum() {
        let s = eigenvalues_symmetric(&Array2::eye(4)).unwrap();
        assert_eq!(s.len(), 4);
        for v in s.eigenvalues() {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn two_point_spectrum() {
        let e = (-1.0f64).exp();
        let r = 1.0 + e;
        let a = array![[1.0 / r, e / r], [e / r, 1.0 / r]];
        let s = eigenvalues_symmetric(&a).unwrap();
        assert!((s.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - (1.0 - e) / (1.0 + e)).abs() < 1e-14);
    }

    #[test]
    fn negative_eigenvalues_clamped_or_rejected() {
        let s = Spectrum::from_eigenvalues(vec![1.0, -5e-9, 0.5]).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0, 0.5, 0.0]);
        assert_eq!(s.clamped_count(), 1);
        assert!(matches!(
            Spectrum::from_eigenvalues(vec![1.0, -1e-6]),
            Err(Error::NumericalFailure(_))
        ));
        assert!(matches!(
            eigenvalues_symmetric(&array![[0.0, 1.0], [1.0, 0.0]]),
            Err(Error::NumericalFailure(_))
        ));
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(matches!(
            eigenvalues_symmetric(&array![[1.0, 0.1], [0.0, 1.0]]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn symmetric_eigen_reconstructs() {
        let a = array![[2.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]];
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        for (k, &lambda) in vals.iter().enumerate() {
            let v = vecs.column(k);
            let av = a.dot(&v);
            for i in 0..3 {
                assert!((av[i] - lambda * v[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn separated_cluster_spectrum_entropy() {
        for t in [1.0, 7.5, 100.0, 1e4] {
            let s = Spectrum::from_eigenvalues(vec![1.0, 1.0, 1.0]).unwrap();
            let r = dse(&s, t).unwrap();
            assert!((r.value - 3f64.log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn single_mode_has_zero_entropy() {
        let s = Spectrum::from_eigenvalues(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(dse(&s, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn flat_spectrum_reaches_log_n() {
        let s = Spectrum::from_eigenvalues(vec![1.0; 500]).unwrap();
        let v = dse(&s, 3.0).unwrap().value;
        assert!((v - 500f64.log2()).abs() < 1e-9);
        assert!((500f64.log2() - 8.966).abs() < 5e-4);
    }

    #[test]
    fn log_space_agrees_with_direct_powering() {
        let vals = [1.0, 0.99, 0.98, 0.9, 0.5, 0.0];
        // Same spectrum evaluated just below and above the switch.
        let below = spectral_entropy(&vals, LOG_SPACE_T).unwrap();
        let above = spectral_entropy(&vals, LOG_SPACE_T + 1e-9).unwrap();
        assert!((below - above).abs() < 1e-9);
        // Large t collapses onto the top eigenvalue without underflow noise.
        assert!(spectral_entropy(&vals, 1e6).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_bad_t() {
        let s = Spectrum::from_eigenvalues(vec![1.0]).unwrap();
        assert!(dse(&s, 0.0).is_err());
        assert!(dse(&s, -1.0).is_err());
        assert!(dse(&s, f64::NAN).is_err());
    }

    #[test]
    fn bound_large_dimension_tends_to_log_n() {
        let b = dse_upper_bound(100, 100_000, 4.0).unwrap();
        assert!((b - 100f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn bound_two_points_direct_substitution() {
        let (d, sigma) = (3, 2.0);
        let beta = gaussian_beta(d, sigma);
        let expected = (2.0 / (1.0 - beta)).log2()
            - 0.5 * (1.0 + beta) * (1.0 + 2.0 * beta / (1.0 - beta)).log2();
        assert!((dse_upper_bound(2, d, sigma).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn bound_equals_two_level_entropy_of_expected_spectrum() {
        // Second route: the expected kernel has eigenvalues 1 and
        // (1−β)/(1+(n−1)β) with multiplicity n−1.
        for (n, d, sigma) in [(2, 1, 1.0), (100, 10, 4.0), (200, 50, 50.0), (37, 3, 0.5)] {
            let beta = gaussian_beta(d, sigma);
            let second = (1.0 - beta) / (1.0 + (n as f64 - 1.0) * beta);
            let via_spectrum = two_level_entropy(n, 1.0, second);
            let closed = dse_upper_bound(n, d, sigma).unwrap();
            assert!((via_spectrum - closed).abs() < 1e-12, "{n} {d} {sigma}");
        }
    }

    #[test]
    fn bound_rejects_bad_args() {
        assert!(dse_upper_bound(1, 3, 1.0).is_err());
        assert!(dse_upper_bound(3, 0, 1.0).is_err());
        assert!(dse_upper_bound(3, 3, 0.0).is_err());
    }
}
