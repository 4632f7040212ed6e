//! Entropy-of-spectrum properties: monotonicity in `t`, scale invariance,
//! block additivity, the two-level bound and the Gaussian bound's golden
//! value.

use diffspec::kernel::{build_kernel, KernelConfig};
use diffspec::spectrum::{
    dse, dse_of_cloud, dse_upper_bound, eigenvalues_symmetric, gaussian_beta, spectral_entropy,
    two_level_entropy, Spectrum,
};
use diffspec::{Error, PointCloud};
use ndarray::{s, Array2};
use proptest::prelude::*;

fn cloud_strategy(max_n: usize) -> impl Strategy<Value = PointCloud> {
    (3usize..max_n, 1usize..5).prop_flat_map(|(n, d)| {
        proptest::collection::vec(-3.0..3.0f64, n * d)
            .prop_map(move |v| PointCloud::new(Array2::from_shape_vec((n, d), v).unwrap()).unwrap())
    })
}

fn spectrum_strategy() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0..1.0f64, 1..40).prop_map(|mut v| {
        v.insert(0, 1.0);
        v
    })
}

fn block_diagonal(block: &Array2<f64>, copies: usize) -> Array2<f64> {
    let m = block.nrows();
    let mut out = Array2::zeros((m * copies, m * copies));
    for c in 0..copies {
        out.slice_mut(s![c * m..(c + 1) * m, c * m..(c + 1) * m]).assign(block);
    }
    out
}

#[test]
fn golden_gaussian_bound() {
    // n = 100, d = 10, σ = 4 gives β = 2^-5; reference from 50-digit arithmetic.
    assert_eq!(gaussian_beta(10, 4.0), 0.03125);
    let bound = dse_upper_bound(100, 10, 4.0).unwrap();
    assert!((bound - 6.604_541_536_718_873).abs() < 1e-12, "{bound}");
}

#[test]
fn bound_stays_below_log_n_and_grows_with_d() {
    let mut prev = 0.0;
    for d in [1, 2, 5, 10, 50, 200] {
        let b = dse_upper_bound(500, d, d as f64).unwrap();
        assert!(b <= 500f64.log2() + 1e-12);
        assert!(b > prev);
        prev = b;
    }
    assert!(dse_upper_bound(1, 2, 1.0).is_err());
    assert!(dse_upper_bound(10, 2, 0.0).is_err());
}

#[test]
fn identity_and_rank_one_examples() {
    let eye = Array2::<f64>::eye(4);
    let s = eigenvalues_symmetric(&eye).unwrap();
    assert!((dse(&s, 1.0).unwrap().value - 2.0).abs() < 1e-12);
    let ones = Array2::from_elem((5, 5), 0.2);
    let s = eigenvalues_symmetric(&ones).unwrap();
    assert!(dse(&s, 1.0).unwrap().value.abs() < 1e-9);
}

#[test]
fn large_t_counts_the_top_multiplicity() {
    let v = spectral_entropy(&[1.0, 1.0, 0.5, 0.2], 1e4).unwrap();
    assert!((v - 1.0).abs() < 1e-12);
    let v = spectral_entropy(&[1.0, 0.999, 0.3], 1e6).unwrap();
    assert!(v.abs() < 1e-12);
}

#[test]
fn negative_eigenvalue_handling() {
    let s = Spectrum::from_eigenvalues(vec![1.0, -5e-9, 0.5]).unwrap();
    assert_eq!(s.clamped_count(), 1);
    assert!(s.eigenvalues().iter().all(|&v| v >= 0.0));
    let err = Spectrum::from_eigenvalues(vec![1.0, -1e-6]).unwrap_err();
    assert!(matches!(err, Error::NumericalFailure(_)), "{err:?}");
}

#[test]
fn invalid_t_rejected() {
    for t in [0.0, -1.0, f64::NAN, f64::INFINITY] {
        assert!(spectral_entropy(&[1.0, 0.5], t).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn entropy_nonincreasing_in_t(values in spectrum_strategy()) {
        let grid = [0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 49.0, 51.0, 100.0, 1000.0];
        let mut prev = f64::INFINITY;
        for t in grid {
            let h = spectral_entropy(&values, t).unwrap();
            prop_assert!(h <= prev + 1e-12, "t={t}: {h} > {prev}");
            prop_assert!(h >= 0.0 && h <= (values.len() as f64).log2() + 1e-12);
            prev = h;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rescaling_cloud_and_bandwidth_together_is_invisible(
        cloud in cloud_strategy(25),
        scale in 0.01..100.0f64,
        sigma in 0.5..10.0f64,
        t in 0.5..20.0f64,
    ) {
        let scaled = PointCloud::new(cloud.points().mapv(|x| x * scale)).unwrap();
        let a = dse_of_cloud(&cloud, &KernelConfig::fixed(sigma), t).unwrap().value;
        let b = dse_of_cloud(&scaled, &KernelConfig::fixed(sigma * scale * scale), t).unwrap().value;
        prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        let a = dse_of_cloud(&cloud, &KernelConfig::default(), t).unwrap().value;
        let b = dse_of_cloud(&scaled, &KernelConfig::default(), t).unwrap().value;
        prop_assert!((a - b).abs() < 1e-10, "median: {a} vs {b}");
    }

    #[test]
    fn two_level_relaxation_bounds_t1(cloud in cloud_strategy(30), sigma in 0.1..20.0f64) {
        let k = build_kernel(&cloud, &KernelConfig::fixed(sigma)).unwrap();
        let s = eigenvalues_symmetric(&k.symmetric).unwrap();
        let ev = s.eigenvalues();
        let h = dse(&s, 1.0).unwrap().value;
        prop_assert!(two_level_entropy(ev.len(), ev[0], ev[1]) >= h - 1e-12);
    }

    #[test]
    fn equal_blocks_add_log_k(cloud in cloud_strategy(15), copies in 2usize..5, t in 0.5..30.0f64) {
        let k = build_kernel(&cloud, &KernelConfig::default()).unwrap();
        let single = dse(&eigenvalues_symmetric(&k.symmetric).unwrap(), t).unwrap().value;
        let joined = block_diagonal(&k.symmetric, copies);
        let many = dse(&eigenvalues_symmetric(&joined).unwrap(), t).unwrap().value;
        prop_assert!((many - single - (copies as f64).log2()).abs() < 1e-9, "{many} vs {single}");
    }

    #[test]
    fn dse_value_is_in_range(cloud in cloud_strategy(30), t in 0.1..200.0f64) {
        let r = dse_of_cloud(&cloud, &KernelConfig::default(), t).unwrap();
        prop_assert!(r.value >= 0.0);
        prop_assert!(r.value <= (cloud.n() as f64).log2() + 1e-9);
        prop_assert_eq!(r.n, cloud.n());
    }
}
