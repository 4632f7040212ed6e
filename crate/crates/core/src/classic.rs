//! Classic Shannon entropy and mutual information by per-dimension binning.
//!
//! Each feature is min-max normalized to `[0, 1]` over the whole cloud and cut
//! into `b` equal-width bins (`[0, 1/b)`, `[1/b, 2/b)`, …, with the top edge
//! closed so the maximum lands in the last bin). A point's bin tuple is its
//! *bucket*; the entropy is that of the empirical bucket distribution. There
//! are `b^D` buckets in principle, but only occupied ones are stored, so in
//! high dimension nearly every point gets its own bucket and the estimate
//! saturates at `log₂ n`.

use std::collections::HashMap;

use ndarray::ArrayView2;
use serde::Serialize;

use crate::cloud::PointCloud;
use crate::dsmi::{MIMethod, MIReport};
use crate::error::{invalid, Result};
use crate::spectrum::{EntropyMethod, EntropyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BinningConfig {
    pub bins_per_dim: usize,
}

impl Default for BinningConfig {
    fn default() -> Self {
        Self { bins_per_dim: 2 }
    }
}

impl BinningConfig {
    fn validate(&self) -> Result<()> {
        if self.bins_per_dim < 2 || self.bins_per_dim > u32::MAX as usize {
            return Err(invalid(format!(
                "bins_per_dim must be at least 2, got {}",
                self.bins_per_dim
            )));
        }
        Ok(())
    }
}

/// Per-column `(min, range)` over all rows.
fn ranges(points: ArrayView2<'_, f64>) -> Vec<(f64, f64)> {
    points
        .columns()
        .into_iter()
        .map(|col| {
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi - lo)
        })
        .collect()
}

/// The bucket (bin tuple) of every row, using the given normalization ranges.
fn buckets(points: ArrayView2<'_, f64>, ranges: &[(f64, f64)], bins: usize) -> Vec<Vec<u32>> {
    let top = (bins - 1) as u32;
    points
        .rows()
        .into_iter()
        .map(|row| {
            row.iter()
                .zip(ranges)
                .map(|(&v, &(lo, range))| {
                    if range <= 0.0 {
                        0
                    } else {
                        let u = (v - lo) / range;
                        ((u * bins as f64).floor().max(0.0) as u32).min(top)
                    }
                })
                .collect()
        })
        .collect()
}

/// Entropy in bits of the empirical distribution over the selected buckets.
fn bucket_entropy<'a>(selected: impl Iterator<Item = &'a Vec<u32>>) -> f64 {
    let mut counts: HashMap<&[u32], usize> = HashMap::new();
    let mut total = 0usize;
    for b in selected {
        *counts.entry(b.as_slice()).or_default() += 1;
        total += 1;
    }
    if counts.len() <= 1 {
        return 0.0;
    }
    // H = log₂ N − (1/N) Σ c log₂ c; summed in sorted order for determinism.
    let mut cs: Vec<usize> = counts.into_values().collect();
    cs.sort_unstable();
    let nf = total as f64;
    let weighted: f64 = cs.iter().map(|&c| c as f64 * (c as f64).log2()).sum();
    (nf.log2() - weighted / nf).max(0.0)
}

/// Classic Shannon entropy (bits) of a cloud.
pub fn cse(cloud: &PointCloud, config: &BinningConfig) -> Result<EntropyReport> {
    config.validate()?;
    let pts = cloud.points();
    let b = buckets(pts, &ranges(pts), config.bins_per_dim);
    Ok(EntropyReport {
        method: EntropyMethod::Cse,
        value: bucket_entropy(b.iter()),
        t: None,
        sigma: None,
        n: cloud.n(),
    })
}

/// Classic Shannon mutual information `H(X) − Σ p(y) H(X | Y = y)` between a
/// cloud and its labels. Normalization ranges come from the whole cloud and
/// are shared by the conditionals, so all terms use the same buckets.
pub fn csmi(cloud: &PointCloud, config: &BinningConfig) -> Result<MIReport> {
    config.validate()?;
    if cloud.labels().is_none() {
        return Err(invalid("mutual information needs labels"));
    }
    let pts = cloud.points();
    let b = buckets(pts, &ranges(pts), config.bins_per_dim);
    let unconditional = bucket_entropy(b.iter());
    let groups = cloud.class_indices();
    let n = cloud.n() as f64;
    let class_sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let conditional: Vec<f64> = groups
        .iter()
        .map(|rows| bucket_entropy(rows.iter().map(|&r| &b[r])))
        .collect();
    let value = class_sizes
        .iter()
        .zip(&conditional)
        .map(|(&s, &h)| s as f64 / n * (unconditional - h))
        .sum();
    Ok(MIReport {
        method: MIMethod::Csmi,
        value,
        conditional_entropies: conditional,
        unconditional_entropies: vec![unconditional; class_sizes.len()],
        class_sizes,
        t: None,
        sigma: None,
        sigma_policy: None,
        subsample_repeats: None,
        labels_derived: false,
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn identical_points_have_zero_entropy() {
        let c = PointCloud::new(Array2::from_elem((10, 3), 2.5)).unwrap();
        assert_eq!(cse(&c, &BinningConfig::default()).unwrap().value, 0.0);
        let labelled = c.relabel((0..10).map(|i| i % 3).collect()).unwrap();
        assert_eq!(csmi(&labelled, &BinningConfig::default()).unwrap().value, 0.0);
    }

    #[test]
    fn top_edge_is_closed() {
        // 0, 0.5 and 1 with two bins: [0, .5) → 0, [.5, 1] → 1.
        let c = PointCloud::new(array![[0.0], [0.5], [1.0]]).unwrap();
        let b = buckets(c.points(), &ranges(c.points()), 2);
        assert_eq!(b, vec![vec![0], vec![1], vec![1]]);
    }

    #[test]
    fn labels_equal_to_buckets_give_log_k() {
        // Four equal buckets in 2-D with two bins per dimension.
        let pts = array![
            [0.0, 0.0], [0.1, 0.1], [0.0, 1.0], [0.1, 0.9],
            [1.0, 0.0], [0.9, 0.1], [1.0, 1.0], [0.9, 0.9]
        ];
        let c = PointCloud::with_labels(pts, vec![0, 0, 1, 1, 2, 2, 3, 3]).unwrap();
        let r = csmi(&c, &BinningConfig::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert_eq!(r.class_sizes, vec![2; 4]);
    }

    #[test]
    fn rejects_bad_config_and_missing_labels() {
        let c = PointCloud::new(array![[0.0], [1.0]]).unwrap();
        assert!(cse(&c, &BinningConfig { bins_per_dim: 1 }).is_err());
        assert!(csmi(&c, &BinningConfig::default()).is_err());
    }
}
