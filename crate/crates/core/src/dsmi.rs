//! Diffusion spectral mutual information between a cloud and a discrete variable.
//!
//! ```text
//! I_D(X; Y) = Σ_i p(y_i) · ( S̄_D(X; |X_i|) − S_D(X | Y = y_i) )
//! ```
//!
//! The unconditional entropy `S̄_D(X; m)` is averaged over `repeats` uniform
//! subsamples of `X` of size `m`, so each difference compares spectra of the
//! same size. Subsample draws are keyed by `(seed, m, repeat)`, never by the
//! class id, which makes the result invariant under relabelling.

use ndarray::Array2;
use rand::seq::index;
use rayon::prelude::*;
use serde::Serialize;

use crate::cloud::PointCloud;
use crate::clustering::{spectral_cluster, ClusterConfig};
use crate::error::{invalid, Result};
use crate::kernel::{pairwise_sq_dists, resolve_sigma, Bandwidth, KernelConfig};
use crate::rng::keyed;
use crate::spectrum::dse_of_cloud;

/// Values below this are reported with a warning; they are never clamped.
pub const NEGATIVE_SANITY_FLOOR: f64 = -0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaPolicy {
    /// Every entropy evaluation resolves its own bandwidth.
    PerSubset,
    /// The bandwidth resolved on the full cloud is reused everywhere.
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MIMethod {
    Dsmi,
    Csmi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DsmiConfig {
    pub kernel: KernelConfig,
    pub t: f64,
    pub repeats: usize,
    pub seed: u64,
    pub sigma_policy: SigmaPolicy,
}

impl Default for DsmiConfig {
    fn default() -> Self {
        Self {
            kernel: KernelConfig::default(),
            t: 1.0,
            repeats: 5,
            seed: 0,
            sigma_policy: SigmaPolicy::PerSubset,
        }
    }
}

/// A mutual-information estimate in bits with its per-class breakdown.
///
/// `value = Σ_i (class_sizes[i] / n) · (unconditional_entropies[i] − conditional_entropies[i])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MIReport {
    pub method: MIMethod,
    pub value: f64,
    pub conditional_entropies: Vec<f64>,
    pub unconditional_entropies: Vec<f64>,
    pub class_sizes: Vec<usize>,
    pub t: Option<f64>,
    /// The global bandwidth, when one was used for every evaluation.
    pub sigma: Option<f64>,
    pub sigma_policy: Option<SigmaPolicy>,
    pub subsample_repeats: Option<usize>,
    /// Whether the labels came from clustering another cloud.
    pub labels_derived: bool,
    pub warnings: Vec<String>,
}

/// DSMI between a labelled cloud and its labels.
pub fn dsmi(cloud: &PointCloud, config: &DsmiConfig) -> Result<MIReport> {
    if cloud.labels().is_none() {
        return Err(invalid("DSMI needs labels"));
    }
    if config.repeats < 1 {
        return Err(invalid("repeats must be at least 1"));
    }
    if !(config.t > 0.0 && config.t.is_finite()) {
        return Err(invalid(format!("diffusion time must be positive, got {}", config.t)));
    }
    let groups = cloud.class_indices();
    if let Some((c, g)) = groups.iter().enumerate().find(|(_, g)| g.len() < 2) {
        return Err(invalid(format!(
            "class {c} has {} point(s); every class needs at least 2",
            g.len()
        )));
    }

    let (kernel, global_sigma) = match (config.sigma_policy, config.kernel.bandwidth) {
        (SigmaPolicy::Global, Bandwidth::MedianHeuristic) => {
            let sq = pairwise_sq_dists(cloud.points())?;
            let sigma = resolve_sigma(&sq, Bandwidth::MedianHeuristic)?;
            (
                KernelConfig {
                    bandwidth: Bandwidth::Fixed(sigma),
                    ..config.kernel
                },
                Some(sigma),
            )
        }
        (_, Bandwidth::Fixed(s)) => (config.kernel, Some(s)),
        (SigmaPolicy::PerSubset, Bandwidth::MedianHeuristic) => (config.kernel, None),
    };

    let n = cloud.n();
    // Draw every subsample up front so evaluation order cannot affect them.
    let jobs: Vec<(usize, Vec<Vec<usize>>)> = groups
        .iter()
        .map(|rows| {
            let m = rows.len();
            let draws = (0..config.repeats)
                .map(|r| {
                    let mut rng = keyed(config.seed, &[m as u64, r as u64]);
                    let mut idx = index::sample(&mut rng, n, m).into_vec();
                    idx.sort_unstable();
                    idx
                })
                .collect();
            (m, draws)
        })
        .collect();

    let per_class: Vec<Result<(f64, f64)>> = groups
        .par_iter()
        .zip(jobs.par_iter())
        .map(|(rows, (_, draws))| {
            let conditional = dse_of_cloud(&cloud.select(rows)?, &kernel, config.t)?.value;
            let mut total = 0.0;
            for idx in draws {
                total += dse_of_cloud(&cloud.select(idx)?, &kernel, config.t)?.value;
            }
            Ok((conditional, total / draws.len() as f64))
        })
        .collect();

    let mut conditional_entropies = Vec::with_capacity(groups.len());
    let mut unconditional_entropies = Vec::with_capacity(groups.len());
    for r in per_class {
        let (c, u) = r?;
        conditional_entropies.push(c);
        unconditional_entropies.push(u);
    }
    let class_sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let value = class_sizes
        .iter()
        .zip(conditional_entropies.iter().zip(&unconditional_entropies))
        .map(|(&s, (c, u))| s as f64 / n as f64 * (u - c))
        .sum::<f64>();

    let mut warnings = Vec::new();
    if value < NEGATIVE_SANITY_FLOOR {
        warnings.push(format!(
            "DSMI {value:.4} bits is below the {NEGATIVE_SANITY_FLOOR} sanity floor"
        ));
    }
    if !config.kernel.is_standard() {
        warnings.push(format!("non-standard anisotropy alpha = {}", config.kernel.alpha));
    }
    Ok(MIReport {
        method: MIMethod::Dsmi,
        value,
        conditional_entropies,
        unconditional_entropies,
        class_sizes,
        t: Some(config.t),
        sigma: global_sigma,
        sigma_policy: Some(config.sigma_policy),
        subsample_repeats: Some(config.repeats),
        labels_derived: false,
        warnings,
    })
}

/// Moves points into clusters with fewer than two members: an empty cluster
/// is seeded with the point of the largest cluster farthest from that
/// cluster's mean, then each short cluster absorbs the point nearest to one
/// of its members taken from clusters that can spare one. Returns one
/// message per repaired cluster.
fn repair_small_clusters(points: &Array2<f64>, ids: &mut [usize], k: usize) -> Vec<String> {
    let mut messages = Vec::new();
    let sq = |a: usize, b: usize| -> f64 {
        points
            .row(a)
            .iter()
            .zip(points.row(b))
            .map(|(x, y)| (x - y) * (x - y))
            .sum()
    };
    let sizes = |ids: &[usize]| {
        let mut s = vec![0usize; k];
        for &i in ids {
            s[i] += 1;
        }
        s
    };
    for c in 0..k {
        let mut s = sizes(ids);
        if s[c] >= 2 {
            continue;
        }
        messages.push(format!("cluster {c} had {} member(s); reassigned nearest points", s[c]));
        if s[c] == 0 {
            let big = (0..k).max_by_key(|&j| (s[j], std::cmp::Reverse(j))).unwrap();
            let members: Vec<usize> = (0..ids.len()).filter(|&i| ids[i] == big).collect();
            let mean = members
                .iter()
                .fold(ndarray::Array1::<f64>::zeros(points.ncols()), |acc, &i| acc + points.row(i))
                / members.len() as f64;
            let far = *members
                .iter()
                .max_by(|&&a, &&b| {
                    let da: f64 = (&points.row(a) - &mean).mapv(|v| v * v).sum();
                    let db: f64 = (&points.row(b) - &mean).mapv(|v| v * v).sum();
                    da.total_cmp(&db).then(b.cmp(&a))
                })
                .unwrap();
            ids[far] = c;
            s = sizes(ids);
        }
        while s[c] < 2 {
            let members: Vec<usize> = (0..ids.len()).filter(|&i| ids[i] == c).collect();
            let donor = (0..ids.len())
                .filter(|&i| ids[i] != c && s[ids[i]] > 2)
                .min_by(|&a, &b| {
                    let da = members.iter().map(|&m| sq(a, m)).fold(f64::INFINITY, f64::min);
                    let db = members.iter().map(|&m| sq(b, m)).fold(f64::INFINITY, f64::min);
                    da.total_cmp(&db).then(a.cmp(&b))
                });
            match donor {
                Some(i) => ids[i] = c,
                None => break,
            }
            s = sizes(ids);
        }
    }
    messages
}

/// DSMI between `representation` and cluster ids obtained by spectral
/// clustering of `input` into `num_clusters` groups.
pub fn dsmi_with_input(
    representation: &PointCloud,
    input: &PointCloud,
    num_clusters: usize,
    config: &DsmiConfig,
) -> Result<MIReport> {
    if representation.n() != input.n() {
        return Err(invalid(format!(
            "representation has {} rows but input has {}",
            representation.n(),
            input.n()
        )));
    }
    if num_clusters < 2 {
        return Err(invalid("num_clusters must be at least 2"));
    }
    if 2 * num_clusters > input.n() {
        return Err(invalid(format!(
            "{} points cannot fill {num_clusters} clusters of at least 2",
            input.n()
        )));
    }
    let assignment = spectral_cluster(input, num_clusters, config.seed, &ClusterConfig::default())?;
    let mut ids = assignment.ids;
    let points = input.points().to_owned();
    let messages = repair_small_clusters(&points, &mut ids, num_clusters);
    let labelled = PointCloud::new(representation.points().to_owned())?.relabel(ids)?;
    let mut report = dsmi(&labelled, config)?;
    report.labels_derived = true;
    report.warnings.splice(0..0, messages);
    Ok(report)
}
