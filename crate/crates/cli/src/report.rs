//! The JSON report printed by every estimator command.
//!
//! Top-level keys are always present (null when they do not apply to the
//! method); method-specific sub-objects appear only for their methods.

use serde::Serialize;

use diffspec::dsmi::{MIReport, SigmaPolicy};
use diffspec::spectrum::Spectrum;

#[derive(Debug, Clone, Serialize)]
pub struct EigenvalueSummary {
    pub top10: Vec<f64>,
    pub clamped_count: usize,
}

impl EigenvalueSummary {
    pub fn of(spectrum: &Spectrum) -> Self {
        Self {
            top10: spectrum.eigenvalues().iter().take(10).copied().collect(),
            clamped_count: spectrum.clamped_count(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PerClass {
    /// The label value of each class as it appeared in the input.
    pub labels: Vec<u64>,
    pub class_sizes: Vec<usize>,
    pub conditional_entropies: Vec<f64>,
    pub unconditional_entropies: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LabelProvenance {
    /// `"file"` or `"clustering"`.
    pub source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clusters: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub method: &'static str,
    pub value_bits: f64,
    pub t: Option<f64>,
    /// The bandwidth used everywhere, or null when it was resolved per subset.
    pub sigma: Option<f64>,
    /// `"median"` or `"fixed"`; null for binning methods.
    pub sigma_source: Option<&'static str>,
    pub sigma_policy: Option<&'static str>,
    pub alpha: Option<f64>,
    pub n: usize,
    pub d: usize,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeats: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalue_summary: Option<EigenvalueSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_class: Option<PerClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins_per_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<LabelProvenance>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(method: &'static str, value_bits: f64, n: usize, d: usize) -> Self {
        Self {
            method,
            value_bits,
            t: None,
            sigma: None,
            sigma_source: None,
            sigma_policy: None,
            alpha: None,
            n,
            d,
            seed: None,
            repeats: None,
            eigenvalue_summary: None,
            per_class: None,
            bins_per_dim: None,
            labels: None,
            warnings: Vec::new(),
        }
    }

    /// A report for a mutual-information estimate.
    pub fn from_mi(method: &'static str, mi: MIReport, label_values: Vec<u64>, n: usize, d: usize) -> Self {
        let mut r = Report::new(method, mi.value, n, d);
        r.t = mi.t;
        r.sigma = mi.sigma;
        r.sigma_policy = mi.sigma_policy.map(policy_name);
        r.repeats = mi.subsample_repeats;
        r.per_class = Some(PerClass {
            labels: label_values,
            class_sizes: mi.class_sizes,
            conditional_entropies: mi.conditional_entropies,
            unconditional_entropies: mi.unconditional_entropies,
        });
        r.warnings = mi.warnings;
        r
    }
}

fn policy_name(p: SigmaPolicy) -> &'static str {
    match p {
        SigmaPolicy::PerSubset => "subset",
        SigmaPolicy::Global => "global",
    }
}
