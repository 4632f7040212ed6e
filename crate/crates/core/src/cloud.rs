//! Point clouds: an `n × D` matrix of observations with optional class labels.

use ndarray::{Array2, ArrayView2, Axis};
use crate::error::{invalid, Result};

/// `n` observations in `ℝ^D`, optionally labelled with classes `0..C`.
///
/// Invariants: `n ≥ 1`, `D ≥ 1`, every coordinate finite, and when labels are
/// present every class in `0..C` has at least one member.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Array2<f64>,
    labels: Option<Vec<usize>>,
}

impl PointCloud {
    pub fn new(points: Array2<f64>) -> Result<Self> {
        let (n, d) = points.dim();
        if n == 0 || d == 0 {
            return Err(invalid(format!("point cloud must be non-empty, got {n}x{d}")));
        }
        if let Some(((i, j), v)) = points.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(invalid(format!("non-finite value {v} at row {i}, column {j}")));
        }
        Ok(Self { points, labels: None })
    }

    pub fn with_labels(points: Array2<f64>, labels: Vec<usize>) -> Result<Self> {
        let cloud = Self::new(points)?;
        cloud.relabel(labels)
    }

    /// Replaces (or attaches) the labels, validating them against this cloud.
    pub fn relabel(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(invalid(format!(
                "{} labels for {} points",
                labels.len(),
                self.n()
            )));
        }
        let classes = labels.iter().max().map_or(0, |&m| m + 1);
        let mut seen = vec![false; classes];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(invalid(format!(
                "class {empty} has no members (labels must cover 0..{classes})"
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> ArrayView2<'_, f64> {
        self.points.view()
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn num_classes(&self) -> usize {
        self.labels
            .as_ref()
            .and_then(|l| l.iter().max())
            .map_or(0, |&m| m + 1)
    }

    /// Row indices of each class, in class order. Empty when unlabelled.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.num_classes()];
        if let Some(labels) = &self.labels {
            for (i, &l) in labels.iter().enumerate() {
                groups[l].push(i);
            }
        }
        groups
    }

    /// The unlabelled sub-cloud made of `rows` (in the given order).
    pub fn select(&self, rows: &[usize]) -> Result<PointCloud> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n()) {
            return Err(invalid(format!("row {bad} out of range for {} points", self.n())));
        }
        PointCloud::new(self.points.select(Axis(0), rows))
    }

    pub fn into_points(self) -> Array2<f64> {
        self.points
    }
}
