//! Domain data model: datasets, score matrices, targets and ensemble weights.

use crate::core::matrix::Matrix;
use crate::core::normalize::{minmax_normalize, standardize_columns};
use crate::error::{Error, Result};

/// Inlier label value.
pub const INLIER: u8 = 0;
/// Outlier label value.
pub const OUTLIER: u8 = 1;

/// A tabular dataset: features, protected-group ids and optional
/// ground-truth outlier labels.
///
/// The feature matrix holds only the columns detectors are allowed to see;
/// the protected attribute and the label live in their own vectors, so
/// detection is structurally unaware of group membership.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    features: Matrix,
    groups: Vec<u32>,
    labels: Option<Vec<u8>>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        features: Matrix,
        groups: Vec<u32>,
        labels: Option<Vec<u8>>,
    ) -> Result<Self> {
        let n = features.rows();
        if n < 2 {
            return Err(Error::InvalidInput(
                "dataset needs at least 2 instances".into(),
            ));
        }
        if !features.is_finite() {
            return Err(Error::InvalidInput(
                "dataset features contain NaN or Inf".into(),
            ));
        }
        if groups.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: groups.len(),
                context: "group vector length".into(),
            });
        }
        let max_id = *groups.iter().max().expect("n >= 2");
        if max_id == 0 {
            return Err(Error::InvalidInput(
                "fairness undefined for one group".into(),
            ));
        }
        for id in 0..=max_id {
            if !groups.contains(&id) {
                return Err(Error::InvalidInput(format!(
                    "group id {id} missing: ids must cover 0..={max_id}"
                )));
            }
        }
        if let Some(ref l) = labels {
            if l.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: l.len(),
                    context: "label vector length".into(),
                });
            }
            if l.iter().any(|v| *v > 1) {
                return Err(Error::InvalidInput(
                    "labels must be 0 (inlier) or 1 (outlier)".into(),
                ));
            }
        }
        Ok(Dataset {
            name: name.into(),
            features,
            groups,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn groups(&self) -> &[u32] {
        &self.groups
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    pub fn n_groups(&self) -> usize {
        let mut ids: Vec<u32> = self.groups.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    /// Count of (inliers, outliers); None when unlabeled.
    pub fn label_counts(&self) -> Option<(usize, usize)> {
        self.labels.as_ref().map(|l| {
            let out = l.iter().filter(|v| **v == OUTLIER).count();
            (l.len() - out, out)
        })
    }

    /// Copy with per-column zero-mean unit-variance features.
    pub fn standardized(&self) -> Dataset {
        let mut data = self.features.as_slice().to_vec();
        standardize_columns(&mut data, self.n(), self.n_features());
        let features = Matrix::from_vec(self.n(), self.n_features(), data)
            .expect("same shape as source");
        Dataset {
            name: self.name.clone(),
            features,
            groups: self.groups.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Copy with the group vector replaced (used by protected-attribute
    /// injection). Re-validates.
    pub fn with_groups(&self, groups: Vec<u32>) -> Result<Dataset> {
        Dataset::new(
            self.name.clone(),
            self.features.clone(),
            groups,
            self.labels.clone(),
        )
    }
}

/// k x n matrix of per-detector outlier scores, each row min-max normalized
/// into [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    scores: Matrix,
    detector_ids: Vec<String>,
}

impl ScoreMatrix {
    /// Normalize raw detector rows and assemble the matrix.
    pub fn from_raw_rows(raw_rows: Vec<Vec<f64>>, detector_ids: Vec<String>) -> Result<Self> {
        if raw_rows.is_empty() {
            return Err(Error::InvalidInput("score matrix needs k >= 1 rows".into()));
        }
        if raw_rows.len() != detector_ids.len() {
            return Err(Error::DimensionMismatch {
                expected: raw_rows.len(),
                got: detector_ids.len(),
                context: "detector id count".into(),
            });
        }
        let mut rows = Vec::with_capacity(raw_rows.len());
        for row in &raw_rows {
            rows.push(minmax_normalize(row)?);
        }
        Ok(ScoreMatrix {
            scores: Matrix::from_rows(rows)?,
            detector_ids,
        })
    }

    /// Number of detectors (rows).
    pub fn k(&self) -> usize {
        self.scores.rows()
    }

    /// Number of instances (columns).
    pub fn n(&self) -> usize {
        self.scores.cols()
    }

    pub fn detector_ids(&self) -> &[String] {
        &self.detector_ids
    }

    /// Scores of detector `i` over all instances.
    pub fn row(&self, i: usize) -> &[f64] {
        self.scores.row(i)
    }

    /// Score vector of instance `j` across detectors (gathered copy).
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.scores.column(j)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.scores
    }
}

/// Target outlier vector produced by a base ensemble method; values in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct TargetVector {
    values: Vec<f64>,
    source: String,
}

impl TargetVector {
    pub fn new(values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty target vector".into()));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidInput(
                "target vector values must lie in [0, 1]".into(),
            ));
        }
        Ok(TargetVector {
            values,
            source: source.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

/// Ensemble weights over detectors; entries may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleWeights {
    values: Vec<f64>,
}

impl EnsembleWeights {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty weight vector".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("weights must be finite".into()));
        }
        Ok(EnsembleWeights { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn features(rows: usize, cols: usize) -> Matrix {
        Matrix::from_vec(rows, cols, (0..rows * cols).map(|i| i as f64).collect()).unwrap()
    }

    #[test]
    fn dataset_requires_two_groups() {
        let err = Dataset::new("d", features(3, 2), vec![0, 0, 0], None).unwrap_err();
        assert!(err.to_string().contains("one group"));
    }

    #[test]
    fn dataset_requires_contiguous_group_ids() {
        let err = Dataset::new("d", features(3, 2), vec![0, 2, 0], None).unwrap_err();
        assert!(err.to_string().contains("missing"));
    }

    #[test]
    fn score_rows_are_normalized() {
        let sm = ScoreMatrix::from_raw_rows(
            vec![vec![2.0, 4.0, 6.0], vec![5.0, 5.0, 5.0]],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert_eq!(sm.row(0), &[0.0, 0.5, 1.0]);
        assert_eq!(sm.row(1), &[0.0, 0.0, 0.0]);
        assert_eq!(sm.column(1), vec![0.5, 0.0]);
    }

    #[test]
    fn standardized_keeps_shape_and_groups() {
        let ds = Dataset::new("d", features(4, 3), vec![0, 1, 0, 1], Some(vec![0, 0, 1, 0]))
            .unwrap();
        let s = ds.standardized();
        assert_eq!(s.n(), 4);
        assert_eq!(s.n_features(), 3);
        assert_eq!(s.groups(), ds.groups());
        assert_eq!(s.labels(), ds.labels());
    }
}
