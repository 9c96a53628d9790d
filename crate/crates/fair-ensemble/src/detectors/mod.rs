//! Base outlier detectors producing the rows of the score matrix.

pub mod iforest;
pub mod knn;
pub mod lof;

use rayon::prelude::*;

use crate::core::{mix_seed, Dataset, ScoreMatrix};
use crate::error::{Error, Result};

pub use iforest::iforest_scores;
pub use knn::knn_scores;
pub use lof::lof_scores;

/// Neighbor counts of the LOF grid.
pub const LOF_GRID: [usize; 6] = [5, 10, 15, 20, 25, 30];
/// k values of the kNN-distance grid.
pub const KNN_GRID: [usize; 5] = [2, 4, 6, 8, 10];
/// Tree counts of the Isolation Forest grid.
pub const IFOREST_GRID: [usize; 7] = [25, 50, 75, 100, 125, 150, 175];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    Lof,
    Knn,
    IForest,
}

/// One base detector: a kind, its integer parameter (neighbor count, k or
/// tree count) and a seed (used by Isolation Forest only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectorConfig {
    pub kind: DetectorKind,
    pub parameter: usize,
    pub seed: u64,
}

impl DetectorConfig {
    pub fn lof(n_neighbors: usize) -> Self {
        DetectorConfig {
            kind: DetectorKind::Lof,
            parameter: n_neighbors,
            seed: 0,
        }
    }

    pub fn knn(k: usize) -> Self {
        DetectorConfig {
            kind: DetectorKind::Knn,
            parameter: k,
            seed: 0,
        }
    }

    pub fn iforest(n_trees: usize, seed: u64) -> Self {
        DetectorConfig {
            kind: DetectorKind::IForest,
            parameter: n_trees,
            seed,
        }
    }

    pub fn descriptor(&self) -> String {
        match self.kind {
            DetectorKind::Lof => format!("lof_{}", self.parameter),
            DetectorKind::Knn => format!("knn_{}", self.parameter),
            DetectorKind::IForest => format!("iforest_{}", self.parameter),
        }
    }

    fn run(&self, dataset: &Dataset) -> Result<Vec<f64>> {
        if self.parameter == 0 {
            return Err(Error::InvalidConfig("detector parameter must be >= 1".into()));
        }
        match self.kind {
            DetectorKind::Lof => lof_scores(dataset, self.parameter),
            DetectorKind::Knn => knn_scores(dataset, self.parameter),
            DetectorKind::IForest => iforest_scores(dataset, self.parameter, self.seed),
        }
    }
}

/// The default detector zoo: 6 LOF + 5 kNN + 7 Isolation Forest configs.
/// Forest seeds are derived deterministically from `base_seed`.
pub fn default_grid(base_seed: u64) -> Vec<DetectorConfig> {
    let mut grid = Vec::with_capacity(LOF_GRID.len() + KNN_GRID.len() + IFOREST_GRID.len());
    grid.extend(LOF_GRID.iter().map(|&p| DetectorConfig::lof(p)));
    grid.extend(KNN_GRID.iter().map(|&p| DetectorConfig::knn(p)));
    grid.extend(
        IFOREST_GRID
            .iter()
            .enumerate()
            .map(|(i, &p)| DetectorConfig::iforest(p, mix_seed(base_seed, 0x100 + i as u64))),
    );
    grid
}

/// Run every config against the dataset and stack the min-max normalized
/// rows. Configs are evaluated in parallel; the row order is the config
/// order, so the result is independent of scheduling.
pub fn build_score_matrix(dataset: &Dataset, configs: &[DetectorConfig]) -> Result<ScoreMatrix> {
    if configs.is_empty() {
        return Err(Error::InvalidConfig("empty detector config list".into()));
    }
    let raw: Vec<Result<Vec<f64>>> = configs
        .par_iter()
        .map(|cfg| {
            cfg.run(dataset).map_err(|e| Error::Detector {
                detector: cfg.descriptor(),
                source: Box::new(e),
            })
        })
        .collect();
    let mut rows = Vec::with_capacity(configs.len());
    for r in raw {
        rows.push(r?);
    }
    let ids = configs.iter().map(|c| c.descriptor()).collect();
    ScoreMatrix::from_raw_rows(rows, ids)
}
