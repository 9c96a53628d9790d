//! Deterministic synthetic mini-datasets bundled with the repository.
//!
//! Each fixture is a Gaussian cloud (one or two clusters) with planted far
//! outliers and a seeded biased protected attribute. They are desk-scale
//! stand-ins shaped like the benchmark roster (group counts 4,4,2,2,3,3,4,4),
//! not subsamples of the real datasets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::core::{mix_seed, Dataset, Matrix};
use crate::error::Result;
use crate::ingestion::inject::synthesize_groups;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureShape {
    /// Single Gaussian cluster.
    Blob,
    /// Two Gaussian clusters at mirrored centers.
    TwoClusters,
}

#[derive(Debug, Clone)]
pub struct FixtureSpec {
    pub name: &'static str,
    pub n_inliers: usize,
    pub n_outliers: usize,
    pub dim: usize,
    pub v_groups: u32,
    pub bias_strength: f64,
    pub seed: u64,
    pub shape: FixtureShape,
}

/// The bundled roster, mirroring the benchmark table's group counts.
pub fn bundled_fixtures() -> Vec<FixtureSpec> {
    use FixtureShape::*;
    vec![
        FixtureSpec { name: "communities_mini", n_inliers: 225, n_outliers: 25, dim: 5, v_groups: 4, bias_strength: 0.6, seed: 101, shape: Blob },
        FixtureSpec { name: "german_mini", n_inliers: 140, n_outliers: 60, dim: 4, v_groups: 4, bias_strength: 0.5, seed: 102, shape: TwoClusters },
        FixtureSpec { name: "annthyroid_mini", n_inliers: 240, n_outliers: 20, dim: 6, v_groups: 2, bias_strength: 0.8, seed: 103, shape: Blob },
        FixtureSpec { name: "cardio_mini", n_inliers: 200, n_outliers: 20, dim: 5, v_groups: 2, bias_strength: 0.7, seed: 104, shape: Blob },
        FixtureSpec { name: "vowels_mini", n_inliers: 170, n_outliers: 10, dim: 4, v_groups: 3, bias_strength: 0.9, seed: 105, shape: TwoClusters },
        FixtureSpec { name: "breastw_mini", n_inliers: 110, n_outliers: 50, dim: 3, v_groups: 3, bias_strength: 0.5, seed: 106, shape: TwoClusters },
        FixtureSpec { name: "mammography_mini", n_inliers: 280, n_outliers: 20, dim: 4, v_groups: 4, bias_strength: 0.6, seed: 107, shape: Blob },
        FixtureSpec { name: "pima_mini", n_inliers: 100, n_outliers: 50, dim: 5, v_groups: 4, bias_strength: 0.5, seed: 108, shape: Blob },
    ]
}

pub fn fixture_by_name(name: &str) -> Option<FixtureSpec> {
    bundled_fixtures().into_iter().find(|f| f.name == name)
}

/// Materialize a fixture dataset. Fully determined by the spec.
pub fn generate(spec: &FixtureSpec) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_inliers + spec.n_outliers;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut labels: Vec<u8> = Vec::with_capacity(n);

    let centers: Vec<Vec<f64>> = match spec.shape {
        FixtureShape::Blob => vec![vec![0.0; spec.dim]],
        FixtureShape::TwoClusters => {
            let mut a = vec![0.0; spec.dim];
            let mut b = vec![0.0; spec.dim];
            for d in 0..spec.dim {
                a[d] = if d % 2 == 0 { 3.0 } else { -3.0 };
                b[d] = -a[d];
            }
            vec![a, b]
        }
    };

    for i in 0..spec.n_inliers {
        let center = &centers[i % centers.len()];
        let row: Vec<f64> = center
            .iter()
            .map(|c| c + rng.sample::<f64, _>(StandardNormal))
            .collect();
        rows.push(row);
        labels.push(0);
    }
    let cluster_extent = centers
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    for _ in 0..spec.n_outliers {
        // Random direction at a radius safely beyond the cluster extent.
        let dir: Vec<f64> = (0..spec.dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
        let radius = cluster_extent + 8.0 + 4.0 * rng.gen::<f64>();
        let row: Vec<f64> = dir
            .iter()
            .map(|v| v / norm * radius + 0.25 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        rows.push(row);
        labels.push(1);
    }

    let groups = synthesize_groups(
        &labels,
        spec.v_groups,
        spec.bias_strength,
        mix_seed(spec.seed, 7),
    )?;
    Dataset::new(spec.name, Matrix::from_rows(rows)?, groups, Some(labels))
}
