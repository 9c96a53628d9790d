//! k-nearest-neighbor distance detector: the score of an instance is the
//! Euclidean distance to its k-th nearest neighbor, self excluded.

use crate::core::{euclidean_distance, Dataset};
use crate::error::{Error, Result};

pub fn knn_scores(dataset: &Dataset, k: usize) -> Result<Vec<f64>> {
    let n = dataset.n();
    if k == 0 || k >= n {
        return Err(Error::InvalidConfig(format!(
            "knn requires 1 <= k < n (k={k}, n={n})"
        )));
    }
    let feats = dataset.features();
    let mut scores = Vec::with_capacity(n);
    let mut dists = Vec::with_capacity(n - 1);
    for i in 0..n {
        dists.clear();
        let a = feats.row(i);
        for j in 0..n {
            if j != i {
                dists.push(euclidean_distance(a, feats.row(j)));
            }
        }
        // k-th smallest of the multiset; 1-indexed k.
        dists.select_nth_unstable_by(k - 1, |x, y| x.total_cmp(y));
        scores.push(dists[k - 1]);
    }
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::Matrix;

    fn line_dataset(points: &[f64]) -> Dataset {
        let n = points.len();
        let features = Matrix::from_vec(n, 1, points.to_vec()).unwrap();
        let groups: Vec<u32> = (0..n).map(|i| (i % 2) as u32).collect();
        Dataset::new("line", features, groups, None).unwrap()
    }

    #[test]
    fn nearest_neighbor_distances_by_inspection() {
        let ds = line_dataset(&[0.0, 1.0, 10.0]);
        assert_eq!(knn_scores(&ds, 1).unwrap(), vec![1.0, 1.0, 9.0]);
    }

    #[test]
    fn second_nearest_distances_by_inspection() {
        let ds = line_dataset(&[0.0, 1.0, 10.0]);
        assert_eq!(knn_scores(&ds, 2).unwrap(), vec![10.0, 9.0, 10.0]);
    }

    #[test]
    fn identical_points_score_zero() {
        let ds = line_dataset(&[3.0, 3.0, 3.0, 3.0]);
        assert_eq!(knn_scores(&ds, 1).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn k_out_of_range_rejected() {
        let ds = line_dataset(&[0.0, 1.0, 2.0]);
        assert!(knn_scores(&ds, 3).is_err());
        assert!(knn_scores(&ds, 0).is_err());
    }
}
