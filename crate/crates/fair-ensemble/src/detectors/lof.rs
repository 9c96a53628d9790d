//! Local Outlier Factor.
//!
//! k-distance(b) is the distance to the k-th nearest neighbor (self
//! excluded); the neighborhood contains every point at distance <=
//! k-distance, so exact ties are all included. reach-dist_k(a,b) =
//! max(k-distance(b), dist(a,b)); lrd(a) is the inverse mean reachability
//! distance over the neighborhood; LOF(a) is the mean neighbor-to-self lrd
//! ratio. Scores near 1 mean inlier; larger means more isolated.

use crate::core::{euclidean_distance, Dataset};
use crate::error::{Error, Result};

/// Guard added to mean reachability distances so duplicate-heavy data keeps
/// finite densities (lrd of an all-duplicates neighborhood would be 1/0).
const REACHABILITY_EPS: f64 = 1e-10;

pub fn lof_scores(dataset: &Dataset, n_neighbors: usize) -> Result<Vec<f64>> {
    let n = dataset.n();
    if n_neighbors == 0 || n_neighbors >= n {
        return Err(Error::InvalidConfig(format!(
            "lof requires 1 <= n_neighbors < n (n_neighbors={n_neighbors}, n={n})"
        )));
    }
    let feats = dataset.features();

    // Pass 1: per-point sorted neighbor lists (ties at the k-th distance all
    // kept) and k-distances.
    let mut neighborhoods: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut k_distance = vec![0.0f64; n];
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        row.clear();
        let a = feats.row(i);
        for j in 0..n {
            if j != i {
                row.push((j, euclidean_distance(a, feats.row(j))));
            }
        }
        row.sort_unstable_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
        let kd = row[n_neighbors - 1].1;
        k_distance[i] = kd;
        let cut = row.partition_point(|(_, d)| *d <= kd);
        neighborhoods.push(row[..cut].to_vec());
    }

    // Pass 2: local reachability densities.
    let lrd: Vec<f64> = (0..n)
        .map(|i| {
            let hood = &neighborhoods[i];
            let mean_reach = hood
                .iter()
                .map(|&(b, d)| k_distance[b].max(d))
                .sum::<f64>()
                / hood.len() as f64;
            1.0 / (mean_reach + REACHABILITY_EPS)
        })
        .collect();

    // Pass 3: mean lrd ratio over the neighborhood.
    Ok((0..n)
        .map(|i| {
            let hood = &neighborhoods[i];
            let ratio_sum: f64 = hood.iter().map(|&(b, _)| lrd[b] / lrd[i]).sum();
            ratio_sum / hood.len() as f64
        })
        .collect())
}
