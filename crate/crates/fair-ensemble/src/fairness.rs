//! Fairness measures over ensemble score vectors: demographic parity at the
//! group level, similarity-weighted individual fairness across cross-group
//! pairs, and the rank-based importance weights used by the fidelity term.

use crate::core::{euclidean_distance, Dataset, GroupPartition, KahanSum, TargetVector};
use crate::error::{Error, Result};

/// Per-instance importance weights beta_i = exp(rank(i)/n), rank ascending
/// in the target score with ties broken by original index. Range (1, e].
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceWeights {
    beta: Vec<f64>,
}

impl ImportanceWeights {
    pub fn values(&self) -> &[f64] {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    /// Unit weights of the same length, for the unweighted-fidelity variant.
    pub fn unit(n: usize) -> Self {
        ImportanceWeights { beta: vec![1.0; n] }
    }
}

pub fn importance_weights(target: &TargetVector) -> ImportanceWeights {
    let n = target.len();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable ascending sort: ties keep original index order.
    order.sort_by(|&a, &b| target.values()[a].total_cmp(&target.values()[b]).then(a.cmp(&b)));
    let mut beta = vec![0.0f64; n];
    for (pos, &idx) in order.iter().enumerate() {
        let rank = (pos + 1) as f64;
        beta[idx] = (rank / n as f64).exp();
    }
    ImportanceWeights { beta }
}

/// Demographic parity: mean squared difference of group score means over
/// all unordered group pairs. Zero iff every group mean is equal.
pub fn demographic_parity(y: &[f64], part: &GroupPartition) -> Result<f64> {
    if y.len() != part.n() {
        return Err(Error::DimensionMismatch {
            expected: part.n(),
            got: y.len(),
            context: "score vector vs partition".into(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("scores contain NaN or Inf".into()));
    }
    let means = group_means(y, part);
    let mut sum = KahanSum::new();
    for (idx_a, idx_b) in pair_positions(part) {
        let d = means[idx_a] - means[idx_b];
        sum.add(d * d);
    }
    Ok(sum.total() / part.n_pairs() as f64)
}

fn group_means(y: &[f64], part: &GroupPartition) -> Vec<f64> {
    part.groups()
        .map(|(_, members)| members.iter().map(|&i| y[i]).sum::<f64>() / members.len() as f64)
        .collect()
}

/// Pair list as positions into the partition's group ordering.
fn pair_positions(part: &GroupPartition) -> Vec<(usize, usize)> {
    let ids: Vec<u32> = part.groups().map(|(id, _)| id).collect();
    part.pairs()
        .iter()
        .map(|&(p, q)| {
            let a = ids.iter().position(|&g| g == p).expect("pair id in partition");
            let b = ids.iter().position(|&g| g == q).expect("pair id in partition");
            (a, b)
        })
        .collect()
}

/// Similarity weights d(X_i, X_j) = exp(-normalized distance) for one group
/// pair, row-major |p| x |q| over the members of p and q in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct PairWeightBlock {
    pub group_pair: (u32, u32),
    /// Instance indices of group p, ascending.
    pub rows: Vec<usize>,
    /// Instance indices of group q, ascending.
    pub cols: Vec<usize>,
    /// Row-major |p| x |q| weights in (0, 1].
    pub weights: Vec<f64>,
}

impl PairWeightBlock {
    pub fn weight(&self, pi: usize, qi: usize) -> f64 {
        self.weights[pi * self.cols.len() + qi]
    }
}

/// Global min-max scale of raw cross-group distances, shared by every block
/// so the weights are comparable across group pairs.
#[derive(Debug, Clone, Copy)]
struct DistanceScale {
    min: f64,
    range: f64,
}

impl DistanceScale {
    fn weight(&self, raw: f64) -> f64 {
        let normalized = if self.range > 0.0 {
            (raw - self.min) / self.range
        } else {
            0.0
        };
        (-normalized).exp()
    }
}

/// Lazily materializing source of pair-weight blocks: one block lives at a
/// time, so the full cross-group pair set never resides in memory at once.
pub struct PairBlockSource<'a> {
    dataset: &'a Dataset,
    part: &'a GroupPartition,
    scale: DistanceScale,
}

impl<'a> PairBlockSource<'a> {
    /// Two passes: scan all cross-group distances for the global min/max,
    /// then hand out blocks on demand.
    pub fn new(dataset: &'a Dataset, part: &'a GroupPartition) -> Result<Self> {
        if dataset.n() != part.n() {
            return Err(Error::DimensionMismatch {
                expected: part.n(),
                got: dataset.n(),
                context: "dataset vs partition".into(),
            });
        }
        let feats = dataset.features();
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &(p, q) in part.pairs() {
            let rows = part.members(p).expect("pair ids come from partition");
            let cols = part.members(q).expect("pair ids come from partition");
            for &i in rows {
                let a = feats.row(i);
                for &j in cols {
                    let d = euclidean_distance(a, feats.row(j));
                    min = min.min(d);
                    max = max.max(d);
                }
            }
        }
        if max == min {
            log::warn!(
                "all cross-group distances identical; every pair weight is exp(0) = 1"
            );
        }
        Ok(PairBlockSource {
            dataset,
            part,
            scale: DistanceScale {
                min,
                range: max - min,
            },
        })
    }

    /// The global (min, range) of raw cross-group distances.
    pub fn scale_parts(&self) -> (f64, f64) {
        (self.scale.min, self.scale.range)
    }

    /// Rebuild a source from a previously computed scale, skipping the
    /// global scan pass.
    pub fn from_scale_parts(
        dataset: &'a Dataset,
        part: &'a GroupPartition,
        min: f64,
        range: f64,
    ) -> Self {
        PairBlockSource {
            dataset,
            part,
            scale: DistanceScale { min, range },
        }
    }

    fn block(&self, p: u32, q: u32) -> PairWeightBlock {
        let rows = self.part.members(p).expect("group id valid").to_vec();
        let cols = self.part.members(q).expect("group id valid").to_vec();
        let feats = self.dataset.features();
        let mut weights = Vec::with_capacity(rows.len() * cols.len());
        for &i in &rows {
            let a = feats.row(i);
            for &j in &cols {
                weights.push(self.scale.weight(euclidean_distance(a, feats.row(j))));
            }
        }
        PairWeightBlock {
            group_pair: (p, q),
            rows,
            cols,
            weights,
        }
    }

    /// Visit every group-pair block in pair-list order.
    pub fn for_each<F: FnMut(&PairWeightBlock)>(&self, mut f: F) {
        for &(p, q) in self.part.pairs() {
            let block = self.block(p, q);
            f(&block);
        }
    }

    /// Materialize all blocks (desk-scale datasets).
    pub fn materialize(&self) -> Vec<PairWeightBlock> {
        let mut out = Vec::with_capacity(self.part.n_pairs());
        self.for_each(|b| out.push(b.clone()));
        out
    }
}

/// Materialized pair-distance weights for every group pair.
pub fn pair_distance_weights(
    dataset: &Dataset,
    part: &GroupPartition,
) -> Result<Vec<PairWeightBlock>> {
    Ok(PairBlockSource::new(dataset, part)?.materialize())
}

/// Individual fairness: mean over group pairs of the similarity-weighted
/// squared score differences, normalized by |p||q| per pair.
pub fn individual_fairness(
    y: &[f64],
    part: &GroupPartition,
    blocks: &[PairWeightBlock],
) -> Result<f64> {
    if y.len() != part.n() {
        return Err(Error::DimensionMismatch {
            expected: part.n(),
            got: y.len(),
            context: "score vector vs partition".into(),
        });
    }
    let mut outer = KahanSum::new();
    for &(p, q) in part.pairs() {
        let block = blocks
            .iter()
            .find(|b| b.group_pair == (p, q))
            .ok_or_else(|| Error::Internal(format!("missing pair weight block ({p},{q})")))?;
        outer.add(block_contribution(y, block));
    }
    Ok(outer.total() / part.n_pairs() as f64)
}

/// Streaming variant used by the pipeline so large pair sets are never all
/// resident.
pub fn individual_fairness_streamed(
    y: &[f64],
    part: &GroupPartition,
    source: &PairBlockSource<'_>,
) -> Result<f64> {
    if y.len() != part.n() {
        return Err(Error::DimensionMismatch {
            expected: part.n(),
            got: y.len(),
            context: "score vector vs partition".into(),
        });
    }
    let mut outer = KahanSum::new();
    source.for_each(|block| outer.add(block_contribution(y, block)));
    Ok(outer.total() / part.n_pairs() as f64)
}

fn block_contribution(y: &[f64], block: &PairWeightBlock) -> f64 {
    let mut inner = KahanSum::new();
    for (pi, &i) in block.rows.iter().enumerate() {
        for (qi, &j) in block.cols.iter().enumerate() {
            let diff = y[i] - y[j];
            inner.add(block.weight(pi, qi) * diff * diff);
        }
    }
    inner.total() / (block.rows.len() * block.cols.len()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{partition_groups, Matrix};
    use approx::assert_relative_eq;

    fn target(values: Vec<f64>) -> TargetVector {
        TargetVector::new(values, "test").unwrap()
    }

    #[test]
    fn beta_two_instances() {
        let w = importance_weights(&target(vec![0.1, 0.9]));
        assert_relative_eq!(w.values()[0], (0.5f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(w.values()[1], 1.0f64.exp(), epsilon = 1e-12);
    }

    #[test]
    fn beta_constant_target_uses_index_order() {
        let w = importance_weights(&target(vec![0.5; 4]));
        for (i, b) in w.values().iter().enumerate() {
            assert_relative_eq!(*b, ((i + 1) as f64 / 4.0).exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn beta_hand_arithmetic() {
        let w = importance_weights(&target(vec![0.5, 0.2, 0.8]));
        assert_relative_eq!(w.values()[0], (2.0 / 3.0f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(w.values()[1], (1.0 / 3.0f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(w.values()[2], 1.0f64.exp(), epsilon = 1e-12);
    }

    #[test]
    fn dp_binary_split() {
        let part = partition_groups(&[0, 0, 1, 1]).unwrap();
        let dp = demographic_parity(&[1.0, 1.0, 0.0, 0.0], &part).unwrap();
        assert_eq!(dp, 1.0);
    }

    #[test]
    fn dp_equal_means_is_zero() {
        let part = partition_groups(&[0, 1, 0, 1]).unwrap();
        let dp = demographic_parity(&[0.3, 0.2, 0.1, 0.2], &part).unwrap();
        assert!(dp.abs() < 1e-15);
    }

    #[test]
    fn dp_hand_arithmetic() {
        let part = partition_groups(&[0, 0, 1]).unwrap();
        let dp = demographic_parity(&[0.2, 0.4, 0.9], &part).unwrap();
        assert_relative_eq!(dp, 0.36, epsilon = 1e-12);
    }

    fn line_dataset(points: &[f64], groups: Vec<u32>) -> Dataset {
        let features = Matrix::from_vec(points.len(), 1, points.to_vec()).unwrap();
        Dataset::new("line", features, groups, None).unwrap()
    }

    #[test]
    fn pair_weights_hand_arithmetic() {
        // cross distances {0, 1, 2} -> normalized {0, 0.5, 1}
        // -> d = {1, e^{-0.5}, e^{-1}}; endpoints hit 1 and e^{-1} exactly
        let ds = line_dataset(&[0.0, 0.0, 1.0, 2.0], vec![0, 1, 1, 1]);
        let part = partition_groups(ds.groups()).unwrap();
        let blocks = pair_distance_weights(&ds, &part).unwrap();
        assert_eq!(blocks.len(), 1);
        let b = &blocks[0];
        assert_eq!(b.weight(0, 0), 1.0);
        assert_relative_eq!(b.weight(0, 1), (-0.5f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(b.weight(0, 2), (-1.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn identical_cross_distances_all_weights_one() {
        let ds = line_dataset(&[0.0, 1.0], vec![0, 1]);
        let part = partition_groups(ds.groups()).unwrap();
        let blocks = pair_distance_weights(&ds, &part).unwrap();
        assert_eq!(blocks[0].weights, vec![1.0]);
    }

    #[test]
    fn if_constant_scores_zero() {
        let ds = line_dataset(&[0.0, 1.0, 2.0, 3.0], vec![0, 1, 0, 1]);
        let part = partition_groups(ds.groups()).unwrap();
        let blocks = pair_distance_weights(&ds, &part).unwrap();
        let v = individual_fairness(&[0.4; 4], &part, &blocks).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn if_single_pair_unit_weight() {
        let ds = line_dataset(&[0.0, 5.0], vec![0, 1]);
        let part = partition_groups(ds.groups()).unwrap();
        let blocks = pair_distance_weights(&ds, &part).unwrap();
        let v = individual_fairness(&[0.0, 1.0], &part, &blocks).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn if_hand_arithmetic_with_uniform_weights() {
        // groups {0,1},{2}; y = [0.1, 0.3, 0.9]; all d = 0.5 constructed by hand
        let part = partition_groups(&[0, 0, 1]).unwrap();
        let blocks = vec![PairWeightBlock {
            group_pair: (0, 1),
            rows: vec![0, 1],
            cols: vec![2],
            weights: vec![0.5, 0.5],
        }];
        let v = individual_fairness(&[0.1, 0.3, 0.9], &part, &blocks).unwrap();
        assert_relative_eq!(v, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn missing_block_is_internal_error() {
        let part = partition_groups(&[0, 1, 2]).unwrap();
        let blocks = vec![PairWeightBlock {
            group_pair: (0, 1),
            rows: vec![0],
            cols: vec![1],
            weights: vec![1.0],
        }];
        let err = individual_fairness(&[0.0, 0.5, 1.0], &part, &blocks).unwrap_err();
        assert!(matches!(err, Error::Internal(_)));
    }

    #[test]
    fn streamed_matches_materialized() {
        let ds = line_dataset(&[0.0, 2.0, 5.0, 9.0, 1.0], vec![0, 1, 2, 0, 1]);
        let part = partition_groups(ds.groups()).unwrap();
        let src = PairBlockSource::new(&ds, &part).unwrap();
        let blocks = src.materialize();
        let y = [0.1, 0.9, 0.4, 0.2, 0.7];
        let a = individual_fairness(&y, &part, &blocks).unwrap();
        let b = individual_fairness_streamed(&y, &part, &src).unwrap();
        assert_eq!(a, b);
    }
}
