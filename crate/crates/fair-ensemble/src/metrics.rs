//! Detection-performance and trade-off metrics.

use crate::core::EnsembleWeights;
use crate::error::{Error, Result};

/// Rank-statistic AUC with midrank tie handling: the probability that a
/// random outlier outranks a random inlier, ties counting one half.
pub fn auc(y: &[f64], labels: &[u8]) -> Result<f64> {
    if y.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: y.len(),
            context: "scores vs labels".into(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("scores contain NaN or Inf".into()));
    }
    if labels.iter().any(|l| *l > 1) {
        return Err(Error::InvalidInput("labels must be 0 or 1".into()));
    }
    let n = y.len();
    let n_pos = labels.iter().filter(|l| **l == 1).count();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InvalidInput(
            "auc needs at least one outlier and one inlier label".into(),
        ));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| y[a].total_cmp(&y[b]));

    // Midranks over tie runs, then the Mann-Whitney identity.
    let mut rank_sum_pos = 0.0f64;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && y[order[end]] == y[order[start]] {
            end += 1;
        }
        let midrank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            if labels[idx] == 1 {
                rank_sum_pos += midrank;
            }
        }
        start = end;
    }
    let n_pos_f = n_pos as f64;
    Ok((rank_sum_pos - n_pos_f * (n_pos_f + 1.0) / 2.0) / (n_pos_f * n_neg as f64))
}

/// One sample of a trade-off sweep.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub alpha: f64,
    /// Fidelity term, weighted or not per the sweep config.
    pub f1: f64,
    /// Fairness value of the configured kind.
    pub f2: f64,
    /// Demographic parity of y, always reported.
    pub dp: f64,
    /// Individual fairness of y, always reported.
    pub if_value: f64,
    /// Detection AUC; None when the dataset carries no labels.
    pub auc: Option<f64>,
    pub weights: EnsembleWeights,
    pub ridge_triggered: bool,
}

/// AUC-change threshold below which the cost of fairness is undefined.
pub const COF_AUC_EPSILON: f64 = 1e-12;

/// Cost of fairness: fairness improvement per unit of AUC degradation,
/// relative to the alpha = 0 record of the same sweep. `None` marks the
/// undefined case (no measurable AUC change); boxplot consumers drop it.
pub fn cost_of_fairness(rec0: &SweepRecord, rec: &SweepRecord) -> Result<Option<f64>> {
    let auc0 = rec0
        .auc
        .ok_or_else(|| Error::InvalidInput("cost of fairness needs AUC values".into()))?;
    let auc1 = rec
        .auc
        .ok_or_else(|| Error::InvalidInput("cost of fairness needs AUC values".into()))?;
    Ok(cof_from_values(rec0.f2, rec.f2, auc0, auc1))
}

/// Scalar form of the cof ratio.
pub fn cof_from_values(f2_base: f64, f2: f64, auc_base: f64, auc: f64) -> Option<f64> {
    let denom = auc_base - auc;
    if denom.abs() < COF_AUC_EPSILON {
        None
    } else {
        Some((f2_base - f2) / denom)
    }
}
