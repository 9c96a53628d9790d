//! Base ensemble methods that turn the score matrix into the target outlier
//! vector: Maximum Combination, Average Combination and Greedy Model
//! Selection.

use crate::core::{minmax_normalize, ScoreMatrix, TargetVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseEnsembleMethod {
    Max,
    Average,
    Greedy,
}

impl BaseEnsembleMethod {
    pub fn name(&self) -> &'static str {
        match self {
            BaseEnsembleMethod::Max => "max",
            BaseEnsembleMethod::Average => "average",
            BaseEnsembleMethod::Greedy => "greedy",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(BaseEnsembleMethod::Max),
            "average" => Ok(BaseEnsembleMethod::Average),
            "greedy" => Ok(BaseEnsembleMethod::Greedy),
            other => Err(Error::InvalidConfig(format!(
                "unknown base ensemble method '{other}' (expected max|average|greedy)"
            ))),
        }
    }
}

/// Dispatch on the method enum.
pub fn build_target(scores: &ScoreMatrix, method: BaseEnsembleMethod) -> Result<TargetVector> {
    match method {
        BaseEnsembleMethod::Max => Ok(max_combination(scores)),
        BaseEnsembleMethod::Average => Ok(average_combination(scores)),
        BaseEnsembleMethod::Greedy => greedy_model_selection(scores),
    }
}

/// Per-instance maximum over detectors, divided by k, then min-max
/// renormalized into [0, 1]. The /k is a uniform scale the renormalization
/// cancels; it is kept so the pre-normalization values match the method's
/// published form.
pub fn max_combination(scores: &ScoreMatrix) -> TargetVector {
    let k = scores.k() as f64;
    let pre: Vec<f64> = (0..scores.n())
        .map(|j| {
            (0..scores.k())
                .map(|i| scores.row(i)[j])
                .fold(f64::NEG_INFINITY, f64::max)
                / k
        })
        .collect();
    let values = minmax_normalize(&pre).expect("scores are finite");
    TargetVector::new(values, "max").expect("normalized output")
}

/// Per-instance mean over detectors, min-max renormalized.
pub fn average_combination(scores: &ScoreMatrix) -> TargetVector {
    let values = minmax_normalize(&column_means(scores)).expect("scores are finite");
    TargetVector::new(values, "average").expect("normalized output")
}

fn column_means(scores: &ScoreMatrix) -> Vec<f64> {
    let k = scores.k() as f64;
    (0..scores.n())
        .map(|j| (0..scores.k()).map(|i| scores.row(i)[j]).sum::<f64>() / k)
        .collect()
}

/// Pearson correlation; defined as 0 when either side is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        let dx = a - mx;
        let dy = b - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if vx <= 0.0 || vy <= 0.0 {
        return 0.0;
    }
    cov / (vx.sqrt() * vy.sqrt())
}

/// Diversity-greedy detector selection.
///
/// A provisional target (average of all rows) orders the detectors by
/// descending correlation; the top detector seeds the ensemble and each
/// following detector is added iff it strictly decreases the mean pairwise
/// correlation among the selected rows. The target is the average of the
/// selected rows, min-max renormalized. Ties break by detector index; the
/// mean pairwise correlation of a single selected row counts as 1.
pub fn greedy_model_selection(scores: &ScoreMatrix) -> Result<TargetVector> {
    let k = scores.k();
    if k < 2 {
        return Err(Error::InvalidConfig(
            "greedy model selection requires k >= 2 detectors".into(),
        ));
    }
    let all_constant = (0..k).all(|i| row_is_constant(scores.row(i)));
    if all_constant {
        log::warn!("all detector rows constant; greedy selection falls back to average combination");
        let values = minmax_normalize(&column_means(scores)).expect("scores are finite");
        return TargetVector::new(values, "greedy(average-fallback)");
    }

    let provisional = column_means(scores);
    let mut order: Vec<usize> = (0..k).collect();
    // Descending correlation with the provisional target, index ascending on ties.
    order.sort_by(|&a, &b| {
        pearson(scores.row(b), &provisional)
            .total_cmp(&pearson(scores.row(a), &provisional))
            .then(a.cmp(&b))
    });

    let mut selected = vec![order[0]];
    let mut current_mean_corr = 1.0;
    for &cand in &order[1..] {
        let with_cand: Vec<usize> = selected.iter().copied().chain([cand]).collect();
        let new_mean = mean_pairwise_correlation(scores, &with_cand);
        if new_mean < current_mean_corr {
            selected = with_cand;
            current_mean_corr = new_mean;
        }
    }

    let n = scores.n();
    let mut pre = vec![0.0f64; n];
    for &i in &selected {
        for (j, v) in scores.row(i).iter().enumerate() {
            pre[j] += v;
        }
    }
    let count = selected.len() as f64;
    pre.iter_mut().for_each(|v| *v /= count);
    let values = minmax_normalize(&pre).expect("scores are finite");
    TargetVector::new(values, "greedy")
}

fn row_is_constant(row: &[f64]) -> bool {
    row.iter().all(|v| *v == row[0])
}

fn mean_pairwise_correlation(scores: &ScoreMatrix, members: &[usize]) -> f64 {
    let mut total = 0.0;
    let mut pairs = 0usize;
    for a in 0..members.len() {
        for b in (a + 1)..members.len() {
            total += pearson(scores.row(members[a]), scores.row(members[b]));
            pairs += 1;
        }
    }
    if pairs == 0 {
        1.0
    } else {
        total / pairs as f64
    }
}
