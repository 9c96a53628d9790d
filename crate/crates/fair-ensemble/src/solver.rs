//! Closed-form minimizers for the fairness-aware ensemble objectives.
//!
//! Both objectives are convex quadratics in the weight vector W:
//!
//!   fidelity(W)  = sum_i beta_i (W . S_.i - t_i)^2
//!   group(W)     = mean over group pairs of (W . d_pq)^2
//!   individual(W)= mean over group pairs of the weighted squared pairwise
//!                  differences, normalized per pair by |p||q|
//!
//! so the gradient is linear in W and the minimizer solves the normal
//! system (S diag(beta) S^T + alpha * Q) W = S diag(beta) t, where Q is the
//! penalty quadratic of the chosen fairness measure. The individual-fairness
//! quadratic is assembled blockwise per group pair; the assembled system is
//! k x k regardless of n.

use crate::core::{
    solve_linear, EnsembleWeights, GroupPartition, KahanSum, Matrix, ScoreMatrix, TargetVector,
};
use crate::error::{Error, Result};
use crate::fairness::{
    demographic_parity, individual_fairness_streamed, ImportanceWeights, PairBlockSource,
    PairWeightBlock,
};

/// Which fairness measure the penalty encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FairnessKind {
    Group,
    Individual,
}

impl FairnessKind {
    pub fn name(&self) -> &'static str {
        match self {
            FairnessKind::Group => "group",
            FairnessKind::Individual => "individual",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "group" => Ok(FairnessKind::Group),
            "individual" => Ok(FairnessKind::Individual),
            other => Err(Error::InvalidConfig(format!(
                "unknown fairness kind '{other}' (expected group|individual)"
            ))),
        }
    }
}

/// Solve parameters: trade-off weight, fairness kind, fidelity weighting and
/// the ridge added to the normal system.
#[derive(Debug, Clone, Copy)]
pub struct SolveConfig {
    pub alpha: f64,
    pub fairness_kind: FairnessKind,
    pub weighted_f1: bool,
    pub ridge: f64,
}

impl SolveConfig {
    pub const DEFAULT_RIDGE: f64 = 1e-8;

    pub fn new(alpha: f64, fairness_kind: FairnessKind) -> Self {
        SolveConfig {
            alpha,
            fairness_kind,
            weighted_f1: true,
            ridge: Self::DEFAULT_RIDGE,
        }
    }

    pub fn unweighted(mut self) -> Self {
        self.weighted_f1 = false;
        self
    }

    pub fn with_ridge(mut self, ridge: f64) -> Self {
        self.ridge = ridge;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidConfig("alpha must be finite and >= 0".into()));
        }
        if !(self.ridge.is_finite() && self.ridge >= 0.0) {
            return Err(Error::InvalidConfig("ridge must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Solved weights plus whether the ridge fallback fired.
#[derive(Debug, Clone)]
pub struct EnsembleSolution {
    pub weights: EnsembleWeights,
    pub ridge_triggered: bool,
}

/// Group-fairness penalty quadratic Q with DP(W^T S) = W^T Q W:
/// mean over group pairs of the outer product of group score-mean
/// differences.
pub fn group_quadratic(scores: &ScoreMatrix, part: &GroupPartition) -> Result<Matrix> {
    check_lengths(scores, part)?;
    let k = scores.k();
    let mut q = Matrix::zeros(k, k);
    for &(p, gq) in part.pairs() {
        let d = group_mean_difference(scores, part, p, gq);
        for a in 0..k {
            for b in 0..k {
                q.set(a, b, q.get(a, b) + d[a] * d[b]);
            }
        }
    }
    scale_in_place(&mut q, 1.0 / part.n_pairs() as f64);
    Ok(q)
}

/// d_pq: mean of score columns in group p minus mean in group q.
pub fn group_mean_difference(
    scores: &ScoreMatrix,
    part: &GroupPartition,
    p: u32,
    q: u32,
) -> Vec<f64> {
    let k = scores.k();
    let members_p = part.members(p).expect("group id valid");
    let members_q = part.members(q).expect("group id valid");
    let mut d = vec![0.0f64; k];
    for a in 0..k {
        let row = scores.row(a);
        let mp = members_p.iter().map(|&j| row[j]).sum::<f64>() / members_p.len() as f64;
        let mq = members_q.iter().map(|&j| row[j]).sum::<f64>() / members_q.len() as f64;
        d[a] = mp - mq;
    }
    d
}

/// Individual-fairness penalty quadratic with IF(W^T S) = W^T Q W,
/// assembled one group-pair block at a time.
pub fn individual_quadratic(
    scores: &ScoreMatrix,
    part: &GroupPartition,
    source: &PairBlockSource<'_>,
) -> Result<Matrix> {
    check_lengths(scores, part)?;
    let k = scores.k();
    let mut q = Matrix::zeros(k, k);
    source.for_each(|block| accumulate_block(&mut q, scores, block));
    scale_in_place(&mut q, 1.0 / part.n_pairs() as f64);
    Ok(q)
}

/// Same quadratic from materialized blocks.
pub fn individual_quadratic_from_blocks(
    scores: &ScoreMatrix,
    part: &GroupPartition,
    blocks: &[PairWeightBlock],
) -> Result<Matrix> {
    check_lengths(scores, part)?;
    if blocks.len() != part.n_pairs() {
        return Err(Error::Internal(format!(
            "expected {} pair weight blocks, got {}",
            part.n_pairs(),
            blocks.len()
        )));
    }
    let k = scores.k();
    let mut q = Matrix::zeros(k, k);
    for block in blocks {
        accumulate_block(&mut q, scores, block);
    }
    scale_in_place(&mut q, 1.0 / part.n_pairs() as f64);
    Ok(q)
}

/// Adds P_pq / (|p||q|) where
/// P_pq = sum_{i in p, j in q} d_ij (S_.i - S_.j)(S_.i - S_.j)^T.
///
/// Expanded into marginal and cross terms so the cost is
/// O(|p||q|k + (|p|+|q|)k^2) rather than O(|p||q|k^2):
/// P = sum_i r_i s_i s_i^T + sum_j c_j s_j s_j^T - C - C^T with
/// r_i (c_j) the block row (column) sums and C = S_p D S_q^T.
fn accumulate_block(q: &mut Matrix, scores: &ScoreMatrix, block: &PairWeightBlock) {
    let k = scores.k();
    let np = block.rows.len();
    let nq = block.cols.len();
    let scale = 1.0 / (np * nq) as f64;

    let mut row_sums = vec![0.0f64; np];
    let mut col_sums = vec![0.0f64; nq];
    for pi in 0..np {
        for qi in 0..nq {
            let w = block.weight(pi, qi);
            row_sums[pi] += w;
            col_sums[qi] += w;
        }
    }

    // Marginal terms.
    let mut marginal = Matrix::zeros(k, k);
    add_weighted_outer_products(&mut marginal, scores, &block.rows, &row_sums);
    add_weighted_outer_products(&mut marginal, scores, &block.cols, &col_sums);

    // Cross term C = S_p D S_q^T via tmp = S_p D (k x |q|).
    let mut tmp = Matrix::zeros(k, nq);
    for (pi, &i) in block.rows.iter().enumerate() {
        for a in 0..k {
            let s_ai = scores.row(a)[i];
            if s_ai == 0.0 {
                continue;
            }
            let tmp_row = tmp.row_mut(a);
            for qi in 0..nq {
                tmp_row[qi] += s_ai * block.weight(pi, qi);
            }
        }
    }
    let mut cross = Matrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            let row_b = scores.row(b);
            let mut acc = 0.0;
            for (qi, &j) in block.cols.iter().enumerate() {
                acc += tmp.get(a, qi) * row_b[j];
            }
            cross.set(a, b, acc);
        }
    }

    for a in 0..k {
        for b in 0..k {
            let p_ab = marginal.get(a, b) - cross.get(a, b) - cross.get(b, a);
            q.set(a, b, q.get(a, b) + scale * p_ab);
        }
    }
}

fn add_weighted_outer_products(
    acc: &mut Matrix,
    scores: &ScoreMatrix,
    indices: &[usize],
    weights: &[f64],
) {
    let k = scores.k();
    for (pos, &i) in indices.iter().enumerate() {
        let w = weights[pos];
        for a in 0..k {
            let sa = scores.row(a)[i];
            if sa == 0.0 {
                continue;
            }
            let wsa = w * sa;
            for b in a..k {
                let v = wsa * scores.row(b)[i];
                acc.set(a, b, acc.get(a, b) + v);
                if a != b {
                    acc.set(b, a, acc.get(b, a) + v);
                }
            }
        }
    }
}

fn scale_in_place(m: &mut Matrix, factor: f64) {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            m.set(i, j, m.get(i, j) * factor);
        }
    }
}

/// Normal system (A, b) of the scalarized objective:
/// A = S diag(beta) S^T + alpha * penalty, b = S diag(beta) t.
/// With `weighted_f1 = false` the beta weighting is the identity.
pub fn assemble_system(
    scores: &ScoreMatrix,
    target: &TargetVector,
    beta: &ImportanceWeights,
    penalty: &Matrix,
    cfg: &SolveConfig,
) -> Result<(Matrix, Vec<f64>)> {
    cfg.validate()?;
    let k = scores.k();
    let n = scores.n();
    if target.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: target.len(),
            context: "target vs score matrix".into(),
        });
    }
    if beta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: beta.len(),
            context: "importance weights vs score matrix".into(),
        });
    }
    if penalty.rows() != k || penalty.cols() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: penalty.rows(),
            context: "penalty quadratic size".into(),
        });
    }

    let unit = ImportanceWeights::unit(n);
    let bw = if cfg.weighted_f1 {
        beta.values()
    } else {
        unit.values()
    };

    let mut a = Matrix::zeros(k, k);
    for r in 0..k {
        let row_r = scores.row(r);
        for c in r..k {
            let row_c = scores.row(c);
            let mut acc = 0.0;
            for j in 0..n {
                acc += bw[j] * row_r[j] * row_c[j];
            }
            let v = acc + cfg.alpha * penalty.get(r, c);
            a.set(r, c, v);
            if r != c {
                a.set(c, r, acc + cfg.alpha * penalty.get(c, r));
            }
        }
    }

    let mut b = vec![0.0f64; k];
    for (r, slot) in b.iter_mut().enumerate() {
        let row = scores.row(r);
        let mut acc = 0.0;
        for j in 0..n {
            acc += bw[j] * row[j] * target.values()[j];
        }
        *slot = acc;
    }
    Ok((a, b))
}

/// Solve the normal system for a prebuilt penalty quadratic.
pub fn solve_with_penalty(
    scores: &ScoreMatrix,
    target: &TargetVector,
    beta: &ImportanceWeights,
    penalty: &Matrix,
    cfg: &SolveConfig,
) -> Result<EnsembleSolution> {
    let (a, b) = assemble_system(scores, target, beta, penalty, cfg)?;
    let sol = solve_linear(&a, &b, cfg.ridge)?;
    Ok(EnsembleSolution {
        weights: EnsembleWeights::new(sol.x)?,
        ridge_triggered: sol.ridge_fallback,
    })
}

/// Closed-form minimizer of the group-fairness objective.
pub fn solve_group(
    scores: &ScoreMatrix,
    target: &TargetVector,
    beta: &ImportanceWeights,
    part: &GroupPartition,
    cfg: &SolveConfig,
) -> Result<EnsembleSolution> {
    expect_kind(cfg, FairnessKind::Group)?;
    let penalty = group_quadratic(scores, part)?;
    solve_with_penalty(scores, target, beta, &penalty, cfg)
}

/// Closed-form minimizer of the individual-fairness objective.
pub fn solve_individual(
    scores: &ScoreMatrix,
    target: &TargetVector,
    beta: &ImportanceWeights,
    part: &GroupPartition,
    blocks: &[PairWeightBlock],
    cfg: &SolveConfig,
) -> Result<EnsembleSolution> {
    expect_kind(cfg, FairnessKind::Individual)?;
    let penalty = individual_quadratic_from_blocks(scores, part, blocks)?;
    solve_with_penalty(scores, target, beta, &penalty, cfg)
}

fn expect_kind(cfg: &SolveConfig, kind: FairnessKind) -> Result<()> {
    if cfg.fairness_kind != kind {
        return Err(Error::InvalidConfig(format!(
            "solve called for {} fairness with a {} config",
            kind.name(),
            cfg.fairness_kind.name()
        )));
    }
    Ok(())
}

/// y = W^T S.
pub fn combine(weights: &EnsembleWeights, scores: &ScoreMatrix) -> Result<Vec<f64>> {
    if weights.len() != scores.k() {
        return Err(Error::DimensionMismatch {
            expected: scores.k(),
            got: weights.len(),
            context: "weights vs score matrix".into(),
        });
    }
    let n = scores.n();
    let mut y = vec![0.0f64; n];
    for (i, &w) in weights.values().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (j, v) in scores.row(i).iter().enumerate() {
            y[j] += w * v;
        }
    }
    Ok(y)
}

/// Fidelity and fairness values at W, both evaluated from their
/// definitions (instance and pair loops), independent of the assembled
/// normal system.
pub fn objective_terms(
    weights: &EnsembleWeights,
    scores: &ScoreMatrix,
    target: &TargetVector,
    beta: &ImportanceWeights,
    part: &GroupPartition,
    pair_source: Option<&PairBlockSource<'_>>,
    cfg: &SolveConfig,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    let y = combine(weights, scores)?;
    let unit = ImportanceWeights::unit(scores.n());
    let bw = if cfg.weighted_f1 {
        beta.values()
    } else {
        unit.values()
    };
    let mut f1 = KahanSum::new();
    for j in 0..scores.n() {
        let r = y[j] - target.values()[j];
        f1.add(bw[j] * r * r);
    }
    let f2 = match cfg.fairness_kind {
        FairnessKind::Group => demographic_parity(&y, part)?,
        FairnessKind::Individual => {
            let source = pair_source.ok_or_else(|| {
                Error::InvalidConfig(
                    "individual fairness objective needs a pair-weight source".into(),
                )
            })?;
            individual_fairness_streamed(&y, part, source)?
        }
    };
    Ok((f1.total(), f2))
}

fn check_lengths(scores: &ScoreMatrix, part: &GroupPartition) -> Result<()> {
    if scores.n() != part.n() {
        return Err(Error::DimensionMismatch {
            expected: part.n(),
            got: scores.n(),
            context: "score matrix vs partition".into(),
        });
    }
    Ok(())
}

/// Helper for stationarity checks: infinity norm of the gradient
/// residual A w - b of the assembled system.
pub fn stationarity_residual(a: &Matrix, b: &[f64], w: &EnsembleWeights) -> f64 {
    let k = a.rows();
    let mut worst = 0.0f64;
    for i in 0..k {
        let mut acc = 0.0;
        for j in 0..k {
            acc += a.get(i, j) * w.values()[j];
        }
        worst = worst.max((acc - b[i]).abs());
    }
    worst
}
