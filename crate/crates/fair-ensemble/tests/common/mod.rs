//! Shared test utilities: fixture access and independent oracles.
//!
//! The oracles here deliberately avoid the library's assembly code paths:
//! gradients and objective values come from explicit instance/pair loops,
//! eigenvalues from a hand-rolled Jacobi sweep, and the minimizer is a
//! conjugate-gradient loop driven only by definitional gradient evaluations.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fair_ensemble::core::{
    partition_groups, Dataset, GroupPartition, Matrix, ScoreMatrix, TargetVector,
};
use fair_ensemble::fairness::{ImportanceWeights, PairWeightBlock};
use fair_ensemble::ingestion::load_cached;
use fair_ensemble::solver::FairnessKind;

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .expect("workspace root exists")
}

pub fn fixtures_dir() -> PathBuf {
    workspace_root().join("fixtures")
}

pub fn load_fixture(name: &str) -> Dataset {
    let path = fixtures_dir().join(format!("{name}.csv"));
    load_cached(&path).unwrap_or_else(|e| panic!("fixture {name} must load: {e}"))
}

// ---------------------------------------------------------------------------
// Random problem instances
// ---------------------------------------------------------------------------

pub struct RandomInstance {
    pub dataset: Dataset,
    pub scores: ScoreMatrix,
    pub target: TargetVector,
    pub partition: GroupPartition,
}

/// Random instance with k detectors, n instances and `groups` groups, every
/// group non-empty.
pub fn random_instance(rng: &mut ChaCha8Rng, k: usize, n: usize, groups: u32) -> RandomInstance {
    let rows: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..n).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let ids = (0..k).map(|i| format!("d{i}")).collect();
    let scores = ScoreMatrix::from_raw_rows(rows, ids).expect("valid rows");

    let mut gvec: Vec<u32> = (0..n).map(|_| rng.gen_range(0..groups)).collect();
    for g in 0..groups {
        gvec[g as usize] = g;
    }
    let feats: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..3).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect())
        .collect();
    let dataset = Dataset::new(
        "random",
        Matrix::from_rows(feats).expect("rect"),
        gvec,
        None,
    )
    .expect("valid dataset");
    let partition = partition_groups(dataset.groups()).expect(">= 2 groups");

    let t: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let target = TargetVector::new(t, "random").expect("in range");
    RandomInstance {
        dataset,
        scores,
        target,
        partition,
    }
}

// ---------------------------------------------------------------------------
// Definitional objective / gradient (independent of solver assembly)
// ---------------------------------------------------------------------------

/// Objective evaluated straight from the definitions with explicit loops.
pub struct DefinitionalObjective<'a> {
    pub scores: &'a ScoreMatrix,
    pub target: &'a TargetVector,
    /// None = unweighted fidelity.
    pub beta: Option<&'a ImportanceWeights>,
    pub partition: &'a GroupPartition,
    /// Required for the individual kind.
    pub blocks: &'a [PairWeightBlock],
    pub alpha: f64,
    pub kind: FairnessKind,
}

impl DefinitionalObjective<'_> {
    fn column(&self, j: usize) -> Vec<f64> {
        self.scores.column(j)
    }

    fn combine(&self, w: &[f64]) -> Vec<f64> {
        (0..self.scores.n())
            .map(|j| {
                self.column(j)
                    .iter()
                    .zip(w)
                    .map(|(s, wi)| s * wi)
                    .sum::<f64>()
            })
            .collect()
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        let y = self.combine(w);
        let n = self.scores.n();
        let mut f1 = 0.0;
        for j in 0..n {
            let b = self.beta.map_or(1.0, |b| b.values()[j]);
            let r = y[j] - self.target.values()[j];
            f1 += b * r * r;
        }
        f1 + self.alpha * self.f2(&y)
    }

    pub fn f2(&self, y: &[f64]) -> f64 {
        let part = self.partition;
        match self.kind {
            FairnessKind::Group => {
                let mut total = 0.0;
                for &(p, q) in part.pairs() {
                    let mp = mean_of(y, part.members(p).unwrap());
                    let mq = mean_of(y, part.members(q).unwrap());
                    total += (mp - mq) * (mp - mq);
                }
                total / part.n_pairs() as f64
            }
            FairnessKind::Individual => {
                let mut total = 0.0;
                for block in self.blocks {
                    let mut inner = 0.0;
                    for (pi, &i) in block.rows.iter().enumerate() {
                        for (qi, &j) in block.cols.iter().enumerate() {
                            let d = y[i] - y[j];
                            inner += block.weight(pi, qi) * d * d;
                        }
                    }
                    total += inner / (block.rows.len() * block.cols.len()) as f64;
                }
                total / part.n_pairs() as f64
            }
        }
    }

    pub fn gradient(&self, w: &[f64]) -> Vec<f64> {
        let k = self.scores.k();
        let n = self.scores.n();
        let y = self.combine(w);
        let mut g = vec![0.0f64; k];
        for j in 0..n {
            let b = self.beta.map_or(1.0, |b| b.values()[j]);
            let r = y[j] - self.target.values()[j];
            let col = self.column(j);
            for a in 0..k {
                g[a] += 2.0 * b * r * col[a];
            }
        }
        let part = self.partition;
        match self.kind {
            FairnessKind::Group => {
                for &(p, q) in part.pairs() {
                    let members_p = part.members(p).unwrap();
                    let members_q = part.members(q).unwrap();
                    let proj = mean_of(&y, members_p) - mean_of(&y, members_q);
                    // d_pq per detector from the definition
                    for a in 0..k {
                        let row = self.scores.row(a);
                        let dpq = mean_of(row, members_p) - mean_of(row, members_q);
                        g[a] += self.alpha / part.n_pairs() as f64 * 2.0 * proj * dpq;
                    }
                }
            }
            FairnessKind::Individual => {
                for block in self.blocks {
                    let norm = (block.rows.len() * block.cols.len()) as f64;
                    for (pi, &i) in block.rows.iter().enumerate() {
                        let col_i = self.column(i);
                        for (qi, &j) in block.cols.iter().enumerate() {
                            let d = block.weight(pi, qi);
                            let proj = y[i] - y[j];
                            let col_j = self.column(j);
                            for a in 0..k {
                                g[a] += self.alpha / part.n_pairs() as f64 * 2.0 * d * proj
                                    / norm
                                    * (col_i[a] - col_j[a]);
                            }
                        }
                    }
                }
            }
        }
        g
    }
}

fn mean_of(values: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| values[i]).sum::<f64>() / idx.len() as f64
}

/// Conjugate-gradient minimizer of a convex quadratic given only its
/// gradient. Hessian-vector products come from gradient differences
/// (exact for quadratics). Returns the minimizer.
pub fn cg_minimize(obj: &DefinitionalObjective<'_>, k: usize, tol: f64) -> Vec<f64> {
    let grad0 = obj.gradient(&vec![0.0; k]);
    let hess_vec = |v: &[f64]| -> Vec<f64> {
        let gv = obj.gradient(v);
        gv.iter().zip(&grad0).map(|(a, b)| a - b).collect()
    };
    let mut x = vec![0.0f64; k];
    // c = -grad(0); residual of H x = c
    let mut r: Vec<f64> = grad0.iter().map(|g| -g).collect();
    let mut p = r.clone();
    let mut rs_old: f64 = r.iter().map(|v| v * v).sum();
    for _restart in 0..6 {
        for _ in 0..(k + 2) {
            if rs_old.sqrt() < tol {
                return x;
            }
            let hp = hess_vec(&p);
            let denom: f64 = p.iter().zip(&hp).map(|(a, b)| a * b).sum();
            if denom.abs() < 1e-300 {
                break;
            }
            let step = rs_old / denom;
            for i in 0..k {
                x[i] += step * p[i];
                r[i] -= step * hp[i];
            }
            let rs_new: f64 = r.iter().map(|v| v * v).sum();
            let beta = rs_new / rs_old;
            for i in 0..k {
                p[i] = r[i] + beta * p[i];
            }
            rs_old = rs_new;
        }
        // restart from the true gradient to clear accumulated rounding
        let g = obj.gradient(&x);
        r = g.iter().map(|v| -v).collect();
        p = r.clone();
        rs_old = r.iter().map(|v| v * v).sum();
    }
    x
}

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

// ---------------------------------------------------------------------------
// Brute-force penalty assembly (pair-loop route)
// ---------------------------------------------------------------------------

/// O(|p||q| k^2) pairwise assembly of the individual-fairness quadratic,
/// for comparison against the blockwise production assembly.
pub fn brute_individual_quadratic(
    scores: &ScoreMatrix,
    part: &GroupPartition,
    blocks: &[PairWeightBlock],
) -> Matrix {
    let k = scores.k();
    let mut q = Matrix::zeros(k, k);
    for block in blocks {
        let norm = (block.rows.len() * block.cols.len()) as f64;
        for (pi, &i) in block.rows.iter().enumerate() {
            let si = scores.column(i);
            for (qi, &j) in block.cols.iter().enumerate() {
                let sj = scores.column(j);
                let d = block.weight(pi, qi);
                for a in 0..k {
                    for b in 0..k {
                        let v = d * (si[a] - sj[a]) * (si[b] - sj[b]) / norm;
                        q.set(a, b, q.get(a, b) + v);
                    }
                }
            }
        }
    }
    let scale = 1.0 / part.n_pairs() as f64;
    let mut out = Matrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            out.set(a, b, q.get(a, b) * scale);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Jacobi eigenvalues for symmetric matrices (PSD checks)
// ---------------------------------------------------------------------------

/// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(m: &Matrix) -> Vec<f64> {
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    for _sweep in 0..200 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[p][i];
                    let aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

// ---------------------------------------------------------------------------
// Brute-force AUC
// ---------------------------------------------------------------------------

/// Direct pair count: wins + half-ties over outlier/inlier pairs.
pub fn brute_force_auc(y: &[f64], labels: &[u8]) -> f64 {
    let mut wins = 0.0f64;
    let mut pairs = 0.0f64;
    for (i, &li) in labels.iter().enumerate() {
        if li != 1 {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj != 0 {
                continue;
            }
            pairs += 1.0;
            if y[i] > y[j] {
                wins += 1.0;
            } else if y[i] == y[j] {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Deterministic RNG for test instances.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
