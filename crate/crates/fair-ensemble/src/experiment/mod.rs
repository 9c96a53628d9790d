//! Experiment runner: builds the score matrix and target once, sweeps the
//! trade-off parameter, and emits plot-ready CSV plus a metadata echo
//! sufficient to re-run the experiment exactly.

mod config;
mod report;

pub use config::{
    AlphaGrid, ExperimentConfig, COF_SEED_STREAM, DETECTOR_SEED_STREAM, INJECTION_SEED_STREAM,
};
pub use report::{read_to_string_normalized, write_cof_csv, write_meta, write_summary_csv, write_sweep_csv};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::base_ensemble::build_target;
use crate::core::{
    mix_seed, partition_groups, Dataset, GroupPartition, KahanSum, Matrix, ScoreMatrix,
    TargetVector,
};
use crate::detectors::build_score_matrix;
use crate::error::{Error, Result};
use crate::fairness::{
    demographic_parity, importance_weights, individual_fairness, individual_fairness_streamed,
    ImportanceWeights, PairBlockSource, PairWeightBlock,
};
use crate::ingestion::{file_sha256, load_dataset, GroupRule};
use crate::metrics::{auc, cof_from_values, SweepRecord};
use crate::solver::{
    combine, group_quadratic, individual_quadratic, solve_with_penalty, FairnessKind,
};

/// Cross-group pair budget under which pair-weight blocks are materialized
/// once instead of being re-streamed per evaluation.
const MATERIALIZE_PAIR_BUDGET: usize = 2_000_000;

/// Everything computed once per experiment and shared across alpha points.
pub struct Prepared {
    pub dataset: Dataset,
    pub partition: GroupPartition,
    pub scores: ScoreMatrix,
    pub target: TargetVector,
    pub beta: ImportanceWeights,
    /// Penalty quadratic of the configured fairness kind.
    pub penalty: Matrix,
    /// Global (min, range) of cross-group distances.
    pair_scale: (f64, f64),
    /// Materialized pair blocks when the pair budget allows.
    pair_blocks: Option<Vec<PairWeightBlock>>,
    /// Source checksum recorded in metadata.
    pub dataset_checksum: String,
}

impl Prepared {
    fn pair_source(&self) -> PairBlockSource<'_> {
        PairBlockSource::from_scale_parts(
            &self.dataset,
            &self.partition,
            self.pair_scale.0,
            self.pair_scale.1,
        )
    }

    fn individual_fairness_of(&self, y: &[f64]) -> Result<f64> {
        match &self.pair_blocks {
            Some(blocks) => individual_fairness(y, &self.partition, blocks),
            None => individual_fairness_streamed(y, &self.partition, &self.pair_source()),
        }
    }
}

/// Load, preprocess, score and assemble the penalty for one experiment.
pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    let raw = load_dataset(&cfg.dataset).map_err(|e| e.in_stage("ingestion"))?;
    let dataset_checksum =
        file_sha256(&cfg.dataset.source_path).map_err(|e| e.in_stage("ingestion"))?;
    let dataset = if cfg.standardize {
        raw.standardized()
    } else {
        raw
    };
    let partition =
        partition_groups(dataset.groups()).map_err(|e| e.in_stage("partition"))?;
    let detectors = cfg.effective_detectors();
    let scores =
        build_score_matrix(&dataset, &detectors).map_err(|e| e.in_stage("detectors"))?;
    let target =
        build_target(&scores, cfg.base_method).map_err(|e| e.in_stage("base_ensemble"))?;
    let beta = importance_weights(&target);

    let source =
        PairBlockSource::new(&dataset, &partition).map_err(|e| e.in_stage("pair_weights"))?;
    let pair_scale = source.scale_parts();
    let total_pairs: usize = partition
        .pairs()
        .iter()
        .map(|&(p, q)| {
            partition.members(p).map_or(0, <[usize]>::len)
                * partition.members(q).map_or(0, <[usize]>::len)
        })
        .sum();
    let pair_blocks = (total_pairs <= MATERIALIZE_PAIR_BUDGET).then(|| source.materialize());

    let penalty = match cfg.fairness {
        FairnessKind::Group => {
            group_quadratic(&scores, &partition).map_err(|e| e.in_stage("penalty"))?
        }
        FairnessKind::Individual => {
            individual_quadratic(&scores, &partition, &source).map_err(|e| e.in_stage("penalty"))?
        }
    };

    Ok(Prepared {
        dataset,
        partition,
        scores,
        target,
        beta,
        penalty,
        pair_scale,
        pair_blocks,
        dataset_checksum,
    })
}

/// Solve one alpha point and evaluate every reported quantity.
fn record_at_alpha(cfg: &ExperimentConfig, prep: &Prepared, alpha: f64) -> Result<SweepRecord> {
    let solve_cfg = cfg.solve_config(alpha);
    let solution = solve_with_penalty(
        &prep.scores,
        &prep.target,
        &prep.beta,
        &prep.penalty,
        &solve_cfg,
    )
    .map_err(|e| e.in_stage("solver"))?;
    let y = combine(&solution.weights, &prep.scores).map_err(|e| e.in_stage("solver"))?;

    let f1 = fidelity_term(
        &y,
        prep.target.values(),
        cfg.weighted_f1.then(|| prep.beta.values()),
    );
    let dp = demographic_parity(&y, &prep.partition).map_err(|e| e.in_stage("fairness"))?;
    let if_value = prep
        .individual_fairness_of(&y)
        .map_err(|e| e.in_stage("fairness"))?;
    let f2 = match cfg.fairness {
        FairnessKind::Group => dp,
        FairnessKind::Individual => if_value,
    };
    let auc_value = match prep.dataset.labels() {
        Some(labels) => Some(auc(&y, labels).map_err(|e| e.in_stage("metrics"))?),
        None => None,
    };
    Ok(SweepRecord {
        alpha,
        f1,
        f2,
        dp,
        if_value,
        auc: auc_value,
        weights: solution.weights,
        ridge_triggered: solution.ridge_triggered,
    })
}

/// Weighted (or plain) squared residual against the target.
fn fidelity_term(y: &[f64], target: &[f64], beta: Option<&[f64]>) -> f64 {
    let mut acc = KahanSum::new();
    for j in 0..y.len() {
        let r = y[j] - target[j];
        let w = beta.map_or(1.0, |b| b[j]);
        acc.add(w * r * r);
    }
    acc.total()
}

/// Sweep the config's alpha grid over a prepared experiment. Alpha points
/// run in parallel; records come back keyed and sorted by alpha.
pub fn sweep_records(cfg: &ExperimentConfig, prep: &Prepared) -> Result<Vec<SweepRecord>> {
    let alphas = cfg.alpha_grid.values()?;
    let results: Vec<Result<SweepRecord>> = alphas
        .par_iter()
        .map(|&alpha| record_at_alpha(cfg, prep, alpha))
        .collect();
    let mut records = Vec::with_capacity(results.len());
    for r in results {
        records.push(r?);
    }
    records.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    Ok(records)
}

/// Full sweep: prepare, solve the grid, write `sweep.csv` and `meta.txt`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    let prep = prepare(cfg)?;
    let records = sweep_records(cfg, &prep)?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    write_sweep_csv(&cfg.out_dir.join("sweep.csv"), &records, prep.scores.k())?;
    write_meta(&cfg.out_dir.join("meta.txt"), &meta_pairs(cfg, &prep, None))?;
    Ok(records)
}

/// One cost-of-fairness sample: both fidelity variants at the same alpha.
#[derive(Debug, Clone)]
pub struct CofSample {
    pub alpha: f64,
    pub weighted: Option<f64>,
    pub unweighted: Option<f64>,
}

/// Cost-of-fairness run: seeded log-uniform alpha samples, each solved under
/// the weighted and the unweighted fidelity against that framework's own
/// alpha = 0 baseline. Writes `cof.csv` and `meta.txt`.
pub fn run_cof(cfg: &ExperimentConfig) -> Result<Vec<CofSample>> {
    if cfg.cof_samples == 0 {
        return Err(Error::InvalidConfig("cof needs at least one sample".into()));
    }
    if !cfg.alpha_grid.includes_zero() {
        return Err(Error::InvalidConfig(
            "cof runs require an alpha grid containing 0 (the baseline)".into(),
        ));
    }
    let prep = prepare(cfg)?;
    if prep.dataset.labels().is_none() {
        return Err(Error::InvalidConfig(
            "cost of fairness needs ground-truth labels for AUC".into(),
        ));
    }

    let (lo, hi) = cof_alpha_range(&cfg.alpha_grid);
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, COF_SEED_STREAM));
    let mut alphas: Vec<f64> = (0..cfg.cof_samples)
        .map(|_| {
            let u: f64 = rng.gen();
            lo * (hi / lo).powf(u)
        })
        .collect();
    alphas.sort_by(f64::total_cmp);

    // One detector pass feeds both frameworks; only the solve differs.
    let mut weighted_cfg = cfg.clone();
    weighted_cfg.weighted_f1 = true;
    let mut unweighted_cfg = cfg.clone();
    unweighted_cfg.weighted_f1 = false;

    let base_w = record_at_alpha(&weighted_cfg, &prep, 0.0)?;
    let base_u = record_at_alpha(&unweighted_cfg, &prep, 0.0)?;
    let (bw_f2, bw_auc) = (base_w.f2, base_w.auc.expect("labels checked above"));
    let (bu_f2, bu_auc) = (base_u.f2, base_u.auc.expect("labels checked above"));

    let samples: Vec<Result<CofSample>> = alphas
        .par_iter()
        .map(|&alpha| {
            let rw = record_at_alpha(&weighted_cfg, &prep, alpha)?;
            let ru = record_at_alpha(&unweighted_cfg, &prep, alpha)?;
            Ok(CofSample {
                alpha,
                weighted: cof_from_values(bw_f2, rw.f2, bw_auc, rw.auc.expect("labels present")),
                unweighted: cof_from_values(bu_f2, ru.f2, bu_auc, ru.auc.expect("labels present")),
            })
        })
        .collect();
    let mut out = Vec::with_capacity(samples.len());
    for s in samples {
        out.push(s?);
    }

    std::fs::create_dir_all(&cfg.out_dir)?;
    write_cof_csv(&cfg.out_dir.join("cof.csv"), &out)?;
    write_meta(
        &cfg.out_dir.join("meta.txt"),
        &meta_pairs(cfg, &prep, Some((lo, hi))),
    )?;
    Ok(out)
}

fn cof_alpha_range(grid: &AlphaGrid) -> (f64, f64) {
    match grid {
        AlphaGrid::Log { min, max, .. } => (*min, *max),
        AlphaGrid::Explicit(_) => (1e-3, 1e3),
    }
}

/// Outcome of one config inside a batch run.
#[derive(Debug, Clone)]
pub struct ConfigOutcome {
    pub name: String,
    pub dataset: String,
    pub base_method: String,
    pub fairness: String,
    pub weighted_f1: bool,
    pub endpoints: std::result::Result<Endpoints, String>,
}

/// First/last sweep rows of a config, for the summary table.
#[derive(Debug, Clone)]
pub struct Endpoints {
    pub f2_alpha0: f64,
    pub f2_alpha_max: f64,
    pub auc_alpha0: Option<f64>,
    pub auc_alpha_max: Option<f64>,
    pub ridge_any: bool,
}

/// Run every config (parallel across configs), recording per-config
/// failures instead of aborting, and write `summary.csv`.
pub fn run_all(configs: &[ExperimentConfig], summary_path: &std::path::Path) -> Result<Vec<ConfigOutcome>> {
    let outcomes: Vec<ConfigOutcome> = configs
        .par_iter()
        .map(|cfg| {
            let endpoints = run_sweep(cfg)
                .map(|records| {
                    let first = records.first().expect("grid is non-empty");
                    let last = records.last().expect("grid is non-empty");
                    Endpoints {
                        f2_alpha0: first.f2,
                        f2_alpha_max: last.f2,
                        auc_alpha0: first.auc,
                        auc_alpha_max: last.auc,
                        ridge_any: records.iter().any(|r| r.ridge_triggered),
                    }
                })
                .map_err(|e| e.to_string());
            ConfigOutcome {
                name: cfg.name.clone(),
                dataset: cfg.dataset.name.clone(),
                base_method: cfg.base_method.name().to_string(),
                fairness: cfg.fairness.name().to_string(),
                weighted_f1: cfg.weighted_f1,
                endpoints,
            }
        })
        .collect();
    if let Some(dir) = summary_path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    write_summary_csv(summary_path, &outcomes)?;
    Ok(outcomes)
}

/// Metadata echo written beside every output file.
fn meta_pairs(
    cfg: &ExperimentConfig,
    prep: &Prepared,
    cof_range: Option<(f64, f64)>,
) -> Vec<(String, String)> {
    let mut pairs: Vec<(String, String)> = vec![
        ("tool".into(), format!("fair-ensemble {}", env!("CARGO_PKG_VERSION"))),
        ("experiment".into(), cfg.name.clone()),
        ("dataset_name".into(), cfg.dataset.name.clone()),
        ("dataset_kind".into(), cfg.dataset.kind.name().into()),
        (
            "dataset_path".into(),
            cfg.dataset.source_path.display().to_string(),
        ),
        ("dataset_checksum".into(), format!("sha256:{}", prep.dataset_checksum)),
        ("n_instances".into(), prep.dataset.n().to_string()),
        ("n_features".into(), prep.dataset.n_features().to_string()),
        ("n_groups".into(), prep.partition.n_groups().to_string()),
        (
            "group_sizes".into(),
            prep.partition
                .groups()
                .map(|(_, m)| m.len().to_string())
                .collect::<Vec<_>>()
                .join(","),
        ),
        ("n_detectors".into(), prep.scores.k().to_string()),
        (
            "detectors".into(),
            prep.scores.detector_ids().join(","),
        ),
        ("base_method".into(), cfg.base_method.name().into()),
        ("fairness".into(), cfg.fairness.name().into()),
        ("weighted_f1".into(), cfg.weighted_f1.to_string()),
        ("alpha_grid".into(), cfg.alpha_grid.describe()),
        ("seed".into(), cfg.seed.to_string()),
        ("standardize".into(), cfg.standardize.to_string()),
        ("ridge".into(), cfg.ridge.to_string()),
        ("target_source".into(), prep.target.source().into()),
    ];
    if let GroupRule::Synthetic {
        v_groups,
        bias_strength,
        seed,
    } = cfg.dataset.group_rule
    {
        pairs.push(("injection_v_groups".into(), v_groups.to_string()));
        pairs.push(("injection_bias_strength".into(), bias_strength.to_string()));
        pairs.push(("injection_seed".into(), seed.to_string()));
    }
    if let Some((lo, hi)) = cof_range {
        pairs.push(("cof_samples".into(), cfg.cof_samples.to_string()));
        pairs.push(("cof_alpha_min".into(), lo.to_string()));
        pairs.push(("cof_alpha_max".into(), hi.to_string()));
    }
    pairs
}
