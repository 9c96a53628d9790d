//! Fairness-aware outlier ensembles.
//!
//! Turns the result of a conventional outlier ensemble into a fairness-aware
//! one by re-weighting base detector scores in closed form. The pipeline:
//!
//! 1. base detectors (LOF, kNN-distance, Isolation Forest) produce a
//!    normalized score matrix S;
//! 2. a base ensemble method (max / average / greedy diversity selection)
//!    produces the target vector t;
//! 3. a convex objective trades fidelity to t against a fairness penalty
//!    (demographic parity across protected groups, or similarity-weighted
//!    individual fairness), tuned by a trade-off parameter alpha;
//! 4. the minimizing ensemble weights solve a k x k normal system.
//!
//! The [`experiment`] module sweeps alpha and emits plot-ready CSV for
//! trade-off curves, bias-vs-AUC analyses and cost-of-fairness comparisons.

pub mod base_ensemble;
pub mod core;
pub mod detectors;
pub mod error;
pub mod experiment;
pub mod fairness;
pub mod ingestion;
pub mod metrics;
pub mod solver;

pub use crate::core::{
    minmax_normalize, mix_seed, partition_groups, solve_linear, Dataset, EnsembleWeights,
    GroupPartition, LinearSolution, Matrix, ScoreMatrix, TargetVector,
};
pub use crate::error::{Error, Result};
