//! Experiment configuration and trade-off grids.

use std::path::PathBuf;

use crate::base_ensemble::BaseEnsembleMethod;
use crate::core::mix_seed;
use crate::detectors::{default_grid, DetectorConfig};
use crate::error::{Error, Result};
use crate::ingestion::DatasetSpec;
use crate::solver::{FairnessKind, SolveConfig};

/// Seed substreams of one experiment seed.
pub const DETECTOR_SEED_STREAM: u64 = 0x10;
pub const INJECTION_SEED_STREAM: u64 = 0x20;
pub const COF_SEED_STREAM: u64 = 0x30;

/// Trade-off parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaGrid {
    Explicit(Vec<f64>),
    Log {
        count: usize,
        min: f64,
        max: f64,
        include_zero: bool,
    },
}

impl Default for AlphaGrid {
    /// 0 plus 50 log-spaced points in [1e-3, 1e3].
    fn default() -> Self {
        AlphaGrid::Log {
            count: 50,
            min: 1e-3,
            max: 1e3,
            include_zero: true,
        }
    }
}

impl AlphaGrid {
    /// Materialize the grid, ascending and deduplicated.
    pub fn values(&self) -> Result<Vec<f64>> {
        let mut vals = match self {
            AlphaGrid::Explicit(v) => {
                if v.is_empty() {
                    return Err(Error::InvalidConfig("alpha grid is empty".into()));
                }
                if v.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
                    return Err(Error::InvalidConfig(
                        "alpha values must be finite and >= 0".into(),
                    ));
                }
                v.clone()
            }
            AlphaGrid::Log {
                count,
                min,
                max,
                include_zero,
            } => {
                if *count == 0 {
                    return Err(Error::InvalidConfig("alpha grid count must be >= 1".into()));
                }
                if !(min.is_finite() && max.is_finite() && *min > 0.0 && max >= min) {
                    return Err(Error::InvalidConfig(
                        "log alpha grid needs 0 < min <= max".into(),
                    ));
                }
                let mut v = Vec::with_capacity(count + 1);
                if *include_zero {
                    v.push(0.0);
                }
                if *count == 1 {
                    v.push(*min);
                } else {
                    let ratio = (max / min).powf(1.0 / (*count as f64 - 1.0));
                    for i in 0..*count {
                        v.push(min * ratio.powi(i as i32));
                    }
                }
                v
            }
        };
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        Ok(vals)
    }

    pub fn includes_zero(&self) -> bool {
        match self {
            AlphaGrid::Explicit(v) => v.contains(&0.0),
            AlphaGrid::Log { include_zero, .. } => *include_zero,
        }
    }

    /// Parse `0,0.5,10` (explicit), `log:COUNT:MIN:MAX`, or the latter with
    /// a `0+` prefix to prepend zero.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (include_zero, body) = match s.strip_prefix("0+") {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        if let Some(spec) = body.strip_prefix("log:") {
            let parts: Vec<&str> = spec.split(':').collect();
            if parts.len() != 3 {
                return Err(Error::InvalidConfig(format!(
                    "bad log grid '{s}': expected log:COUNT:MIN:MAX"
                )));
            }
            let count: usize = parts[0]
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad grid count '{}'", parts[0])))?;
            let min: f64 = parts[1]
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad grid min '{}'", parts[1])))?;
            let max: f64 = parts[2]
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad grid max '{}'", parts[2])))?;
            return Ok(AlphaGrid::Log {
                count,
                min,
                max,
                include_zero,
            });
        }
        if include_zero {
            return Err(Error::InvalidConfig(format!(
                "'0+' prefix only applies to log grids: '{s}'"
            )));
        }
        let vals: Result<Vec<f64>> = body
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidConfig(format!("bad alpha value '{tok}'")))
            })
            .collect();
        Ok(AlphaGrid::Explicit(vals?))
    }

    pub fn describe(&self) -> String {
        match self {
            AlphaGrid::Explicit(v) => v
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(","),
            AlphaGrid::Log {
                count,
                min,
                max,
                include_zero,
            } => format!(
                "{}log:{count}:{min}:{max}",
                if *include_zero { "0+" } else { "" }
            ),
        }
    }
}

/// One experiment: dataset, detector grid, base ensemble, fairness kind,
/// fidelity weighting, trade-off grid and seed.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub dataset: DatasetSpec,
    /// Explicit detector grid; None derives the default 18-detector zoo
    /// from the experiment seed.
    pub detectors: Option<Vec<DetectorConfig>>,
    pub base_method: BaseEnsembleMethod,
    pub fairness: FairnessKind,
    pub weighted_f1: bool,
    pub alpha_grid: AlphaGrid,
    pub cof_samples: usize,
    pub seed: u64,
    pub standardize: bool,
    pub ridge: f64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(name: impl Into<String>, dataset: DatasetSpec, out_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            name: name.into(),
            dataset,
            detectors: None,
            base_method: BaseEnsembleMethod::Average,
            fairness: FairnessKind::Group,
            weighted_f1: true,
            alpha_grid: AlphaGrid::default(),
            cof_samples: 100,
            seed: 42,
            standardize: true,
            ridge: SolveConfig::DEFAULT_RIDGE,
            out_dir: out_dir.into(),
        }
    }

    pub fn effective_detectors(&self) -> Vec<DetectorConfig> {
        match &self.detectors {
            Some(d) => d.clone(),
            None => default_grid(mix_seed(self.seed, DETECTOR_SEED_STREAM)),
        }
    }

    pub fn solve_config(&self, alpha: f64) -> SolveConfig {
        SolveConfig {
            alpha,
            fairness_kind: self.fairness,
            weighted_f1: self.weighted_f1,
            ridge: self.ridge,
        }
    }
}
