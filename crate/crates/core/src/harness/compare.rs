//! Cross-model comparison of strategies.

use serde::{Deserialize, Serialize};

use super::pipeline::{evaluate_strategies, prepare_strategies, PipelineOptions, Strategy};
use crate::dynamics::{ModelId, ModelSpec};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCell {
    pub mean_reward: f64,
    /// Mean reward relative to the best strategy on the same model.
    pub normalized: f64,
    pub full_horizon_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonMatrix {
    pub models: Vec<ModelId>,
    pub strategies: Vec<Strategy>,
    /// `cells[strategy][model]`.
    pub cells: Vec<Vec<ComparisonCell>>,
}

/// Scores `value` against the column maximum so that the best entry is 1 and
/// every other entry is at most 1. Positive maxima divide; non-positive
/// maxima use the inverse ratio so that a less negative reward still scores
/// higher.
pub fn normalize_to_best(value: f64, best: f64) -> f64 {
    if best > 0.0 {
        value / best
    } else if value == best {
        1.0
    } else if best == 0.0 {
        0.0
    } else {
        best / value
    }
}

impl ComparisonMatrix {
    /// Builds the matrix from raw `(mean_reward, full_horizon_fraction)`
    /// pairs indexed `[strategy][model]`.
    pub fn from_raw(
        models: Vec<ModelId>,
        strategies: Vec<Strategy>,
        raw: Vec<Vec<(f64, f64)>>,
    ) -> Result<Self> {
        if raw.len() != strategies.len() || raw.iter().any(|r| r.len() != models.len()) {
            return Err(Error::InvalidArgument("comparison table has the wrong shape".into()));
        }
        let best: Vec<f64> = (0..models.len())
            .map(|m| raw.iter().map(|r| r[m].0).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let cells = raw
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&best)
                    .map(|(&(mean, frac), &b)| ComparisonCell {
                        mean_reward: mean,
                        normalized: normalize_to_best(mean, b),
                        full_horizon_fraction: frac,
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            models,
            strategies,
            cells,
        })
    }
}

/// Prepares and evaluates every strategy on each model.
pub fn comparison_matrix(
    models: &[ModelId],
    opts_for: impl Fn(&ModelSpec) -> PipelineOptions,
    seed: u64,
) -> Result<ComparisonMatrix> {
    let strategies = Strategy::ALL.to_vec();
    let mut raw = vec![Vec::new(); strategies.len()];
    for &model in models {
        let spec = ModelSpec::new(model);
        let opts = opts_for(&spec);
        let prepared = prepare_strategies(&spec, &opts, derive_seed(seed, "model", model.number() as u64))?;
        let evals = evaluate_strategies(&spec, &prepared, &strategies, opts.eval_episodes)?;
        for (row, (_, s)) in raw.iter_mut().zip(evals) {
            row.push((s.mean_reward, s.full_horizon_fraction));
        }
    }
    ComparisonMatrix::from_raw(models.to_vec(), strategies, raw)
}
