//! Harvest policies: maps from population states to per-species mortality
//! fractions in `[0,1]`.

mod gp;
mod mlp;

use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use gp::{GpPolicy, GpRegressor, KernelParams};
pub use mlp::{ForwardCache, MlpOutput, MlpParams, DEFAULT_HIDDEN};

use crate::dynamics::ModelSpec;
use crate::error::{Error, Result};

pub const POLICY_FILE_VERSION: u32 = 1;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Constant escapement: harvest everything above `escapement`.
pub fn cesc_act(harvested_pops: &[f64], escapement: &[f64]) -> Vec<f64> {
    harvested_pops
        .iter()
        .zip(escapement)
        .map(|(&p, &s)| if p > s && p > 0.0 { (p - s) / p } else { 0.0 })
        .collect()
}

/// Constant mortality, optionally scaled.
pub fn cmort_act(mortality: &[f64], factor: f64) -> Vec<f64> {
    mortality.iter().map(|m| m * factor).collect()
}

/// Componentwise `pops / bounds`, clamped to `[0,1]`.
pub fn normalize_state(pops: &[f64], obs_bounds: &[f64]) -> Vec<f64> {
    pops.iter()
        .zip(obs_bounds)
        .map(|(p, b)| (p / b).clamp(0.0, 1.0))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledAction {
    /// Draw clamped to `[0,1]`; what is applied to the environment.
    pub action: Vec<f64>,
    /// Unclamped draw; what the log-probability refers to.
    pub raw: Vec<f64>,
    pub log_prob: f64,
}

/// Diagonal Gaussian log-density of `x` around `mean`.
pub fn gaussian_log_prob(x: &[f64], mean: &[f64], log_std: &[f64]) -> f64 {
    x.iter()
        .zip(mean)
        .zip(log_std)
        .map(|((x, m), s)| {
            let z = (x - m) / s.exp();
            -0.5 * z * z - s - 0.5 * LN_2PI
        })
        .sum()
}

/// Draws an exploratory action; the log-probability is that of the
/// unclamped draw.
pub fn sample_action<R: Rng + ?Sized>(mean: &[f64], log_std: &[f64], rng: &mut R) -> SampledAction {
    let raw: Vec<f64> = mean
        .iter()
        .zip(log_std)
        .map(|(m, s)| {
            let z: f64 = rng.sample(StandardNormal);
            m + s.exp() * z
        })
        .collect();
    let log_prob = gaussian_log_prob(&raw, mean, log_std);
    SampledAction {
        action: raw.iter().map(|a| a.clamp(0.0, 1.0)).collect(),
        raw,
        log_prob,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    ConstantEscapement {
        escapement: Vec<f64>,
    },
    ConstantMortality {
        mortality: Vec<f64>,
    },
    ScaledMortality {
        base: Vec<f64>,
        factor: f64,
    },
    /// Neural policy acting on states normalized by `obs_bounds`.
    Mlp {
        obs_bounds: Vec<f64>,
        params: MlpParams,
    },
    /// GP-smoothed policy acting on states normalized by `obs_bounds`.
    Gp {
        obs_bounds: Vec<f64>,
        gp: GpPolicy,
    },
}

impl PolicySpec {
    pub fn family(&self) -> &'static str {
        match self {
            PolicySpec::ConstantEscapement { .. } => "cesc",
            PolicySpec::ConstantMortality { .. } => "cmort",
            PolicySpec::ScaledMortality { .. } => "scaled_cmort",
            PolicySpec::Mlp { .. } => "mlp",
            PolicySpec::Gp { .. } => "gp",
        }
    }

    pub fn n_actions(&self) -> usize {
        match self {
            PolicySpec::ConstantEscapement { escapement } => escapement.len(),
            PolicySpec::ConstantMortality { mortality } => mortality.len(),
            PolicySpec::ScaledMortality { base, .. } => base.len(),
            PolicySpec::Mlp { params, .. } => params.n_actions,
            PolicySpec::Gp { gp, .. } => gp.regressors.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        match self {
            PolicySpec::ConstantEscapement { escapement } => {
                if escapement.iter().any(|&s| !(s >= 0.0 && s.is_finite())) {
                    return Err(Error::InvalidArgument(
                        "escapement values must be finite and >= 0".into(),
                    ));
                }
            }
            PolicySpec::ConstantMortality { mortality } => {
                if !mortality.iter().all(|&m| unit(m)) {
                    return Err(Error::InvalidArgument(
                        "mortalities must lie in [0, 1]".into(),
                    ));
                }
            }
            PolicySpec::ScaledMortality { base, factor } => {
                if !base.iter().all(|&m| unit(m)) || !unit(*factor) {
                    return Err(Error::InvalidArgument(
                        "base mortalities and factor must lie in [0, 1]".into(),
                    ));
                }
            }
            PolicySpec::Mlp { obs_bounds, params } => {
                params.validate()?;
                check_bounds(obs_bounds, params.input_dim)?;
            }
            PolicySpec::Gp { obs_bounds, gp } => {
                gp.validate()?;
                check_bounds(obs_bounds, gp.regressors[0].inputs[0].len())?;
            }
        }
        if self.n_actions() == 0 {
            return Err(Error::InvalidArgument("policy has no action components".into()));
        }
        Ok(())
    }

    /// Checks that this policy fits the problem's state and action shapes.
    pub fn check_compatible(&self, spec: &ModelSpec) -> Result<()> {
        if self.n_actions() != spec.n_actions() {
            return Err(Error::Dimension {
                what: "policy action count",
                expected: spec.n_actions(),
                actual: self.n_actions(),
            });
        }
        let input = match self {
            PolicySpec::Mlp { params, .. } => Some(params.input_dim),
            PolicySpec::Gp { gp, .. } => gp.regressors.first().and_then(|r| r.inputs.first()).map(Vec::len),
            _ => None,
        };
        if let Some(d) = input {
            if d != spec.dim() {
                return Err(Error::Dimension {
                    what: "policy input dimension",
                    expected: spec.dim(),
                    actual: d,
                });
            }
        }
        Ok(())
    }

    /// Deterministic action (the mean action for the neural policy).
    pub fn act(&self, spec: &ModelSpec, pops: &[f64]) -> Result<Vec<f64>> {
        match self {
            PolicySpec::ConstantEscapement { escapement } => {
                let harvested: Vec<f64> = spec.harvested.iter().map(|&i| pops[i]).collect();
                Ok(cesc_act(&harvested, escapement))
            }
            PolicySpec::ConstantMortality { mortality } => Ok(cmort_act(mortality, 1.0)),
            PolicySpec::ScaledMortality { base, factor } => Ok(cmort_act(base, *factor)),
            PolicySpec::Mlp { obs_bounds, params } => {
                let obs = normalize_state(pops, obs_bounds);
                Ok(params.forward(&obs)?.mean)
            }
            PolicySpec::Gp { obs_bounds, gp } => gp.predict(&normalize_state(pops, obs_bounds)),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = PolicyFile {
            version: POLICY_FILE_VERSION,
            policy: self.clone(),
        };
        let text = serde_json::to_string_pretty(&file)?;
        std::fs::write(path, text)
            .map_err(|e| Error::io(format!("writing policy {}", path.display()), e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading policy {}", path.display()), e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PolicyFile = serde_json::from_str(text)?;
        if file.version != POLICY_FILE_VERSION {
            return Err(Error::PolicyVersion {
                found: file.version,
                expected: POLICY_FILE_VERSION,
            });
        }
        file.policy.validate()?;
        Ok(file.policy)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&PolicyFile {
            version: POLICY_FILE_VERSION,
            policy: self.clone(),
        })?)
    }
}

fn check_bounds(bounds: &[f64], dim: usize) -> Result<()> {
    if bounds.len() != dim {
        return Err(Error::Dimension {
            what: "obs_bounds",
            expected: dim,
            actual: bounds.len(),
        });
    }
    if bounds.iter().any(|&b| !(b > 0.0)) {
        return Err(Error::InvalidArgument("obs_bounds must be > 0".into()));
    }
    Ok(())
}

/// On-disk policy envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyFile {
    pub version: u32,
    pub policy: PolicySpec,
}
