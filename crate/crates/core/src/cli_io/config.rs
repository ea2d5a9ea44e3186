//! Run configuration loaded from TOML.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{ModelId, ModelParams, ModelSpec, BOUND_EPISODES, BOUND_SEED};
use crate::error::{Error, Result};
use crate::gp_smooth::{SmoothOptions, DEFAULT_SPARSE_POINTS, PROJECTION_DENSE_POINTS};
use crate::harness::{
    species_axis, PipelineOptions, StabilityOptions, Strategy, TuneOptions, DEFAULT_EVAL_EPISODES,
    DEFAULT_FRACTIONS, DEFAULT_STABILITY_ITERATIONS, DEFAULT_STRENGTHS,
};
use crate::ppo::TrainConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<Vec<f64>>,
    /// Unharvested episodes used to derive normalization bounds.
    pub bound_episodes: usize,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            horizon: None,
            thresholds: None,
            initial_state: None,
            bound_episodes: BOUND_EPISODES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub n_episodes: usize,
    /// Also write every step as gzip-compressed JSON lines.
    pub trajectories: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            n_episodes: DEFAULT_EVAL_EPISODES,
            trajectories: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilityConfig {
    pub strengths: Vec<f64>,
    pub n_samples: usize,
    pub include_variances: bool,
    /// Training iterations per perturbed sample.
    pub iterations: usize,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            strengths: DEFAULT_STRENGTHS.to_vec(),
            n_samples: 5,
            include_variances: false,
            iterations: DEFAULT_STABILITY_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TradeoffConfig {
    pub fractions: Vec<f64>,
}

impl Default for TradeoffConfig {
    fn default() -> Self {
        Self {
            fractions: DEFAULT_FRACTIONS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProjectionConfig {
    pub dense_axis: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color_axis: Option<String>,
    pub n_dense: usize,
    pub n_sparse: usize,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        Self {
            dense_axis: "X".into(),
            color_axis: None,
            n_dense: PROJECTION_DENSE_POINTS,
            n_sparse: DEFAULT_SPARSE_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BifurcationConfig {
    pub beta_h_min: f64,
    pub beta_h_max: f64,
    pub step: f64,
}

impl Default for BifurcationConfig {
    fn default() -> Self {
        Self {
            beta_h_min: 0.10,
            beta_h_max: 0.60,
            step: 0.01,
        }
    }
}

impl BifurcationConfig {
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.beta_h_max - self.beta_h_min) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| ((self.beta_h_min + i as f64 * self.step) * 1e9).round() / 1e9)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareConfig {
    pub models: Vec<ModelId>,
    /// PPO iterations for every model; unset means each model's default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            models: ModelId::ALL.to_vec(),
            iterations: None,
        }
    }
}

/// Everything a run needs. Sections left out of the file take their
/// defaults; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelId,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    /// Stored policy file used by `evaluate`, `smooth-gp` and
    /// `project-policy`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PathBuf>,
    /// Strategy to prepare when no policy file is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Strategy>,
    /// Model parameter overrides by name.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub env: EnvConfig,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default)]
    pub tune: TuneOptions,
    #[serde(default)]
    pub smooth: SmoothOptions,
    #[serde(default)]
    pub stability: StabilityConfig,
    #[serde(default)]
    pub tradeoff: TradeoffConfig,
    #[serde(default)]
    pub projection: ProjectionConfig,
    #[serde(default)]
    pub bifurcation: BifurcationConfig,
    #[serde(default)]
    pub compare: CompareConfig,
}

impl RunConfig {
    /// Defaults for `model`, already resolved.
    pub fn for_model(model: ModelId, seed: u64) -> Self {
        let mut cfg = Self {
            model,
            seed,
            out: None,
            jobs: None,
            policy: None,
            strategy: None,
            params: BTreeMap::new(),
            env: EnvConfig::default(),
            train: TrainConfig::for_model(model),
            eval: EvalConfig::default(),
            tune: TuneOptions::default(),
            smooth: SmoothOptions::default(),
            stability: StabilityConfig::default(),
            tradeoff: TradeoffConfig::default(),
            projection: ProjectionConfig::default(),
            bifurcation: BifurcationConfig::default(),
            compare: CompareConfig::default(),
        };
        cfg.train.seed = 0;
        cfg
    }

    /// Parses TOML text. A missing `train.iterations` takes the model's
    /// default budget.
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        let config_err = |message: String| Error::Config {
            path: path.to_path_buf(),
            message,
        };
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        let table: toml::Table = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        let has_iterations = table
            .get("train")
            .and_then(|t| t.as_table())
            .is_some_and(|t| t.contains_key("iterations"));
        if !has_iterations {
            cfg.train.iterations = TrainConfig::for_model(cfg.model).iterations;
        }
        cfg.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidArgument(format!("serializing config: {e}")))
    }

    /// Problem definition with overrides applied and bounds derived.
    pub fn model_spec(&self) -> Result<ModelSpec> {
        let mut spec = ModelSpec::without_bounds(self.model);
        spec.params = apply_param_overrides(&spec.params, &self.params)?;
        if let Some(h) = self.env.horizon {
            spec.horizon = h;
        }
        if let Some(t) = &self.env.thresholds {
            spec.thresholds = t.clone();
        }
        if let Some(x0) = &self.env.initial_state {
            spec.initial_state = x0.clone();
        }
        if let Some(bad) = spec.thresholds.iter().find(|&&t| !(t > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "env.thresholds must all be > 0, got {bad}"
            )));
        }
        if spec.horizon == 0 {
            return Err(Error::InvalidArgument("env.horizon must be >= 1".into()));
        }
        spec.validate()?;
        spec.derive_obs_bounds(self.env.bound_episodes, BOUND_SEED)?;
        Ok(spec)
    }

    pub fn pipeline_options(&self) -> PipelineOptions {
        PipelineOptions {
            tune: self.tune.clone(),
            train: self.train.clone(),
            smooth: self.smooth.clone(),
            eval_episodes: self.eval.n_episodes,
        }
    }

    pub fn stability_options(&self) -> StabilityOptions {
        let mut pipeline = self.pipeline_options();
        pipeline.train.iterations = self.stability.iterations;
        StabilityOptions {
            strengths: self.stability.strengths.clone(),
            n_samples: self.stability.n_samples,
            include_variances: self.stability.include_variances,
            pipeline,
        }
    }

    /// Checks every constraint, naming the offending setting.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        self.model_spec()?;
        self.train.validate()?;
        if self.eval.n_episodes == 0 {
            return bad("eval.n_episodes must be >= 1".into());
        }
        if self.tune.n_episodes == 0 {
            return bad("tune.n_episodes must be >= 1".into());
        }
        if !(self.tune.ridge_tolerance >= 0.0) {
            return bad("tune.ridge_tolerance must be >= 0".into());
        }
        if let Some(axis) = &self.tune.axis {
            if axis.is_empty() || axis.iter().any(|v| !(*v >= 0.0)) {
                return bad("tune.axis must be a non-empty list of values >= 0".into());
            }
        }
        if self.smooth.dense_points == 0 || self.smooth.sparse_points == 0 || self.smooth.window_episodes == 0 {
            return bad("smooth point and episode counts must be >= 1".into());
        }
        let q = self.smooth.quantiles;
        if !(0.0 <= q.lower && q.lower <= q.upper && q.upper <= 1.0) {
            return bad("smooth.quantiles must satisfy 0 <= lower <= upper <= 1".into());
        }
        let k = self.smooth.kernel;
        if !(k.length_scale > 0.0 && k.noise_level >= 0.0) {
            return bad("smooth.kernel needs length_scale > 0 and noise_level >= 0".into());
        }
        if self.stability.n_samples == 0 {
            return bad("stability.n_samples must be >= 1".into());
        }
        if self.stability.strengths.iter().any(|s| !(*s >= 0.0)) {
            return bad("stability.strengths must be >= 0".into());
        }
        if self.tradeoff.fractions.is_empty()
            || self.tradeoff.fractions.iter().any(|f| !(0.0..=1.0).contains(f))
        {
            return bad("tradeoff.fractions must be a non-empty list in [0, 1]".into());
        }
        let dim = ModelSpec::without_bounds(self.model).dim();
        let dense = species_axis(&self.projection.dense_axis, dim)?;
        if let Some(c) = &self.projection.color_axis {
            if species_axis(c, dim)? == dense {
                return bad("projection.color_axis must differ from projection.dense_axis".into());
            }
        }
        if self.projection.n_dense == 0 || self.projection.n_sparse == 0 {
            return bad("projection point counts must be >= 1".into());
        }
        let b = &self.bifurcation;
        if !(b.step > 0.0 && b.beta_h_min >= 0.0 && b.beta_h_min <= b.beta_h_max) {
            return bad("bifurcation needs step > 0 and 0 <= beta_h_min <= beta_h_max".into());
        }
        if self.compare.models.is_empty() {
            return bad("compare.models must not be empty".into());
        }
        if self.jobs == Some(0) {
            return bad("jobs must be >= 1".into());
        }
        Ok(())
    }
}

/// Names accepted under `[params]` for a model.
pub fn param_names(params: &ModelParams) -> Vec<String> {
    match serde_json::to_value(params) {
        Ok(serde_json::Value::Object(outer)) => outer
            .values()
            .filter_map(|v| v.as_object())
            .flat_map(|m| m.keys().cloned())
            .collect(),
        _ => Vec::new(),
    }
}

fn apply_param_overrides(params: &ModelParams, overrides: &BTreeMap<String, f64>) -> Result<ModelParams> {
    if overrides.is_empty() {
        return Ok(*params);
    }
    let mut value = serde_json::to_value(params)?;
    let inner = value
        .as_object_mut()
        .and_then(|o| o.values_mut().next())
        .and_then(|v| v.as_object_mut())
        .ok_or_else(|| Error::InvalidSpec("unexpected parameter layout".into()))?;
    for (name, v) in overrides {
        match inner.get_mut(name) {
            Some(slot) => *slot = serde_json::json!(v),
            None => {
                return Err(Error::InvalidArgument(format!(
                    "unknown parameter `{name}` in [params]; expected one of {}",
                    inner.keys().cloned().collect::<Vec<_>>().join(", ")
                )))
            }
        }
    }
    Ok(serde_json::from_value(value)?)
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
    RunConfig::from_toml_str(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{ModelId, SingleSpeciesParams, DEFAULT_HORIZON, DEFAULT_THRESHOLD};

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::from_toml_str(text, Path::new("test.toml"))
    }

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = parse("model = 1\nseed = 7\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.train.iterations, 100);
        let spec = cfg.model_spec().unwrap();
        assert_eq!(spec.horizon, DEFAULT_HORIZON);
        assert_eq!(spec.thresholds, vec![DEFAULT_THRESHOLD]);
        match spec.params {
            ModelParams::SingleSpecies(p) => assert_eq!(p, SingleSpeciesParams::default()),
            _ => panic!("wrong family"),
        }
        assert_eq!(parse("model = 4\n").unwrap().train.iterations, 300);
        assert_eq!(cfg, RunConfig::for_model(ModelId::One, 7));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse("model = 1\nfoo = 3\n").unwrap_err().to_string();
        assert!(err.contains("foo"), "{err}");
        let err = parse("model = 1\n[train]\nlearning_rat = 0.1\n").unwrap_err().to_string();
        assert!(err.contains("learning_rat"), "{err}");
        assert!(err.contains("line"), "{err}");
        let err = parse("model = 1\n[params]\nzeta = 0.1\n").unwrap_err().to_string();
        assert!(err.contains("zeta"), "{err}");
    }

    #[test]
    fn invalid_values_name_the_constraint() {
        let err = parse("model = 1\n[env]\nthresholds = [0.0]\n").unwrap_err().to_string();
        assert!(err.contains("thresholds"), "{err}");
        let err = parse("model = 2\n[train]\ngamma = 1.5\n").unwrap_err().to_string();
        assert!(err.contains("gamma"), "{err}");
        let err = parse("model = 3\n[projection]\ndense_axis = \"Y\"\ncolor_axis = \"Y\"\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("color_axis"), "{err}");
        assert!(parse("model = 5\n").is_err());
    }

    #[test]
    fn overrides_reach_the_spec() {
        let cfg = parse("model = 4\n[params]\nbeta = 0.2\nsigma2_z = 0.0\n[env]\nhorizon = 50\n").unwrap();
        let spec = cfg.model_spec().unwrap();
        assert_eq!(spec.horizon, 50);
        match spec.params {
            ModelParams::ThreeSpecies(p) => {
                assert_eq!(p.beta, 0.2);
                assert_eq!(p.sigma2_z, 0.0);
            }
            _ => panic!("wrong family"),
        }
    }

    #[test]
    fn resolved_config_roundtrips() {
        let mut cfg = parse("model = 3\nseed = 11\nstrategy = \"ppo_gp\"\n[params]\nc = 0.25\n").unwrap();
        cfg.policy = Some(PathBuf::from("p.json"));
        let text = cfg.to_toml_string().unwrap();
        let again = parse(&text).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(text, again.to_toml_string().unwrap());
    }

    #[test]
    fn bifurcation_grid_has_51_points() {
        let g = BifurcationConfig::default().grid();
        assert_eq!(g.len(), 51);
        assert!((g[50] - 0.60).abs() < 1e-12);
    }

    #[test]
    fn parameter_names_per_family() {
        let one = param_names(&ModelSpec::without_bounds(ModelId::One).params);
        assert!(one.contains(&"beta".to_string()) && one.contains(&"sigma2".to_string()));
        let three = param_names(&ModelSpec::without_bounds(ModelId::Two).params);
        assert_eq!(three.len(), 13);
    }
}
