//! Experiment harness: evaluation, tuning and comparisons across policies.

mod compare;
mod eval;
mod pipeline;
mod stability;
mod stats;
mod tradeoff;
mod tune;

pub use compare::{comparison_matrix, normalize_to_best, ComparisonCell, ComparisonMatrix};
pub use eval::{
    evaluate, evaluate_with_trajectories, mean_sd, EpisodeOutcome, EvalSummary, Trajectory,
};
pub use pipeline::{
    evaluate_strategies, prepare_strategies, prepare_without_cmort, PipelineOptions,
    PreparedStrategies, StageSeeds, Strategy, DEFAULT_EVAL_EPISODES,
};
pub use stability::{
    perturb_params, perturbed_spec, stability_analysis, StabilityAggregate, StabilityOptions,
    StabilityReport, StabilitySample, DEFAULT_STABILITY_ITERATIONS, DEFAULT_STRENGTHS,
};
pub use stats::{welch, WelchResult};
pub use tradeoff::{
    mortality_tradeoff, policy_projection, policy_projection_with, species_axis, Projection,
    ProjectionRow, TradeoffRow, DEFAULT_FRACTIONS,
};
pub use tune::{
    tune, tune_cesc, tune_cmort, GridPoint, TuneFamily, TuneOptions, TuneReport,
    DEFAULT_RIDGE_TOLERANCE, DEFAULT_TUNE_EPISODES,
};
