//! Stochastic fishery models.
//!
//! Every model is a first-order stochastic difference equation
//! `N_{t+1} = N_t + f(N_t) + eta_t - M N_t`. A time step is split into a
//! harvest sub-step (each harvested population loses the fraction `M`) followed
//! by a recruitment sub-step (natural increment plus Gaussian noise, clamped
//! at zero).

mod bifurcation;
mod params;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use bifurcation::{fixed_points_model1, BifurcationRow, Equilibrium};
pub use params::{SingleSpeciesParams, ThreeSpeciesParams};

use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, SimRng};

/// Scale of the near-extinction penalty, awarded as `-PENALTY_SCALE / t`.
pub const PENALTY_SCALE: f64 = 100.0;
pub const DEFAULT_HORIZON: usize = 200;
pub const DEFAULT_THRESHOLD: f64 = 0.05;
/// Episodes simulated when deriving default normalization bounds.
pub const BOUND_EPISODES: usize = 100;
/// Fixed seed for default normalization bounds, so defaults are reproducible.
pub const BOUND_SEED: u64 = 0;

pub const SPECIES_NAMES: [&str; 3] = ["X", "Y", "Z"];

/// Logistic growth increment `r x (1 - x/K)`.
pub fn logistic(x: f64, r: f64, k: f64) -> f64 {
    r * x * (1.0 - x / k)
}

/// Holling type-III consumption `beta h x^2 / (c^2 + x^2)`.
pub fn predation(x: f64, h: f64, beta: f64, c: f64) -> f64 {
    let x2 = x * x;
    beta * h * x2 / (c * c + x2)
}

/// Growth-rate multiplier for the drifting model: declines linearly from 1 to
/// 1/2 over the first 100 steps, then stays at 1/2.
pub fn rx_at(t: usize) -> f64 {
    if t <= 100 {
        1.0 - t as f64 / 200.0
    } else {
        0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum ModelId {
    One,
    Two,
    Three,
    Four,
}

impl ModelId {
    pub const ALL: [ModelId; 4] = [ModelId::One, ModelId::Two, ModelId::Three, ModelId::Four];

    pub fn number(self) -> u8 {
        self.into()
    }
}

impl From<ModelId> for u8 {
    fn from(m: ModelId) -> u8 {
        match m {
            ModelId::One => 1,
            ModelId::Two => 2,
            ModelId::Three => 3,
            ModelId::Four => 4,
        }
    }
}

impl TryFrom<u8> for ModelId {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(ModelId::One),
            2 => Ok(ModelId::Two),
            3 => Ok(ModelId::Three),
            4 => Ok(ModelId::Four),
            other => Err(format!("model must be 1, 2, 3 or 4, got {other}")),
        }
    }
}

impl std::fmt::Display for ModelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "model{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelParams {
    SingleSpecies(SingleSpeciesParams),
    ThreeSpecies(ThreeSpeciesParams),
}

impl ModelParams {
    pub fn dim(&self) -> usize {
        match self {
            ModelParams::SingleSpecies(_) => 1,
            ModelParams::ThreeSpecies(_) => 3,
        }
    }

    fn noise_sd(&self) -> [f64; 3] {
        match self {
            ModelParams::SingleSpecies(p) => [p.sigma2.sqrt(), 0.0, 0.0],
            ModelParams::ThreeSpecies(p) => {
                let v = p.variances();
                [v[0].sqrt(), v[1].sqrt(), v[2].sqrt()]
            }
        }
    }
}

/// Time dependence of the `X` growth rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RxSchedule {
    #[default]
    Constant,
    /// `r_x(t) = r_x * rx_at(t)`.
    LinearDecline,
}

impl RxSchedule {
    pub fn multiplier(self, t: usize) -> f64 {
        match self {
            RxSchedule::Constant => 1.0,
            RxSchedule::LinearDecline => rx_at(t),
        }
    }
}

/// A fully specified management problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub model_id: ModelId,
    pub params: ModelParams,
    /// Indices of harvested species; one action component per entry.
    pub harvested: Vec<usize>,
    #[serde(default)]
    pub rx_schedule: RxSchedule,
    /// Near-extinction level per species.
    pub thresholds: Vec<f64>,
    pub horizon: usize,
    pub initial_state: Vec<f64>,
    /// Per-species normalization bound used to map states into `[0,1]^d`.
    pub obs_bounds: Vec<f64>,
}

impl ModelSpec {
    /// Default problem for `model_id`, with normalization bounds derived from
    /// unharvested simulations.
    pub fn new(model_id: ModelId) -> Self {
        let mut spec = Self::without_bounds(model_id);
        spec.derive_obs_bounds(BOUND_EPISODES, BOUND_SEED)
            .expect("default spec is valid");
        spec
    }

    /// Default problem with placeholder bounds; call
    /// [`ModelSpec::derive_obs_bounds`] before normalizing states.
    pub fn without_bounds(model_id: ModelId) -> Self {
        let (params, harvested, rx_schedule, initial_state) = match model_id {
            ModelId::One => (
                ModelParams::SingleSpecies(SingleSpeciesParams::default()),
                vec![0],
                RxSchedule::Constant,
                vec![0.7],
            ),
            ModelId::Two => (
                ModelParams::ThreeSpecies(ThreeSpeciesParams::default()),
                vec![0],
                RxSchedule::Constant,
                vec![0.5; 3],
            ),
            ModelId::Three => (
                ModelParams::ThreeSpecies(ThreeSpeciesParams::default()),
                vec![0, 1],
                RxSchedule::Constant,
                vec![0.5; 3],
            ),
            ModelId::Four => (
                ModelParams::ThreeSpecies(ThreeSpeciesParams::default()),
                vec![0, 1],
                RxSchedule::LinearDecline,
                vec![0.5; 3],
            ),
        };
        let dim = params.dim();
        Self {
            model_id,
            params,
            harvested,
            rx_schedule,
            thresholds: vec![DEFAULT_THRESHOLD; dim],
            horizon: DEFAULT_HORIZON,
            initial_state,
            obs_bounds: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn n_actions(&self) -> usize {
        self.harvested.len()
    }

    pub fn initial(&self) -> SimState {
        SimState {
            pops: self.initial_state.clone(),
            t: 0,
        }
    }

    /// Replaces every noise variance with zero.
    pub fn noise_free(mut self) -> Self {
        self.params = match self.params {
            ModelParams::SingleSpecies(p) => {
                ModelParams::SingleSpecies(SingleSpeciesParams { sigma2: 0.0, ..p })
            }
            ModelParams::ThreeSpecies(p) => ModelParams::ThreeSpecies(p.with_variances([0.0; 3])),
        };
        self
    }

    /// Re-derives `obs_bounds` from `n_episodes` unharvested simulations.
    pub fn derive_obs_bounds(&mut self, n_episodes: usize, seed: u64) -> Result<()> {
        let mut rng = rng_from_seed(seed);
        self.obs_bounds = natural_range_bounds(self, n_episodes, &mut rng)?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        match &self.params {
            ModelParams::SingleSpecies(p) => {
                p.validate()?;
                if self.model_id != ModelId::One {
                    return Err(Error::InvalidSpec(format!(
                        "{} requires three-species parameters",
                        self.model_id
                    )));
                }
            }
            ModelParams::ThreeSpecies(p) => {
                p.validate()?;
                if self.model_id == ModelId::One {
                    return Err(Error::InvalidSpec(
                        "model1 requires single-species parameters".into(),
                    ));
                }
            }
        }
        let dim = self.dim();
        for (what, v) in [
            ("thresholds", &self.thresholds),
            ("initial_state", &self.initial_state),
            ("obs_bounds", &self.obs_bounds),
        ] {
            if v.len() != dim {
                return Err(Error::Dimension {
                    what,
                    expected: dim,
                    actual: v.len(),
                });
            }
        }
        if self.harvested.is_empty() || self.harvested.iter().any(|&i| i >= dim) {
            return Err(Error::InvalidSpec(format!(
                "harvested species {:?} invalid for dimension {dim}",
                self.harvested
            )));
        }
        if self.horizon < 1 {
            return Err(Error::InvalidSpec("horizon must be >= 1".into()));
        }
        for i in 0..dim {
            let (th, x0, ob) = (
                self.thresholds[i],
                self.initial_state[i],
                self.obs_bounds[i],
            );
            if !(th > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "threshold for {} must be > 0, got {th}",
                    SPECIES_NAMES[i]
                )));
            }
            if !(x0 > th) {
                return Err(Error::InvalidSpec(format!(
                    "initial {} = {x0} must exceed its threshold {th}",
                    SPECIES_NAMES[i]
                )));
            }
            if !(ob > x0) {
                return Err(Error::InvalidSpec(format!(
                    "obs bound for {} = {ob} must exceed initial value {x0}",
                    SPECIES_NAMES[i]
                )));
            }
        }
        Ok(())
    }

    fn check_pops(&self, pops: &[f64]) -> Result<()> {
        if pops.len() != self.dim() {
            return Err(Error::Dimension {
                what: "population vector",
                expected: self.dim(),
                actual: pops.len(),
            });
        }
        Ok(())
    }

    /// Deterministic increment written into `out[..dim]`.
    fn increment_into(&self, pops: &[f64], t: usize, out: &mut [f64; 3]) {
        match &self.params {
            ModelParams::SingleSpecies(p) => {
                let x = pops[0];
                out[0] = logistic(x, p.r, p.k) - predation(x, p.h, p.beta, p.c);
            }
            ModelParams::ThreeSpecies(p) => {
                let (x, y, z) = (pops[0], pops[1], pops[2]);
                let r_x = p.r_x * self.rx_schedule.multiplier(t);
                let competition = p.c_xy * x * y;
                out[0] = logistic(x, r_x, p.k_x) - predation(x, z, p.beta, p.c) - competition;
                out[1] =
                    logistic(y, p.r_y, p.k_y) - p.d * predation(y, z, p.beta, p.c) - competition;
                out[2] = (p.b * (x + p.d * y) - p.d_z) * z;
            }
        }
    }

    /// Harvest-then-recruitment transition applied to `pops` in place.
    ///
    /// `t` is the time index before the step. Callers are responsible for not
    /// stepping past termination; [`step`] performs that check.
    pub fn advance<R: Rng + ?Sized>(
        &self,
        pops: &mut [f64],
        t: usize,
        action: &[f64],
        rng: &mut R,
    ) -> Result<Transition> {
        self.check_pops(pops)?;
        if action.len() != self.harvested.len() {
            return Err(Error::Dimension {
                what: "action vector",
                expected: self.harvested.len(),
                actual: action.len(),
            });
        }
        for (index, &m) in action.iter().enumerate() {
            if !(0.0..=1.0).contains(&m) {
                return Err(Error::ActionOutOfRange { index, value: m });
            }
        }

        let mut harvest = 0.0;
        for (&species, &m) in self.harvested.iter().zip(action) {
            let caught = m * pops[species];
            harvest += caught;
            pops[species] *= 1.0 - m;
        }

        let dim = self.dim();
        let mut inc = [0.0; 3];
        self.increment_into(pops, t, &mut inc);
        let sd = self.params.noise_sd();
        for i in 0..dim {
            // always consume one draw per species so noise paths are shared
            // across policies evaluated with the same seed
            let z: f64 = rng.sample(StandardNormal);
            pops[i] = (pops[i] + inc[i] + sd[i] * z).max(0.0);
        }

        let t_next = t + 1;
        let cause = match (0..dim).find(|&i| pops[i] <= self.thresholds[i]) {
            Some(species) => Termination::NearExtinction { species },
            None if t_next >= self.horizon => Termination::Horizon,
            None => Termination::None,
        };
        let penalty = match cause {
            Termination::NearExtinction { .. } => -PENALTY_SCALE / t_next as f64,
            _ => 0.0,
        };
        Ok(Transition {
            harvest,
            penalty,
            cause,
        })
    }

    /// True when `state` is at the horizon or some population is at or below
    /// its threshold.
    pub fn is_terminal(&self, state: &SimState) -> bool {
        state.t >= self.horizon
            || state
                .pops
                .iter()
                .zip(&self.thresholds)
                .any(|(p, th)| p <= th)
    }
}

/// Population vector plus time index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub pops: Vec<f64>,
    pub t: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Termination {
    None,
    NearExtinction { species: usize },
    Horizon,
}

impl Termination {
    pub fn is_terminal(self) -> bool {
        !matches!(self, Termination::None)
    }

    pub fn label(self) -> String {
        match self {
            Termination::None => "none".into(),
            Termination::Horizon => "horizon".into(),
            Termination::NearExtinction { species } => {
                format!("near_extinction_{}", SPECIES_NAMES[species])
            }
        }
    }
}

/// Scalar outcome of one transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub harvest: f64,
    pub penalty: f64,
    pub cause: Termination,
}

impl Transition {
    pub fn reward(&self) -> f64 {
        self.harvest + self.penalty
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub state_before: SimState,
    pub action: Vec<f64>,
    pub harvest_reward: f64,
    pub penalty: f64,
    pub state_after: SimState,
    pub terminated: bool,
    pub cause: Termination,
}

impl StepRecord {
    pub fn reward(&self) -> f64 {
        self.harvest_reward + self.penalty
    }
}

/// Deterministic increment `f(N_t)` (no noise, no harvest).
pub fn natural_increment(spec: &ModelSpec, state: &SimState) -> Result<Vec<f64>> {
    spec.check_pops(&state.pops)?;
    let mut out = [0.0; 3];
    spec.increment_into(&state.pops, state.t, &mut out);
    Ok(out[..spec.dim()].to_vec())
}

/// One harvest-then-recruitment step.
pub fn step<R: Rng + ?Sized>(
    spec: &ModelSpec,
    state: &SimState,
    action: &[f64],
    rng: &mut R,
) -> Result<StepRecord> {
    spec.check_pops(&state.pops)?;
    if spec.is_terminal(state) {
        return Err(Error::Terminated { t: state.t });
    }
    let mut pops = state.pops.clone();
    let tr = spec.advance(&mut pops, state.t, action, rng)?;
    Ok(StepRecord {
        state_before: state.clone(),
        action: action.to_vec(),
        harvest_reward: tr.harvest,
        penalty: tr.penalty,
        state_after: SimState {
            pops,
            t: state.t + 1,
        },
        terminated: tr.cause.is_terminal(),
        cause: tr.cause,
    })
}

/// Normalization bounds from unharvested simulations: `1.25 x` the
/// componentwise maximum observed, rounded up to two decimals.
pub fn natural_range_bounds(
    spec: &ModelSpec,
    n_episodes: usize,
    rng: &mut SimRng,
) -> Result<Vec<f64>> {
    if n_episodes == 0 {
        return Err(Error::InvalidArgument(
            "natural_range_bounds needs at least one episode".into(),
        ));
    }
    let dim = spec.dim();
    let zero_action = vec![0.0; spec.n_actions()];
    let mut max = spec.initial_state.clone();
    for _ in 0..n_episodes {
        let mut pops = spec.initial_state.clone();
        let mut t = 0;
        loop {
            let tr = spec.advance(&mut pops, t, &zero_action, rng)?;
            t += 1;
            for i in 0..dim {
                max[i] = max[i].max(pops[i]);
            }
            if tr.cause.is_terminal() {
                break;
            }
        }
    }
    Ok(max
        .into_iter()
        .map(|m| ((1.25 * m * 100.0) - 1e-9).ceil() / 100.0)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model1_det() -> ModelSpec {
        ModelSpec::without_bounds(ModelId::One).noise_free()
    }

    #[test]
    fn logistic_examples() {
        assert_eq!(logistic(0.0, 1.0, 1.0), 0.0);
        assert_eq!(logistic(1.0, 1.0, 1.0), 0.0);
        assert_relative_eq!(logistic(0.5, 1.0, 1.0), 0.25);
    }

    #[test]
    fn predation_examples() {
        assert_eq!(predation(0.0, 1.0, 0.25, 0.1), 0.0);
        assert_relative_eq!(predation(0.1, 1.0, 0.25, 0.1), 0.125);
        // 0.25 * 0.2304 / 0.2404
        assert_relative_eq!(
            predation(0.48, 1.0, 0.25, 0.1),
            0.239_600_665_557_404_3,
            max_relative = 1e-12
        );
    }

    #[test]
    fn rx_schedule_values() {
        assert_eq!(rx_at(0), 1.0);
        assert_eq!(rx_at(100), 0.5);
        assert_eq!(rx_at(150), 0.5);
        assert_eq!(rx_at(50), 0.75);
    }

    #[test]
    fn three_species_increment_at_half() {
        let spec = ModelSpec::without_bounds(ModelId::Two);
        let s = SimState {
            pops: vec![0.5; 3],
            t: 0,
        };
        let inc = natural_increment(&spec, &s).unwrap();
        // hand evaluation:
        // f_X = 0.25 - 0.3*0.5*0.25/0.34 - 0.025
        // f_Y = 0.25 - 1.1*0.3*0.5*0.25/0.34 - 0.025
        // f_Z = (0.1*(0.5 + 0.55) - 0.1)*0.5
        assert_relative_eq!(inc[0], 0.25 - 0.0375 / 0.34 - 0.025, max_relative = 1e-12);
        assert_relative_eq!(inc[0], 0.114_705_882_352_941_2, max_relative = 1e-12);
        assert_relative_eq!(inc[1], 0.103_676_470_588_235_3, max_relative = 1e-12);
        assert_relative_eq!(inc[2], 0.0025, max_relative = 1e-12);
    }

    #[test]
    fn model4_uses_drifted_growth_rate() {
        let m3 = ModelSpec::without_bounds(ModelId::Three);
        let m4 = ModelSpec::without_bounds(ModelId::Four);
        let at = |t| SimState {
            pops: vec![0.5; 3],
            t,
        };
        assert_eq!(
            natural_increment(&m3, &at(0)).unwrap(),
            natural_increment(&m4, &at(0)).unwrap()
        );
        let inc = natural_increment(&m4, &at(100)).unwrap();
        let expected = logistic(0.5, 0.5, 1.0) - predation(0.5, 0.5, 0.3, 0.3) - 0.1 * 0.25;
        assert_relative_eq!(inc[0], expected, max_relative = 1e-12);
    }

    #[test]
    fn zero_is_fixed_point() {
        let spec = model1_det();
        let s = SimState {
            pops: vec![0.0],
            t: 0,
        };
        assert_eq!(natural_increment(&spec, &s).unwrap(), vec![0.0]);
    }

    #[test]
    fn model1_hand_step() {
        let spec = model1_det();
        let s = SimState {
            pops: vec![0.6],
            t: 0,
        };
        let mut rng = rng_from_seed(1);
        let rec = step(&spec, &s, &[0.2], &mut rng).unwrap();
        assert_relative_eq!(rec.harvest_reward, 0.12, max_relative = 1e-12);
        // 0.48 + 0.48*0.52 - 0.25*0.2304/0.2404
        let expected = 0.48 + 0.2496 - 0.25 * 0.2304 / 0.2404;
        assert_relative_eq!(rec.state_after.pops[0], expected, max_relative = 1e-12);
        assert!((rec.state_after.pops[0] - 0.4900).abs() < 1e-4);
        assert!(!rec.terminated);
        assert_eq!(rec.penalty, 0.0);
        assert_eq!(rec.state_after.t, 1);
    }

    #[test]
    fn unharvested_equilibrium_is_unchanged() {
        let spec = model1_det();
        let roots = fixed_points_model1(
            &SingleSpeciesParams::default(),
            &[0.25],
        )
        .unwrap();
        let upper = roots[0].equilibria.last().unwrap().x;
        let s = SimState {
            pops: vec![upper],
            t: 0,
        };
        let rec = step(&spec, &s, &[0.0], &mut rng_from_seed(3)).unwrap();
        assert!((rec.state_after.pops[0] - upper).abs() < 1e-12);
    }

    #[test]
    fn penalty_uses_post_increment_time() {
        let spec = model1_det();
        let s = SimState {
            pops: vec![0.7],
            t: 24,
        };
        let rec = step(&spec, &s, &[1.0], &mut rng_from_seed(0)).unwrap();
        assert_eq!(rec.state_after.t, 25);
        assert_eq!(rec.penalty, -4.0);
        assert_eq!(
            rec.cause,
            Termination::NearExtinction { species: 0 }
        );
        assert_relative_eq!(rec.harvest_reward, 0.7);
    }

    #[test]
    fn horizon_termination() {
        let spec = model1_det();
        let s = SimState {
            pops: vec![0.7],
            t: 199,
        };
        let rec = step(&spec, &s, &[0.0], &mut rng_from_seed(0)).unwrap();
        assert_eq!(rec.cause, Termination::Horizon);
        assert_eq!(rec.penalty, 0.0);
        let err = step(&spec, &rec.state_after, &[0.0], &mut rng_from_seed(0));
        assert!(matches!(err, Err(Error::Terminated { t: 200 })));
    }

    #[test]
    fn rejects_bad_actions_and_dimensions() {
        let spec = model1_det();
        let s = spec.initial();
        let mut rng = rng_from_seed(0);
        assert!(matches!(
            step(&spec, &s, &[1.2], &mut rng),
            Err(Error::ActionOutOfRange { .. })
        ));
        assert!(matches!(
            step(&spec, &s, &[-0.1], &mut rng),
            Err(Error::ActionOutOfRange { .. })
        ));
        assert!(matches!(
            step(&spec, &s, &[0.1, 0.1], &mut rng),
            Err(Error::Dimension { .. })
        ));
        let bad = SimState {
            pops: vec![0.5; 3],
            t: 0,
        };
        assert!(natural_increment(&spec, &bad).is_err());
    }

    #[test]
    fn bounds_for_deterministic_model1_at_capacity() {
        let mut spec = model1_det();
        spec.initial_state = vec![1.0];
        let b = natural_range_bounds(&spec, 3, &mut rng_from_seed(0)).unwrap();
        assert_eq!(b, vec![1.25]);
        assert!(natural_range_bounds(&spec, 0, &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn bounds_for_three_species_cover_natural_range() {
        for id in [ModelId::Two, ModelId::Three, ModelId::Four] {
            let spec = ModelSpec::new(id);
            assert_eq!(spec.obs_bounds.len(), 3);
            assert!(spec.obs_bounds.iter().all(|&b| b >= 1.0), "{:?}", spec.obs_bounds);
            spec.validate().unwrap();
        }
        ModelSpec::new(ModelId::One).validate().unwrap();
    }

    #[test]
    fn validate_rejects_bad_specs() {
        let mut spec = ModelSpec::new(ModelId::One);
        spec.thresholds = vec![0.0];
        assert!(spec.validate().is_err());
        let mut spec = ModelSpec::new(ModelId::One);
        spec.initial_state = vec![0.01];
        assert!(spec.validate().is_err());
        let mut spec = ModelSpec::new(ModelId::Three);
        spec.obs_bounds = vec![0.4, 2.0, 2.0];
        assert!(spec.validate().is_err());
        let mut spec = ModelSpec::new(ModelId::Three);
        spec.horizon = 0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn spec_serializes_to_toml_and_back() {
        let spec = ModelSpec::new(ModelId::Four);
        let text = toml::to_string(&spec).unwrap();
        let back: ModelSpec = toml::from_str(&text).unwrap();
        assert_eq!(spec, back);
    }
}
