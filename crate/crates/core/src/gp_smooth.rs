//! Smoothing a trained neural policy with Gaussian-process regression.
//!
//! The policy is sampled on grids that are dense along one state axis and
//! sparse along the others, the sparse values being placed inside the range
//! of states the policy typically visits. One regressor per harvested species
//! is then fitted to those samples.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::statistics::{Data, OrderStatistics};

use crate::dynamics::ModelSpec;
use crate::error::{Error, Result};
use crate::harness::{evaluate_with_trajectories, Trajectory};
use crate::policy::{normalize_state, GpPolicy, GpRegressor, KernelParams, MlpParams, PolicySpec};

pub const DEFAULT_DENSE_POINTS: usize = 51;
pub const DEFAULT_SPARSE_POINTS: usize = 5;
/// Dense resolution used for projections (as opposed to fitting).
pub const PROJECTION_DENSE_POINTS: usize = 100;

/// Interval of typical normalized values of one species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopularWindow {
    pub lo: f64,
    pub hi: f64,
}

impl PopularWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "window [{lo}, {hi}] must satisfy 0 <= lo <= hi <= 1"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// `n` evenly spaced values from `lo` to `hi`, duplicates removed.
    pub fn values(&self, n: usize) -> Vec<f64> {
        let mut out: Vec<f64> = match n {
            0 => Vec::new(),
            1 => vec![0.5 * (self.lo + self.hi)],
            _ => (0..n)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64)
                .collect(),
        };
        out.dedup();
        out
    }
}

/// Uniform values on `[0,1]`.
pub fn dense_axis(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowQuantiles {
    pub lower: f64,
    pub upper: f64,
}

impl Default for WindowQuantiles {
    fn default() -> Self {
        Self {
            lower: 0.05,
            upper: 0.95,
        }
    }
}

/// Per species, the `[lower, upper]` quantiles of all normalized values
/// visited across the episodes (every pre-step state plus each final state).
pub fn popular_window(
    episodes: &[Trajectory],
    obs_bounds: &[f64],
    q: WindowQuantiles,
) -> Result<Vec<PopularWindow>> {
    if episodes.is_empty() || episodes.iter().all(|t| t.steps.is_empty()) {
        return Err(Error::InvalidArgument("popular window needs at least one episode".into()));
    }
    if !(0.0 <= q.lower && q.lower <= q.upper && q.upper <= 1.0) {
        return Err(Error::InvalidArgument(format!("invalid quantiles {q:?}")));
    }
    let dim = obs_bounds.len();
    let mut columns = vec![Vec::new(); dim];
    for traj in episodes {
        let visited = traj
            .steps
            .iter()
            .map(|s| &s.state_before.pops)
            .chain(traj.steps.last().map(|s| &s.state_after.pops));
        for pops in visited {
            for (col, v) in columns.iter_mut().zip(normalize_state(pops, obs_bounds)) {
                col.push(v);
            }
        }
    }
    columns
        .into_iter()
        .map(|col| windows_from_values(col, q))
        .collect()
}

fn windows_from_values(values: Vec<f64>, q: WindowQuantiles) -> Result<PopularWindow> {
    let mut data = Data::new(values);
    let lo = data.quantile(q.lower).clamp(0.0, 1.0);
    let hi = data.quantile(q.upper).clamp(0.0, 1.0);
    PopularWindow::new(lo, hi.max(lo))
}

/// Grid that is dense along `dense_axis` and sparse along the others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridBlock {
    pub dense_axis: usize,
    /// Per-axis values; the block is their Cartesian product.
    pub axis_values: Vec<Vec<f64>>,
}

impl GridBlock {
    /// Points in row-major order with the dense axis varying fastest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let dim = self.axis_values.len();
        let mut order: Vec<usize> = (0..dim).filter(|&a| a != self.dense_axis).collect();
        order.push(self.dense_axis);
        let mut points = vec![vec![0.0; dim]];
        for &axis in &order {
            points = points
                .into_iter()
                .flat_map(|p| {
                    self.axis_values[axis].iter().map(move |&v| {
                        let mut q = p.clone();
                        q[axis] = v;
                        q
                    })
                })
                .collect();
        }
        points
    }

    pub fn len(&self) -> usize {
        self.axis_values.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One block per state axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyGrid {
    pub blocks: Vec<GridBlock>,
}

impl PolicyGrid {
    pub fn len(&self) -> usize {
        self.blocks.iter().map(GridBlock::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All points with exact duplicates removed, in first-seen order.
    pub fn unique_points(&self) -> Vec<Vec<f64>> {
        let mut seen = std::collections::HashSet::new();
        self.blocks
            .iter()
            .flat_map(GridBlock::points)
            .filter(|p| seen.insert(p.iter().map(|v| v.to_bits()).collect::<Vec<_>>()))
            .collect()
    }
}

/// Builds one block per axis: that axis takes `dense` uniform values on
/// `[0,1]`, every other axis `sparse` values spanning its window.
pub fn build_grids(windows: &[PopularWindow], dense: usize, sparse: usize) -> Result<PolicyGrid> {
    if windows.is_empty() || dense == 0 || sparse == 0 {
        return Err(Error::InvalidArgument("grids need windows and positive point counts".into()));
    }
    for w in windows {
        PopularWindow::new(w.lo, w.hi)?;
    }
    let blocks = (0..windows.len())
        .map(|axis| GridBlock {
            dense_axis: axis,
            axis_values: windows
                .iter()
                .enumerate()
                .map(|(j, w)| if j == axis { dense_axis(dense) } else { w.values(sparse) })
                .collect(),
        })
        .collect();
    Ok(PolicyGrid { blocks })
}

/// A policy evaluated at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub dense_axis: usize,
    pub point: Vec<f64>,
    pub action: Vec<f64>,
}

/// Evaluates `f` at every grid point, keeping duplicates so each block's
/// lines are complete.
pub fn sample_grid<F>(grid: &PolicyGrid, f: F) -> Result<Vec<GridSample>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    grid.blocks
        .iter()
        .flat_map(|b| b.points().into_iter().map(move |p| (b.dense_axis, p)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(dense_axis, point)| {
            let action = f(&point)?;
            Ok(GridSample {
                dense_axis,
                point,
                action,
            })
        })
        .collect()
}

/// Fits one regressor per action component on the deduplicated samples.
pub fn fit_samples(samples: &[GridSample], kernel: KernelParams) -> Result<GpPolicy> {
    let first = samples
        .first()
        .ok_or_else(|| Error::InvalidArgument("no grid samples to fit".into()))?;
    let n_actions = first.action.len();
    let mut seen = std::collections::HashSet::new();
    let unique: Vec<&GridSample> = samples
        .iter()
        .filter(|s| seen.insert(s.point.iter().map(|v| v.to_bits()).collect::<Vec<_>>()))
        .collect();
    let inputs: Vec<Vec<f64>> = unique.iter().map(|s| s.point.clone()).collect();
    let regressors = (0..n_actions)
        .into_par_iter()
        .map(|k| {
            let targets = unique.iter().map(|s| s.action[k]).collect();
            GpRegressor::fit(kernel, inputs.clone(), targets)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GpPolicy { regressors })
}

/// Samples the deterministic MLP action on the grid and fits the smoother.
pub fn fit_ppo_gp(
    mlp: &MlpParams,
    grid: &PolicyGrid,
    kernel: KernelParams,
) -> Result<(GpPolicy, Vec<GridSample>)> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty policy grid".into()));
    }
    let samples = sample_grid(grid, |x| Ok(mlp.forward(x)?.mean))?;
    let gp = fit_samples(&samples, kernel)?;
    Ok((gp, samples))
}

/// Sum of absolute action changes along the dense axis of every grid line,
/// per action component. Samples must come from [`sample_grid`].
pub fn total_variation(samples: &[GridSample]) -> Vec<f64> {
    let n_actions = samples.first().map_or(0, |s| s.action.len());
    let mut tv = vec![0.0; n_actions];
    for pair in samples.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let same_line = a.dense_axis == b.dense_axis
            && a.point
                .iter()
                .zip(&b.point)
                .enumerate()
                .all(|(i, (x, y))| i == a.dense_axis || x == y);
        if same_line {
            for (k, slot) in tv.iter_mut().enumerate() {
                *slot += (b.action[k] - a.action[k]).abs();
            }
        }
    }
    tv
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmoothOptions {
    pub dense_points: usize,
    pub sparse_points: usize,
    pub quantiles: WindowQuantiles,
    pub kernel: KernelParams,
    /// Episodes of the raw policy used to locate the popular windows.
    pub window_episodes: usize,
}

impl Default for SmoothOptions {
    fn default() -> Self {
        Self {
            dense_points: DEFAULT_DENSE_POINTS,
            sparse_points: DEFAULT_SPARSE_POINTS,
            quantiles: WindowQuantiles::default(),
            kernel: KernelParams::default(),
            window_episodes: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Smoothed {
    pub windows: Vec<PopularWindow>,
    pub grid: PolicyGrid,
    pub samples: Vec<GridSample>,
    pub policy: PolicySpec,
}

/// Full smoothing pipeline for a neural policy on `spec`: windows from
/// evaluation episodes, grids, sampling and fit.
pub fn smooth_policy(
    spec: &ModelSpec,
    obs_bounds: &[f64],
    mlp: &MlpParams,
    opts: &SmoothOptions,
    seed: u64,
) -> Result<Smoothed> {
    let raw = PolicySpec::Mlp {
        obs_bounds: obs_bounds.to_vec(),
        params: mlp.clone(),
    };
    let (_, trajs) = evaluate_with_trajectories(spec, &raw, opts.window_episodes, seed)?;
    let windows = popular_window(&trajs, obs_bounds, opts.quantiles)?;
    let grid = build_grids(&windows, opts.dense_points, opts.sparse_points)?;
    let (gp, samples) = fit_ppo_gp(mlp, &grid, opts.kernel)?;
    Ok(Smoothed {
        windows,
        grid,
        samples,
        policy: PolicySpec::Gp {
            obs_bounds: obs_bounds.to_vec(),
            gp,
        },
    })
}
