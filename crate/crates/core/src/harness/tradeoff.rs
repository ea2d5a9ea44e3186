//! Mortality-fraction sweep and policy projections.

use serde::{Deserialize, Serialize};

use super::eval::{evaluate, EvalSummary};
use crate::dynamics::{ModelSpec, SPECIES_NAMES};
use crate::error::{Error, Result};
use crate::gp_smooth::{dense_axis, PopularWindow, DEFAULT_SPARSE_POINTS, PROJECTION_DENSE_POINTS};
use crate::policy::PolicySpec;

pub const DEFAULT_FRACTIONS: [f64; 4] = [0.8, 0.9, 0.95, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub fraction: f64,
    pub mortality: Vec<f64>,
    pub summary: EvalSummary,
}

/// Evaluates scaled copies of the optimal mortality policy, one per fraction,
/// all on the same episode seeds. Rows are sorted by fraction.
pub fn mortality_tradeoff(
    spec: &ModelSpec,
    optimal_mortality: &[f64],
    fractions: &[f64],
    n_episodes: usize,
    seed: u64,
) -> Result<Vec<TradeoffRow>> {
    let mut fr = fractions.to_vec();
    if fr.iter().any(|f| !(0.0..=1.0).contains(f)) {
        return Err(Error::InvalidArgument("fractions must lie in [0, 1]".into()));
    }
    fr.sort_by(f64::total_cmp);
    fr.into_iter()
        .map(|fraction| {
            let policy = PolicySpec::ScaledMortality {
                base: optimal_mortality.to_vec(),
                factor: fraction,
            };
            Ok(TradeoffRow {
                fraction,
                mortality: optimal_mortality.iter().map(|m| m * fraction).collect(),
                summary: evaluate(spec, &policy, n_episodes, seed)?,
            })
        })
        .collect()
}

/// Resolves a species name (`X`, `Y`, `Z`, case-insensitive) to its axis.
pub fn species_axis(name: &str, dim: usize) -> Result<usize> {
    SPECIES_NAMES[..dim]
        .iter()
        .position(|s| s.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::InvalidArgument(format!("unknown species axis '{name}' for a {dim}-species model")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRow {
    /// Normalized state at which the policy was evaluated.
    pub point: Vec<f64>,
    pub action: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub dense_axis: usize,
    pub color_axis: Option<usize>,
    pub rows: Vec<ProjectionRow>,
}

/// Evaluates `policy` with `dense_axis` swept over `n_dense` uniform values
/// on `[0,1]` and every other axis over `n_sparse` values inside its window.
/// Rows are ordered by the color axis, then any remaining axis, then the
/// dense axis.
pub fn policy_projection_with(
    policy: &PolicySpec,
    spec: &ModelSpec,
    windows: &[PopularWindow],
    dense: usize,
    color: Option<usize>,
    n_dense: usize,
    n_sparse: usize,
) -> Result<Projection> {
    let dim = spec.dim();
    if windows.len() != dim {
        return Err(Error::Dimension {
            what: "projection windows",
            expected: dim,
            actual: windows.len(),
        });
    }
    if dense >= dim || color.is_some_and(|c| c >= dim || c == dense) {
        return Err(Error::InvalidArgument(
            "projection axes must be distinct species of the model".into(),
        ));
    }
    policy.check_compatible(spec)?;
    let values: Vec<Vec<f64>> = (0..dim)
        .map(|a| if a == dense { dense_axis(n_dense) } else { windows[a].values(n_sparse) })
        .collect();
    let mut order: Vec<usize> = color.into_iter().collect();
    order.extend((0..dim).filter(|&a| a != dense && Some(a) != color));
    order.push(dense);
    let mut points = vec![vec![0.0; dim]];
    for &axis in &order {
        points = points
            .into_iter()
            .flat_map(|p| {
                values[axis].iter().map(move |&v| {
                    let mut q = p.clone();
                    q[axis] = v;
                    q
                })
            })
            .collect();
    }
    let rows = points
        .into_iter()
        .map(|point| {
            let pops: Vec<f64> = point.iter().zip(&spec.obs_bounds).map(|(x, b)| x * b).collect();
            let action = policy.act(spec, &pops)?;
            Ok(ProjectionRow { point, action })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Projection {
        dense_axis: dense,
        color_axis: color,
        rows,
    })
}

/// Projection with the default resolution (100 dense values, 5 sparse).
pub fn policy_projection(
    policy: &PolicySpec,
    spec: &ModelSpec,
    windows: &[PopularWindow],
    dense: usize,
    color: Option<usize>,
) -> Result<Projection> {
    policy_projection_with(
        policy,
        spec,
        windows,
        dense,
        color,
        PROJECTION_DENSE_POINTS,
        DEFAULT_SPARSE_POINTS,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ModelId;

    #[test]
    fn full_fraction_matches_optimal_policy() {
        let spec = ModelSpec::new(ModelId::Four);
        let base = vec![0.05, 0.04];
        let rows = mortality_tradeoff(&spec, &base, &[1.0, 0.8, 0.95, 0.9], 20, 3).unwrap();
        let fr: Vec<f64> = rows.iter().map(|r| r.fraction).collect();
        assert_eq!(fr, vec![0.8, 0.9, 0.95, 1.0]);
        let direct = evaluate(&spec, &PolicySpec::ConstantMortality { mortality: base }, 20, 3).unwrap();
        assert_eq!(rows[3].summary, direct);
        assert!(mortality_tradeoff(&spec, &[0.1, 0.1], &[1.5], 5, 1).is_err());
    }

    #[test]
    fn axis_names() {
        assert_eq!(species_axis("y", 3).unwrap(), 1);
        assert_eq!(species_axis("Z", 3).unwrap(), 2);
        assert!(species_axis("Y", 1).is_err());
        assert!(species_axis("W", 3).is_err());
    }

    fn windows() -> Vec<PopularWindow> {
        vec![PopularWindow::new(0.2, 0.6).unwrap(); 3]
    }

    #[test]
    fn constant_policy_projects_flat() {
        let spec = ModelSpec::new(ModelId::Three);
        let p = PolicySpec::ConstantMortality {
            mortality: vec![0.1, 0.2],
        };
        let proj = policy_projection(&p, &spec, &windows(), 0, Some(1)).unwrap();
        assert_eq!(proj.rows.len(), 100 * 25);
        assert!(proj.rows.iter().all(|r| r.action == vec![0.1, 0.2]));
    }

    #[test]
    fn escapement_projection_is_hockey_stick_and_uncorrelated() {
        let spec = ModelSpec::new(ModelId::Three);
        let s = [0.4, 0.3];
        let p = PolicySpec::ConstantEscapement { escapement: s.to_vec() };
        let proj = policy_projection(&p, &spec, &windows(), 0, Some(1)).unwrap();
        for r in &proj.rows {
            let x = r.point[0] * spec.obs_bounds[0];
            let expected = if x <= s[0] { 0.0 } else { (x - s[0]) / x };
            assert!((r.action[0] - expected).abs() < 1e-12);
        }
        // The Y mortality depends only on Y, so along the X sweep it is flat.
        for line in proj.rows.chunks(100) {
            assert!(line.iter().all(|r| r.action[1] == line[0].action[1]));
        }
    }

    #[test]
    fn invalid_axes_are_rejected() {
        let spec = ModelSpec::new(ModelId::Three);
        let p = PolicySpec::ConstantMortality { mortality: vec![0.1, 0.2] };
        assert!(policy_projection(&p, &spec, &windows(), 0, Some(0)).is_err());
        assert!(policy_projection(&p, &spec, &windows(), 3, None).is_err());
        assert!(policy_projection(&p, &spec, &windows()[..2], 0, None).is_err());
    }

    #[test]
    fn single_species_projection() {
        let spec = ModelSpec::new(ModelId::One);
        let p = PolicySpec::ConstantEscapement { escapement: vec![0.5] };
        let w = vec![PopularWindow::new(0.3, 0.5).unwrap()];
        let proj = policy_projection(&p, &spec, &w, 0, None).unwrap();
        assert_eq!(proj.rows.len(), 100);
    }
}
