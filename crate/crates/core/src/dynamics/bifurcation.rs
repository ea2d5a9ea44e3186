//! Equilibria of the unharvested single-species model as a function of the
//! predation pressure `beta * H`.
//!
//! Interior equilibria solve `r x (1 - x/K) = bH x^2 / (c^2 + x^2)`. Dividing
//! by `x` and multiplying by `-K/r` gives the monic cubic
//! `x^3 - K x^2 + (c^2 + bH K / r) x - K c^2 = 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{logistic, predation, SingleSpeciesParams};
use crate::error::{Error, Result};

const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub x: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationRow {
    pub beta_h: f64,
    /// Interior equilibria in increasing order.
    pub equilibria: Vec<Equilibrium>,
}

/// Real roots of the monic cubic `x^3 + a x^2 + b x + c`, ascending.
fn real_cubic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    // depressed cubic t^3 + p t + q with x = t - a/3
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let scale = 1.0 + p.abs().max(q.abs());
    let mut roots = if disc > 1e-14 * scale * scale {
        let sq = disc.sqrt();
        vec![(-q / 2.0 + sq).cbrt() + (-q / 2.0 - sq).cbrt() - shift]
    } else if p.abs() < 1e-300 {
        vec![-shift]
    } else {
        // three real roots (possibly repeated)
        let m = 2.0 * (-p / 3.0).max(0.0).sqrt();
        let arg = if m == 0.0 {
            0.0
        } else {
            (3.0 * q / (p * m)).clamp(-1.0, 1.0)
        };
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * PI * k as f64 / 3.0).cos() - shift)
            .collect()
    };
    // one Newton polish step per root
    for x in roots.iter_mut() {
        let f = ((*x + a) * *x + b) * *x + c;
        let df = (3.0 * *x + 2.0 * a) * *x + b;
        if df.abs() > 1e-12 {
            *x -= f / df;
        }
    }
    roots.sort_by(|u, v| u.partial_cmp(v).unwrap());
    roots.dedup_by(|u, v| (*u - *v).abs() < 1e-9);
    roots
}

fn unharvested_increment(x: f64, params: &SingleSpeciesParams, beta_h: f64) -> f64 {
    logistic(x, params.r, params.k) - predation(x, 1.0, beta_h, params.c)
}

/// Interior fixed points and their stability for each value of `beta * H`.
///
/// Stability is the sign of the increment's derivative at the root, taken by
/// central differences.
pub fn fixed_points_model1(
    params: &SingleSpeciesParams,
    beta_h_grid: &[f64],
) -> Result<Vec<BifurcationRow>> {
    if beta_h_grid.is_empty() {
        return Err(Error::InvalidArgument("empty beta*H grid".into()));
    }
    let (r, k, c) = (params.r, params.k, params.c);
    beta_h_grid
        .iter()
        .map(|&beta_h| {
            if !(beta_h >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "beta*H must be >= 0, got {beta_h}"
                )));
            }
            let roots = real_cubic_roots(-k, c * c + beta_h * k / r, -k * c * c);
            let equilibria = roots
                .into_iter()
                .filter(|&x| x > 0.0)
                .map(|x| {
                    let slope = (unharvested_increment(x + FD_STEP, params, beta_h)
                        - unharvested_increment(x - FD_STEP, params, beta_h))
                        / (2.0 * FD_STEP);
                    Equilibrium {
                        x,
                        stable: slope < 0.0,
                    }
                })
                .collect();
            Ok(BifurcationRow { beta_h, equilibria })
        })
        .collect()
}
