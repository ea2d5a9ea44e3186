use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the single-species prey model under a fixed predator
/// population (Model 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleSpeciesParams {
    /// Intrinsic growth rate (1/yr).
    pub r: f64,
    /// Carrying capacity.
    pub k: f64,
    /// Maximum predation rate.
    pub beta: f64,
    /// Fixed predator population.
    pub h: f64,
    /// Half-maximum biomass of the predation response.
    pub c: f64,
    /// Variance of the additive recruitment noise.
    pub sigma2: f64,
}

impl Default for SingleSpeciesParams {
    fn default() -> Self {
        Self {
            r: 1.0,
            k: 1.0,
            beta: 0.25,
            h: 1.0,
            c: 0.1,
            sigma2: 0.05,
        }
    }
}

impl SingleSpeciesParams {
    pub fn validate(&self) -> Result<()> {
        let dynamic = [
            ("r", self.r),
            ("k", self.k),
            ("beta", self.beta),
            ("h", self.h),
            ("c", self.c),
        ];
        for (name, v) in dynamic {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidSpec(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.sigma2.is_finite() && self.sigma2 >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "sigma2 must be >= 0, got {}",
                self.sigma2
            )));
        }
        if self.k < self.c {
            return Err(Error::InvalidSpec(format!(
                "carrying capacity k = {} must be >= c = {}",
                self.k, self.c
            )));
        }
        Ok(())
    }
}

/// Parameters of the three-species model: two competing prey `X`, `Y` and a
/// predator `Z` feeding on both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeSpeciesParams {
    pub r_x: f64,
    pub k_x: f64,
    pub r_y: f64,
    pub k_y: f64,
    /// Lotka-Volterra competition coefficient between `X` and `Y`.
    pub c_xy: f64,
    pub beta: f64,
    pub c: f64,
    /// Relative preference of `Z` for `Y`.
    pub d: f64,
    /// Birth-rate scaling of `Z`.
    pub b: f64,
    /// Death rate of `Z`.
    pub d_z: f64,
    pub sigma2_x: f64,
    pub sigma2_y: f64,
    pub sigma2_z: f64,
}

impl Default for ThreeSpeciesParams {
    fn default() -> Self {
        Self {
            r_x: 1.0,
            k_x: 1.0,
            r_y: 1.0,
            k_y: 1.0,
            c_xy: 0.1,
            beta: 0.3,
            c: 0.3,
            d: 1.1,
            b: 0.1,
            d_z: 0.1,
            sigma2_x: 0.05,
            sigma2_y: 0.05,
            sigma2_z: 0.05,
        }
    }
}

impl ThreeSpeciesParams {
    pub const DYNAMIC_NAMES: [&'static str; 10] =
        ["r_x", "k_x", "r_y", "k_y", "c_xy", "beta", "c", "d", "b", "d_z"];

    /// The ten dynamic parameters in [`Self::DYNAMIC_NAMES`] order.
    pub fn dynamic(&self) -> [f64; 10] {
        [
            self.r_x, self.k_x, self.r_y, self.k_y, self.c_xy, self.beta, self.c, self.d, self.b,
            self.d_z,
        ]
    }

    pub fn with_dynamic(&self, v: [f64; 10]) -> Self {
        Self {
            r_x: v[0],
            k_x: v[1],
            r_y: v[2],
            k_y: v[3],
            c_xy: v[4],
            beta: v[5],
            c: v[6],
            d: v[7],
            b: v[8],
            d_z: v[9],
            ..*self
        }
    }

    pub fn variances(&self) -> [f64; 3] {
        [self.sigma2_x, self.sigma2_y, self.sigma2_z]
    }

    pub fn with_variances(&self, v: [f64; 3]) -> Self {
        Self {
            sigma2_x: v[0],
            sigma2_y: v[1],
            sigma2_z: v[2],
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in Self::DYNAMIC_NAMES.iter().zip(self.dynamic()) {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidSpec(format!("{name} must be > 0, got {v}")));
            }
        }
        for (name, v) in ["sigma2_x", "sigma2_y", "sigma2_z"]
            .iter()
            .zip(self.variances())
        {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidSpec(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SingleSpeciesParams::default().validate().unwrap();
        ThreeSpeciesParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_nonpositive_and_k_below_c() {
        let p = SingleSpeciesParams {
            beta: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = SingleSpeciesParams {
            k: 0.05,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = ThreeSpeciesParams {
            d_z: -0.1,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn dynamic_roundtrip_keeps_variances() {
        let p = ThreeSpeciesParams::default();
        let mut v = p.dynamic();
        v[5] = 0.42;
        let q = p.with_dynamic(v);
        assert_eq!(q.beta, 0.42);
        assert_eq!(q.variances(), p.variances());
    }
}
