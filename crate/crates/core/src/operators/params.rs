use serde::{Deserialize, Serialize};

use crate::config_space::Site;
use crate::error::{param, Result};

/// Model parameters of the disordered chain on `[-L, L]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Anisotropy `Delta > 1`.
    pub anisotropy: f64,
    /// Disorder strength `lambda > 0` (zero allowed for clean reference runs).
    pub disorder: f64,
    /// Boundary field `beta >= (1 - 1/Delta) / 2`.
    pub boundary: f64,
    pub half_length: Site,
    /// Droplet window margin `0 < delta < 1`.
    pub window_margin: f64,
}

impl ModelParams {
    /// Parameters with the minimal boundary field and margin `0.1`.
    pub fn new(anisotropy: f64, disorder: f64, half_length: Site) -> Result<Self> {
        let p = ModelParams {
            anisotropy,
            disorder,
            boundary: minimal_boundary(anisotropy),
            half_length,
            window_margin: 0.1,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_boundary(mut self, beta: f64) -> Result<Self> {
        self.boundary = beta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_margin(mut self, delta: f64) -> Result<Self> {
        self.window_margin = delta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_half_length(mut self, half_length: Site) -> Result<Self> {
        self.half_length = half_length;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.anisotropy > 1.0) || !self.anisotropy.is_finite() {
            return param(format!("anisotropy {} must exceed 1", self.anisotropy));
        }
        if !(self.disorder >= 0.0) || !self.disorder.is_finite() {
            return param(format!("disorder strength {} must be nonnegative", self.disorder));
        }
        let bmin = minimal_boundary(self.anisotropy);
        if !(self.boundary >= bmin - 1e-15) || !self.boundary.is_finite() {
            return param(format!(
                "boundary field {} is below the minimum {bmin}",
                self.boundary
            ));
        }
        if self.half_length < 0 {
            return param(format!("half-length {} is negative", self.half_length));
        }
        if !(self.window_margin > 0.0 && self.window_margin < 1.0) {
            return param(format!("window margin {} outside (0, 1)", self.window_margin));
        }
        Ok(())
    }

    /// `1 - 1/Delta`.
    pub fn gap(&self) -> f64 {
        1.0 - 1.0 / self.anisotropy
    }

    /// Coefficient of the boundary indicator in the sector operator.
    pub fn boundary_excess(&self) -> f64 {
        self.boundary - 0.5 * self.gap()
    }

    pub fn n_sites(&self) -> usize {
        (2 * self.half_length + 1) as usize
    }

    /// `lambda sqrt(Delta - 1) min(1, Delta - 1)`, compared against a user
    /// threshold by [`ModelParams::in_regime`].
    pub fn regime_value(&self) -> f64 {
        let d = self.anisotropy - 1.0;
        self.disorder * d.sqrt() * d.min(1.0)
    }

    /// Advisory flag for the strong-disorder Ising regime.
    pub fn in_regime(&self, threshold: f64) -> bool {
        self.regime_value() >= threshold
    }
}

/// `(1 - 1/Delta) / 2`, the smallest admissible boundary field.
pub fn minimal_boundary(anisotropy: f64) -> f64 {
    0.5 * (1.0 - 1.0 / anisotropy)
}
