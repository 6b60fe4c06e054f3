//! Run configuration files.
//!
//! A configuration is a JSON object with an optional `model` section and an
//! optional `ensemble` section. Every field has a default, and the defaults
//! live only here:
//!
//! ```json
//! {
//!   "model": {
//!     "anisotropy": 5.0,
//!     "disorder": 4.0,
//!     "half_length": 12,
//!     "boundary": null,
//!     "window_margin": 0.1,
//!     "field": { "family": "uniform", "omega_max": 1.0 }
//!   },
//!   "ensemble": {
//!     "kind": "fractional-moments",
//!     "n_list": [2],
//!     "distances": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
//!     "realizations": 300,
//!     "master_seed": 0,
//!     "s": 0.5,
//!     "epsilon": 0.001,
//!     "n_max": 4,
//!     "energy": null,
//!     "confidence": 0.95
//!   }
//! }
//! ```
//!
//! A `null` boundary means the minimal admissible field `(1 - 1/Delta) / 2`;
//! a `null` energy means the center of the droplet window.

use std::path::Path;

use serde::{Deserialize, Serialize};
use xxz_core::config_space::Site;
use xxz_core::estimators::EnsembleConfig;
use xxz_core::operators::{DisorderSpec, ModelParams};

use crate::error::{io_err, HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSpec {
    pub anisotropy: f64,
    pub disorder: f64,
    pub half_length: Site,
    pub boundary: Option<f64>,
    pub window_margin: f64,
    pub field: DisorderSpec,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            anisotropy: 5.0,
            disorder: 4.0,
            half_length: 12,
            boundary: None,
            window_margin: 0.1,
            field: DisorderSpec::default(),
        }
    }
}

impl ModelSpec {
    pub fn params(&self) -> Result<ModelParams> {
        let p = ModelParams::new(self.anisotropy, self.disorder, self.half_length)?.with_margin(self.window_margin)?;
        let p = match self.boundary {
            Some(b) => p.with_boundary(b)?,
            None => p,
        };
        self.field.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    /// `E |G(u, v; E + i eps)|^s` per particle number.
    FractionalMoments,
    /// `E sum_{N <= N_max} Q_N(i, j; I_{1,delta})`.
    Eigencorrelators,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n_list: Vec<usize>,
    pub distances: Vec<u32>,
    pub realizations: u64,
    pub master_seed: u64,
    pub s: f64,
    pub epsilon: f64,
    pub n_max: usize,
    pub energy: Option<f64>,
    pub confidence: f64,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec {
            kind: EnsembleKind::FractionalMoments,
            n_list: vec![2],
            distances: (1..=12).collect(),
            realizations: 300,
            master_seed: 0,
            s: 0.5,
            epsilon: 1e-3,
            n_max: 4,
            energy: None,
            confidence: 0.95,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub ensemble: EnsembleSpec,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    /// The fully resolved estimator configuration.
    pub fn ensemble_config(&self) -> Result<EnsembleConfig> {
        let e = &self.ensemble;
        let cfg = EnsembleConfig {
            params: self.model.params()?,
            disorder: self.model.field.clone(),
            n_list: e.n_list.clone(),
            distances: e.distances.clone(),
            realizations: e.realizations,
            master_seed: e.master_seed,
            s: e.s,
            epsilon: e.epsilon,
            n_max: e.n_max,
            energy: e.energy,
            confidence: e.confidence,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let c: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        let p = c.model.params().unwrap();
        assert_eq!(p.boundary, 0.5 * (1.0 - 1.0 / 5.0));
        assert_eq!(c.ensemble_config().unwrap().s, 0.5);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"model": {"anisotrpy": 2}}"#).is_err());
    }

    #[test]
    fn invalid_model_is_rejected() {
        let c: RunConfig = serde_json::from_str(r#"{"model": {"anisotropy": 0.5}}"#).unwrap();
        assert!(c.model.params().is_err());
    }
}
