use serde::{Deserialize, Serialize};

use crate::config_space::Site;
use crate::error::{param, Result};

/// Which correlator a record holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelatorKind {
    State,
    Set,
    Partition,
    Dynamical,
    Sector,
}

/// One evaluated correlator, flat enough for a CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorRecord {
    pub kind: CorrelatorKind,
    pub seed: u64,
    pub stream: u64,
    pub n_particles: usize,
    pub i: Site,
    pub j: Site,
    pub distance: u32,
    pub t: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    pub value: f64,
}

impl CorrelatorRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        kind: CorrelatorKind,
        seed: u64,
        stream: u64,
        n_particles: usize,
        i: Site,
        j: Site,
        t: f64,
        window: (f64, f64),
        value: f64,
    ) -> Result<Self> {
        if !(value >= 0.0) || !value.is_finite() {
            return param(format!("correlator value must be finite and nonnegative, got {value}"));
        }
        Ok(CorrelatorRecord {
            kind,
            seed,
            stream,
            n_particles,
            i,
            j,
            distance: (i - j).unsigned_abs(),
            t,
            window_lo: window.0,
            window_hi: window.1,
            value,
        })
    }
}
