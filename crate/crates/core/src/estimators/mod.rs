//! Disorder ensembles and checks of the deterministic and probabilistic
//! bounds: Combes-Thomas, fractional moments, Wegner, two-box separation and
//! eigencorrelator decay.

mod ct;
mod ensemble;
mod separation;
mod stats;
mod wegner;

pub use ct::{
    bulk_indices, combes_thomas_batch, combes_thomas_verify, ct_sweep, edge_projection_ct_batch,
    edge_projection_ct_verify, random_set, CTCheck, CTParameters, CTSweepConfig, CTSweepReport, SetPair,
};
pub use ensemble::{
    edge_anchor, eigencorrelator_decay, fractional_moment_scan, site_pair, DecayRecord, EnsembleConfig,
};
pub use separation::{spectral_separation, SeparationOutcome, SeparationParameters};
pub use stats::{fit_exponential, wilson_upper, ExpFit, FitPoint, RunningStats};
pub use wegner::{wegner_constant, wegner_empirical, WegnerOutcome, WegnerParameters};

/// Stream offset of auxiliary draws (random sets) tied to a realization.
pub const AUX_STREAM: u64 = 1 << 62;

/// Stream offset between successive redraws of a singular realization.
pub const RESAMPLE_STRIDE: u64 = 1 << 40;
