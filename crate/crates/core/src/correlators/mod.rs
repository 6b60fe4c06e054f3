//! Spin-level correlators, partition suprema, restricted dynamics, block
//! decompositions and sector eigenfunction correlators.

mod blocks;
mod eigen;
mod observable;
mod record;
mod sector;

pub use blocks::{block_decompose, BlockDecomposition, Sign};
pub use eigen::{
    certified_partition_bound, default_time_grid, dynamical_sup, envelope_check, evolve_tilde, partition_sup,
    restricted_evolution, set_correlator, set_correlator_masked, state_correlator, vanishing_identities_check,
    DynamicalSup, EigenBasis, EnvelopeReport, PartitionSup, VanishingReport,
};
pub use observable::LocalObservable;
pub use record::{CorrelatorKind, CorrelatorRecord};
pub use sector::{
    cluster_trace_norm, correlator_apriori_constant, sector_correlator, spin_number_correlator, sum_identity_check,
    SumIdentityReport,
};
