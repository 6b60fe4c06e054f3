//! Model parameters, disorder, the spin Hamiltonian and its particle-number
//! sector operators.

mod disorder;
mod params;
mod sector;
mod spin;
mod surgery;

pub use disorder::{sample_disorder, DisorderRealization, DisorderSpec, SeedToken};
pub use params::{minimal_boundary, ModelParams};
pub use sector::{build_sector_hamiltonian, sector_diagonal, SectorOperator, Surgery};
pub use spin::{bond_term, build_spin_hamiltonian, SpinOperator, MAX_SPIN_SITES};
pub use surgery::BoundaryCoupling;
