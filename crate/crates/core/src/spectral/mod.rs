//! Droplet bands, diagonalization, resolvents and Schur complements.

mod band;
mod bulk;
mod data;
mod lowband;
mod resolvent;
mod schur;
mod window;

pub use band::{droplet_band, droplet_band_limit, DropletWindow, Interval};
pub use bulk::{bulk_minimum, bulk_restriction_bound_check};
pub use data::{diagonalize_full, eigenvalues_full, EnergySet, SpectralData, SpectrumRow, CLUSTER_TOL, MAX_DENSE_DIM};
pub use lowband::{spectrum_points, RITZ_TOL};
pub use resolvent::{greens_columns, greens_element, greens_element_config, spectral_distance, RESOLVENT_GAP};
pub use schur::{schur_complement, SchurData};
pub use window::{diagonalize_window, WindowMethod, WindowReport, DENSE_PREFERRED_DIM};
