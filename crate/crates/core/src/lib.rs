pub mod config_space;
pub mod correlators;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod operators;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double precision instances of the generic core types.
pub type SectorOperatorF64 = operators::SectorOperator<f64>;
pub type SpinOperatorF64 = operators::SpinOperator<f64>;
pub type SpectralDataF64 = spectral::SpectralData<f64>;
pub type EigenBasisF64 = correlators::EigenBasis<f64>;
pub type LocalObservableF64 = correlators::LocalObservable<f64>;

/// Single precision instances of the generic core types.
pub type SectorOperatorF32 = operators::SectorOperator<f32>;
pub type SpinOperatorF32 = operators::SpinOperator<f32>;
pub type SpectralDataF32 = spectral::SpectralData<f32>;
pub type EigenBasisF32 = correlators::EigenBasis<f32>;
pub type LocalObservableF32 = correlators::LocalObservable<f32>;
