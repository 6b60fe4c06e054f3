//! Linear algebra kernels: sparse symmetric storage, LAPACK-backed dense
//! routines, and iterative solvers.

pub mod dense;
pub mod iterative;
pub mod sparse;

pub use sparse::SparseSym;
