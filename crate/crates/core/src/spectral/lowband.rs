use super::band::Interval;
use super::data::{eigenvalues_full, MAX_DENSE_DIM};
use crate::error::Result;
use crate::linalg::iterative::lanczos_ritz_below;
use crate::linalg::SparseSym;
use crate::scalar::Real;

/// Largest residual bound of a Ritz value accepted as an eigenvalue.
pub const RITZ_TOL: f64 = 1e-3;

/// Eigenvalues of `h` inside `range`: exact for dense sizes, otherwise the
/// converged Ritz values of an unreorthogonalized Lanczos run, each within
/// [`RITZ_TOL`] of the spectrum.
pub fn spectrum_points<T: Real>(h: &SparseSym<T>, range: Interval, steps: usize, seed: u64) -> Result<Vec<f64>> {
    let mut pts: Vec<f64> = if h.dim() <= MAX_DENSE_DIM {
        eigenvalues_full(h)?.iter().map(|v| v.f64()).collect()
    } else {
        lanczos_ritz_below(h, steps, T::of(range.hi), seed)?
            .into_iter()
            .filter(|r| r.residual.f64() <= RITZ_TOL)
            .map(|r| r.value.f64())
            .collect()
    };
    pts.retain(|&e| range.contains(e));
    pts.sort_by(f64::total_cmp);
    Ok(pts)
}
