use crate::error::Result;
use crate::linalg::iterative::lanczos_ritz_below;
use crate::operators::SectorOperator;
use crate::scalar::Real;

use super::data::{eigenvalues_full, MAX_DENSE_DIM};

/// Minimum of the spectrum of `op` restricted to configurations with more
/// than `k` clusters; `None` when that set is empty. Dense below
/// [`MAX_DENSE_DIM`], otherwise the smallest Lanczos Ritz value (an upper
/// estimate of the minimum) unless Gershgorin already decides.
pub fn bulk_minimum<T: Real>(op: &SectorOperator<T>, k: usize) -> Result<Option<T>> {
    let (_, bulk) = op.split_by_clusters(k);
    if bulk.is_empty() {
        return Ok(None);
    }
    let b = op.matrix.principal(&bulk);
    if b.dim() <= MAX_DENSE_DIM {
        return Ok(Some(eigenvalues_full(&b)?[0]));
    }
    let ritz = lanczos_ritz_below(&b, 400, T::infinity(), 17)?;
    Ok(ritz.first().map(|r| r.value))
}

/// Whether `min sigma(H restricted to the bulk beyond k clusters)` is at
/// least `(k + 1)(1 - 1/Delta) - 1e-10`; vacuously true on an empty bulk.
pub fn bulk_restriction_bound_check<T: Real>(op: &SectorOperator<T>, k: usize) -> Result<bool> {
    let floor = (k as f64 + 1.0) * op.params.gap() - 1e-10;
    let (_, bulk) = op.split_by_clusters(k);
    if bulk.is_empty() {
        return Ok(true);
    }
    if op.matrix.principal(&bulk).gershgorin_lower().f64() >= floor {
        return Ok(true);
    }
    Ok(bulk_minimum(op, k)?.is_none_or(|m| m.f64() >= floor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_sector_hamiltonian, sample_disorder, DisorderRealization, ModelParams};

    #[test]
    fn bulk_bounds() {
        let p = ModelParams::new(2.0, 0.0, 6).unwrap();
        let h = build_sector_hamiltonian::<f64>(2, &p, &DisorderRealization::zero(6)).unwrap();
        assert!(bulk_minimum(&h, 1).unwrap().unwrap() >= 1.0 - 1e-12);
        assert!(bulk_restriction_bound_check(&h, 1).unwrap());
        let p = ModelParams::new(3.0, 2.0, 5).unwrap();
        let w = sample_disorder(&Default::default(), 5, 4).unwrap();
        let h = build_sector_hamiltonian::<f64>(3, &p, &w).unwrap();
        assert!(bulk_restriction_bound_check(&h, 1).unwrap());
        assert!(bulk_restriction_bound_check(&h, 2).unwrap());
        assert!(bulk_minimum(&h, 3).unwrap().is_none());
    }
}
