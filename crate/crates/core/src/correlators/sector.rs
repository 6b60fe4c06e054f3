use ndarray::{Array2, ArrayView2, Axis};

use super::eigen::EigenBasis;
use crate::config_space::Site;
use crate::error::{param, Result};
use crate::linalg::dense;
use crate::operators::SectorOperator;
use crate::scalar::Real;
use crate::spectral::{Interval, SpectralData};

/// `||A B^T||_1` for the row blocks `A`, `B` of a cluster of eigenvectors.
///
/// With `G = A^T A` and `A = U G^{1/2}`, `A B^T` shares its singular values
/// with the cluster-sized matrix `G_A^{1/2} G_B^{1/2}`.
pub fn cluster_trace_norm<T: Real>(a: ArrayView2<'_, T>, b: ArrayView2<'_, T>) -> Result<T> {
    let c = a.ncols();
    assert_eq!(c, b.ncols());
    if a.nrows() == 0 || b.nrows() == 0 || c == 0 {
        return Ok(T::zero());
    }
    if c == 1 {
        let norm = |m: ArrayView2<'_, T>| m.iter().map(|&v| v * v).sum::<T>().sqrt();
        return Ok(norm(a) * norm(b));
    }
    let root = |m: ArrayView2<'_, T>| -> Result<Array2<T>> {
        let (w, v) = dense::eigh(&m.t().dot(&m))?;
        let mut vs = v.clone();
        for (mut col, &e) in vs.axis_iter_mut(Axis(1)).zip(w.iter()) {
            col.mapv_inplace(|x| x * e.max(T::zero()).sqrt());
        }
        Ok(vs.dot(&v.t()))
    };
    dense::trace_norm(&root(a)?.dot(&root(b)?))
}

fn rows_with_site<T: Real>(op: &SectorOperator<T>, site: Site) -> Vec<usize> {
    (0..op.dim())
        .filter(|&r| op.config(r).contains_site(site))
        .collect()
}

/// `Q_N(i, j; I) = sum_C ||Q_i P_C Q_j||_1` over eigenvalue clusters `C` in
/// the window.
pub fn sector_correlator<T: Real>(
    op: &SectorOperator<T>,
    data: &SpectralData<T>,
    i: Site,
    j: Site,
    window: &Interval,
) -> Result<T> {
    if data.dim() != op.dim() {
        return param("spectral data does not belong to the operator");
    }
    let (si, sj) = (rows_with_site(op, i), rows_with_site(op, j));
    cluster_sum(data, &si, &sj, window)
}

fn cluster_sum<T: Real>(data: &SpectralData<T>, si: &[usize], sj: &[usize], window: &Interval) -> Result<T> {
    let mut total = T::zero();
    for c in data.clusters_in(window) {
        let v = data.cluster_vectors(&c);
        total += cluster_trace_norm(v.select(Axis(0), si).view(), v.select(Axis(0), sj).view())?;
    }
    Ok(total)
}

/// `sum_C ||N_i P_C N_j||_1` on the full chain.
pub fn spin_number_correlator<T: Real>(basis: &EigenBasis<T>, i: Site, j: Site, window: &Interval) -> Result<T> {
    let l = basis.half_length;
    if i.abs() > l || j.abs() > l {
        return param("site outside the chain");
    }
    let rows = |x: Site| -> Vec<usize> { (0..basis.dim()).filter(|s| s >> (x + l) & 1 == 1).collect() };
    cluster_sum(&basis.data, &rows(i), &rows(j), window)
}

/// Two evaluations of the same eigenfunction correlator: summed over
/// particle sectors, and directly on the full chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SumIdentityReport {
    pub sector_sum: f64,
    pub spin_sum: f64,
}

impl SumIdentityReport {
    pub const TOLERANCE: f64 = 1e-8;

    pub fn defect(&self) -> f64 {
        (self.sector_sum - self.spin_sum).abs()
    }

    pub fn holds(&self) -> bool {
        self.defect() <= Self::TOLERANCE
    }
}

pub fn sum_identity_check<T: Real>(
    basis: &EigenBasis<T>,
    sectors: &[(&SectorOperator<T>, &SpectralData<T>)],
    i: Site,
    j: Site,
    window: &Interval,
) -> Result<SumIdentityReport> {
    let mut sector_sum = 0.0;
    for (op, data) in sectors {
        sector_sum += sector_correlator(op, data, i, j, window)?.f64();
    }
    Ok(SumIdentityReport {
        sector_sum,
        spin_sum: spin_number_correlator(basis, i, j, window)?.f64(),
    })
}

/// `C = (16 Delta / (delta (Delta - 1))) (8 / (delta (Delta - 1)) + 2)`, so
/// that `Q_N(i, j; I_{1,delta}) <= C N`.
pub fn correlator_apriori_constant(anisotropy: f64, margin: f64) -> f64 {
    let g = margin * (anisotropy - 1.0);
    16.0 * anisotropy / g * (8.0 / g + 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn gram_route_matches_svd_of_the_block() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for c in 1..4 {
            let a = Array2::<f64>::from_shape_fn((7, c), |_| StandardNormal.sample(&mut rng));
            let b = Array2::<f64>::from_shape_fn((5, c), |_| StandardNormal.sample(&mut rng));
            let direct = dense::trace_norm(&a.dot(&b.t())).unwrap();
            let fast = cluster_trace_norm(a.view(), b.view()).unwrap();
            assert!((direct - fast).abs() < 1e-10 * direct.max(1.0));
        }
    }
}
