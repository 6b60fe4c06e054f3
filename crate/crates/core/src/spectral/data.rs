use std::ops::Range;

use ndarray::{s, Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use super::band::Interval;
use crate::error::{Error, Result};
use crate::linalg::{dense, SparseSym};
use crate::scalar::Real;

/// Largest dimension diagonalized densely.
pub const MAX_DENSE_DIM: usize = 4000;

/// Relative tolerance grouping eigenvalues into degeneracy clusters.
pub const CLUSTER_TOL: f64 = 1e-9;

/// Eigenpairs of a symmetric operator, complete on a stated energy range.
#[derive(Clone, Debug)]
pub struct SpectralData<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors in the columns.
    pub vectors: Array2<T>,
    /// Index ranges of eigenvalues within `CLUSTER_TOL * norm` of a neighbor.
    pub clusters: Vec<Range<usize>>,
    /// Energy range on which the list is complete; `None` for the whole
    /// spectrum.
    pub range: Option<Interval>,
    /// Indices of eigenvalues lying in `window`.
    pub window_members: Vec<usize>,
    pub window: Option<Interval>,
    /// Norm scale used for clustering and residual tolerances.
    pub scale: T,
}

/// Energy set selecting eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub enum EnergySet {
    Interval(Interval),
    Indices(Vec<usize>),
}

fn cluster_ranges<T: Real>(values: &[T], tol: T) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

impl<T: Real> SpectralData<T> {
    pub fn from_pairs(
        values: Vec<T>,
        vectors: Array2<T>,
        scale: T,
        range: Option<Interval>,
    ) -> Self {
        assert_eq!(values.len(), vectors.ncols());
        let clusters = cluster_ranges(&values, T::of(CLUSTER_TOL) * scale.max(T::one()));
        SpectralData {
            values,
            vectors,
            clusters,
            range,
            window_members: Vec::new(),
            window: None,
            scale,
        }
    }

    pub fn with_window(mut self, window: Interval) -> Self {
        self.window_members = (0..self.len())
            .filter(|&a| window.contains(self.values[a].f64()))
            .collect();
        self.window = Some(window);
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn vector(&self, a: usize) -> ArrayView1<'_, T> {
        self.vectors.column(a)
    }

    /// Indices of eigenvalues in `set`. Clusters are kept whole: a cluster
    /// is selected when its mean lies in the interval.
    pub fn select(&self, set: &EnergySet) -> Vec<usize> {
        match set {
            EnergySet::Indices(ix) => {
                let mut v = ix.clone();
                v.sort_unstable();
                v.dedup();
                v
            }
            EnergySet::Interval(iv) => self
                .clusters
                .iter()
                .filter(|c| {
                    iv.contains(self.cluster_mean(c))
                })
                .flat_map(|c| c.clone())
                .collect(),
        }
    }

    pub fn cluster_mean(&self, c: &Range<usize>) -> f64 {
        c.clone().map(|a| self.values[a].f64()).sum::<f64>() / c.len() as f64
    }

    /// Clusters whose mean lies in the interval.
    pub fn clusters_in(&self, iv: &Interval) -> Vec<Range<usize>> {
        self.clusters
            .iter()
            .filter(|c| {
                iv.contains(self.cluster_mean(c))
            })
            .cloned()
            .collect()
    }

    /// `P_F = sum_{a in F} psi_a psi_a^T`.
    pub fn projection(&self, set: &EnergySet) -> Array2<T> {
        let ix = self.select(set);
        let n = self.dim();
        let mut v = Array2::zeros((n, ix.len()));
        for (k, &a) in ix.iter().enumerate() {
            v.column_mut(k).assign(&self.vector(a));
        }
        v.dot(&v.t())
    }

    /// `max_a ||H psi_a - E_a psi_a||`.
    pub fn max_residual(&self, h: &SparseSym<T>) -> T {
        let n = self.dim();
        let mut y = vec![T::zero(); n];
        let mut worst = T::zero();
        for a in 0..self.len() {
            let x: Vec<T> = self.vector(a).to_vec();
            h.matvec(&x, &mut y);
            let r = y
                .iter()
                .zip(&x)
                .map(|(&hy, &xv)| {
                    let d = hy - self.values[a] * xv;
                    d * d
                })
                .sum::<T>()
                .sqrt();
            worst = worst.max(r);
        }
        worst
    }

    /// `max |V^T V - I|`.
    pub fn orthonormality_defect(&self) -> T {
        let g = self.vectors.t().dot(&self.vectors);
        let id = Array2::<T>::eye(self.len());
        dense::max_abs(&(g - id))
    }

    /// Smallest gap between consecutive eigenvalues.
    pub fn min_gap(&self) -> T {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::infinity(), T::min)
    }

    /// Rows `(index, eigenvalue, in_window)` for export.
    pub fn rows(&self) -> Vec<SpectrumRow> {
        (0..self.len())
            .map(|a| SpectrumRow {
                index: a,
                eigenvalue: self.values[a].f64(),
                in_window: self.window_members.binary_search(&a).is_ok(),
            })
            .collect()
    }

    /// Restriction of the eigenvector `a` to the given rows.
    pub fn vector_rows(&self, a: usize, rows: &[usize]) -> Array1<T> {
        let v = self.vector(a);
        rows.iter().map(|&r| v[r]).collect()
    }

    /// Eigenvectors of the cluster `c` as columns.
    pub fn cluster_vectors(&self, c: &Range<usize>) -> ndarray::ArrayView2<'_, T> {
        self.vectors.slice(s![.., c.clone()])
    }
}

/// One exported eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub eigenvalue: f64,
    pub in_window: bool,
}

/// All eigenpairs of a symmetric sparse matrix by dense diagonalization.
pub fn diagonalize_full<T: Real>(h: &SparseSym<T>) -> Result<SpectralData<T>> {
    let n = h.dim();
    if n > MAX_DENSE_DIM {
        return Err(Error::Capacity {
            dim: n as u64,
            limit: MAX_DENSE_DIM as u64,
        });
    }
    let (w, v) = dense::eigh(&h.to_dense())?;
    let scale = w.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    Ok(SpectralData::from_pairs(w.to_vec(), v, scale, None))
}

/// Eigenvalues only, dense.
pub fn eigenvalues_full<T: Real>(h: &SparseSym<T>) -> Result<Vec<T>> {
    let n = h.dim();
    if n > MAX_DENSE_DIM {
        return Err(Error::Capacity {
            dim: n as u64,
            limit: MAX_DENSE_DIM as u64,
        });
    }
    Ok(dense::eigvalsh(&h.to_dense())?.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_sector_hamiltonian, sample_disorder, ModelParams};

    #[test]
    fn full_diagonalization_quality() {
        let p = ModelParams::new(3.0, 2.0, 6).unwrap();
        let w = sample_disorder(&Default::default(), 6, 1).unwrap();
        let h = build_sector_hamiltonian::<f64>(2, &p, &w).unwrap();
        let d = diagonalize_full(&h.matrix).unwrap();
        assert_eq!(d.len(), h.dim());
        assert!(d.max_residual(&h.matrix) <= 1e-10 * d.scale);
        assert!(d.orthonormality_defect() <= 1e-10);
        assert!(d.min_gap() > 1e-12);
    }

    #[test]
    fn projections() {
        let p = ModelParams::new(2.0, 1.0, 3).unwrap();
        let w = sample_disorder(&Default::default(), 3, 2).unwrap();
        let h = build_sector_hamiltonian::<f64>(2, &p, &w).unwrap();
        let d = diagonalize_full(&h.matrix).unwrap();
        let all = d.projection(&EnergySet::Interval(Interval::new(-10.0, 100.0).unwrap()));
        assert!(dense::max_abs(&(all - Array2::<f64>::eye(h.dim()))) < 1e-12);
        let none = d.projection(&EnergySet::Interval(Interval::new(-10.0, -5.0).unwrap()));
        assert!(dense::max_abs(&none) == 0.0);
        let mid = d.values[10];
        let a = d.projection(&EnergySet::Interval(Interval::new(-10.0, mid).unwrap()));
        let b = d.projection(&EnergySet::Interval(Interval::new(mid + 1e-9, 100.0).unwrap()));
        assert!(dense::max_abs(&(a.dot(&a) - &a)) < 1e-12);
        let tr = |m: &Array2<f64>| m.diag().sum();
        assert!((tr(&a) + tr(&b) - h.dim() as f64).abs() < 1e-10);
        assert!((tr(&a) - 11.0).abs() < 1e-10);
    }

    #[test]
    fn clustering() {
        let c = cluster_ranges(&[0.0, 1e-12, 1.0, 2.0, 2.0], 1e-9);
        assert_eq!(c, vec![0..2, 2..3, 3..5]);
    }
}
