use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::dense;
use crate::operators::SectorOperator;
use crate::scalar::Real;

/// Partition of `D = H - E` into edge (`Q`) and bulk (`Qbar`) blocks and the
/// Schur complement `K_E = A - V B^{-1} V^T`.
#[derive(Clone, Debug)]
pub struct SchurData<T> {
    pub energy: T,
    /// Local rows of the single-cluster configurations.
    pub edge_rows: Vec<usize>,
    pub bulk_rows: Vec<usize>,
    pub a: Array2<T>,
    pub b: Array2<T>,
    pub v: Array2<T>,
    pub k: Array2<T>,
    /// `min sigma(B)`, with `B = Qbar (H - E) Qbar`.
    pub b_min: T,
}

/// Schur complement of `op - E` on its edge rows, computed densely.
/// Fails when `B` is not positive definite.
pub fn schur_complement<T: Real>(op: &SectorOperator<T>, energy: T) -> Result<SchurData<T>> {
    let (edge_rows, bulk_rows) = op.split_by_clusters(1);
    if edge_rows.is_empty() {
        return Err(Error::EmptySet("edge part of the operator"));
    }
    let mut a = op.matrix.block(&edge_rows, &edge_rows);
    for i in 0..edge_rows.len() {
        a[(i, i)] -= energy;
    }
    let v = op.matrix.block(&edge_rows, &bulk_rows);
    let mut b = op.matrix.block(&bulk_rows, &bulk_rows);
    for i in 0..bulk_rows.len() {
        b[(i, i)] -= energy;
    }
    if bulk_rows.is_empty() {
        return Ok(SchurData {
            energy,
            k: a.clone(),
            edge_rows,
            bulk_rows,
            a,
            b,
            v,
            b_min: T::infinity(),
        });
    }
    let (bw, bv) = dense::eigh(&b)?;
    let b_min = bw[0];
    if b_min <= T::zero() {
        let e = energy.f64();
        return Err(Error::OutsideWindow {
            energy: e,
            lo: f64::NEG_INFINITY,
            hi: e + b_min.f64(),
        });
    }
    // V B^{-1} V^T = (V U) diag(1/w) (V U)^T
    let vu = v.dot(&bv);
    let mut scaled = vu.clone();
    for (mut col, &w) in scaled.columns_mut().into_iter().zip(bw.iter()) {
        col.mapv_inplace(|x| x / w);
    }
    let k = &a - &scaled.dot(&vu.t());
    let k = (&k + &k.t()) * T::of(0.5);
    Ok(SchurData {
        energy,
        edge_rows,
        bulk_rows,
        a,
        b,
        v,
        k,
        b_min,
    })
}

impl<T: Real> SchurData<T> {
    /// `max |Q (H - E)^{-1} Q K_E - I|`, through a dense inverse of `H - E`.
    pub fn inversion_defect(&self, op: &SectorOperator<T>) -> Result<T> {
        let n = op.dim();
        let mut d = op.matrix.to_dense();
        for i in 0..n {
            d[(i, i)] -= self.energy;
        }
        let inv = dense::sym_inverse(&d)?;
        let ne = self.edge_rows.len();
        let mut qiq = Array2::zeros((ne, ne));
        for (i, &r) in self.edge_rows.iter().enumerate() {
            for (j, &c) in self.edge_rows.iter().enumerate() {
                qiq[(i, j)] = inv[(r, c)];
            }
        }
        Ok(dense::max_abs(&(qiq.dot(&self.k) - Array2::eye(ne))))
    }

    /// `||B^{-1}||`.
    pub fn b_inverse_norm(&self) -> T {
        T::one() / self.b_min
    }

    /// `||V||`.
    pub fn v_norm(&self) -> Result<T> {
        dense::norm2(&self.v)
    }
}
