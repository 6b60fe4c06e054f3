//! Restrictions, decouplings and potential modifications of sector
//! operators.

use std::collections::HashSet;

use crate::config_space::{Config, Site};
use crate::error::{Error, Result};
use crate::linalg::SparseSym;
use crate::scalar::Real;

use super::sector::{SectorOperator, Surgery};

/// `Gamma = H - H_decoupled`: the hopping terms crossing the boundary of the
/// decoupled set.
#[derive(Clone, Debug)]
pub struct BoundaryCoupling<T> {
    pub matrix: SparseSym<T>,
}

impl<T: Real> BoundaryCoupling<T> {
    pub fn is_zero(&self) -> bool {
        self.matrix.nnz() == 0
    }

    /// Spectral norm; dense for small matrices, otherwise the row-sum bound.
    pub fn norm(&self) -> Result<T> {
        if self.matrix.dim() <= 2000 {
            let w = crate::linalg::dense::eigvalsh(&self.matrix.to_dense())?;
            Ok(w.iter().fold(T::zero(), |m, &v| m.max(v.abs())))
        } else {
            Ok(self.matrix.max_row_sum())
        }
    }
}

impl<T: Real> SectorOperator<T> {
    /// `P_S H P_S` on the sorted configuration indices `set`.
    pub fn restrict(&self, set: &[usize]) -> Result<SectorOperator<T>> {
        if set.is_empty() {
            return Err(Error::EmptySet("restriction set"));
        }
        let rows = self.rows_of(set)?;
        let mut out = self.clone();
        out.matrix = self.matrix.principal(&rows);
        out.states = set.to_vec();
        out.surgery.push(Surgery::Restrict { size: set.len() });
        Ok(out)
    }

    /// `chi_A H chi_A + (1 - chi_A) H (1 - chi_A)` and the removed coupling.
    pub fn decouple(&self, set: &[usize]) -> Result<(SectorOperator<T>, BoundaryCoupling<T>)> {
        if set.is_empty() {
            return Err(Error::EmptySet("decoupling set"));
        }
        let rows = self.rows_of(set)?;
        let mut inside = vec![false; self.dim()];
        for r in rows {
            inside[r] = true;
        }
        let kept = self.matrix.map_entries(|i, j, v| if inside[i] == inside[j] { v } else { T::zero() });
        let cut = self.matrix.map_entries(|i, j, v| if inside[i] != inside[j] { v } else { T::zero() });
        let mut out = self.clone();
        out.matrix = kept;
        out.surgery.push(Surgery::Decouple {
            set_size: set.len(),
            cut_entries: cut.nnz(),
        });
        Ok((out, BoundaryCoupling { matrix: cut }))
    }

    /// Subtracts `lambda V_omega` on configurations lying in both
    /// `S_M(x)` and `S_M(y)`.
    pub fn delete_overlap_potential(&self, x: &Config, y: &Config, half_width: usize) -> SectorOperator<T> {
        let m = half_width as Site;
        let wx: HashSet<Site> = (x.first() - m..=x.first() + m).collect();
        let wy: HashSet<Site> = (y.first() - m..=y.first() + m).collect();
        let lambda = self.params.disorder;
        let mut shift = vec![T::zero(); self.dim()];
        let mut overlap = 0;
        let mut buf = Vec::new();
        for (r, &i) in self.states.iter().enumerate() {
            self.space.unrank_into(i, &mut buf);
            let in_x = buf.iter().any(|s| wx.contains(s));
            let in_y = buf.iter().any(|s| wy.contains(s));
            if in_x && in_y {
                shift[r] = T::of(-lambda * self.disorder.potential(&buf));
                overlap += 1;
            }
        }
        let mut out = self.clone();
        out.matrix = self.matrix.add_diagonal(&shift);
        out.surgery.push(Surgery::DeleteOverlapPotential {
            x: x.clone(),
            y: y.clone(),
            half_width,
            overlap,
        });
        out
    }

    /// `H + P_1`: adds one on every single-cluster configuration.
    pub fn add_edge_projection(&self) -> SectorOperator<T> {
        let edge = self.edge_rows();
        let mut d = vec![T::zero(); self.dim()];
        for &r in &edge {
            d[r] = T::one();
        }
        let mut out = self.clone();
        out.matrix = self.matrix.add_diagonal(&d);
        out.surgery.push(Surgery::EdgeProjection { edge_size: edge.len() });
        out
    }
}
