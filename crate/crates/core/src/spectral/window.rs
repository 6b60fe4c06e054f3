//! Eigenpairs of a sector operator inside an energy window at the bottom of
//! the droplet spectrum.
//!
//! Large sectors are handled through the Schur complement on the edge
//! `X_{N,1}`: when the window lies below the Gershgorin floor of the bulk
//! block `B`, the inertia of `H - E` equals the inertia of
//! `K(E) = A - E - V (B - E)^{-1} V^T`. The number of eigenvalues below the
//! window top is read off `K`, and each eigenvalue is located as the zero of
//! the matching eigenvalue branch of `K(E)`, which decreases with slope at
//! most `-1`.

use ndarray::{Array1, Array2};

use super::band::Interval;
use super::data::{diagonalize_full, SpectralData, MAX_DENSE_DIM};
use crate::error::{Error, Result};
use crate::linalg::iterative::block_cg;
use crate::linalg::{dense, SparseSym};
use crate::operators::SectorOperator;
use crate::scalar::Real;

/// Sectors at or below this dimension are diagonalized densely even when
/// the edge reduction applies.
pub const DENSE_PREFERRED_DIM: usize = 600;

/// How a window computation was completed.
#[derive(Clone, Debug, PartialEq)]
pub enum WindowMethod {
    /// Every row's Gershgorin disc lies above the window.
    EmptyByGershgorin,
    Dense,
    /// Edge reduction with the number of `K(E)` evaluations.
    EdgeSchur { evaluations: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowReport {
    pub method: WindowMethod,
    /// Number of eigenvalues at most the window top, from the inertia count
    /// (edge reduction) or the full spectrum.
    pub count_below_top: usize,
    pub max_residual: f64,
}

/// All eigenpairs of `op` with eigenvalue in `window`, with a completeness
/// certificate.
pub fn diagonalize_window<T: Real>(
    op: &SectorOperator<T>,
    window: Interval,
) -> Result<(SpectralData<T>, WindowReport)> {
    let h = &op.matrix;
    let n = h.dim();
    let top = T::of(window.hi);
    let scale = h.max_row_sum();
    if h.gershgorin_lower() > top {
        let data = SpectralData::from_pairs(Vec::new(), Array2::zeros((n, 0)), scale, Some(window))
            .with_window(window);
        return Ok((
            data,
            WindowReport {
                method: WindowMethod::EmptyByGershgorin,
                count_below_top: 0,
                max_residual: 0.0,
            },
        ));
    }
    let (edge, bulk) = op.split_by_clusters(1);
    let schur_ok = !bulk.is_empty() && {
        let floor = h.principal(&bulk).gershgorin_lower();
        floor - top > T::of(1e-12) * scale.max(T::one())
    };
    if n <= MAX_DENSE_DIM && (n <= DENSE_PREFERRED_DIM || !schur_ok) {
        let full = diagonalize_full(h)?;
        let count = full.values.iter().filter(|&&e| e <= top).count();
        let keep: Vec<usize> = (0..full.len())
            .filter(|&a| window.contains(full.values[a].f64()))
            .collect();
        let values = keep.iter().map(|&a| full.values[a]).collect();
        let mut vectors = Array2::zeros((n, keep.len()));
        for (k, &a) in keep.iter().enumerate() {
            vectors.column_mut(k).assign(&full.vector(a));
        }
        let data = SpectralData::from_pairs(values, vectors, full.scale, Some(window)).with_window(window);
        let res = data.max_residual(h).f64();
        return Ok((
            data,
            WindowReport {
                method: WindowMethod::Dense,
                count_below_top: count,
                max_residual: res,
            },
        ));
    }
    if !schur_ok {
        return Err(Error::Unsupported(format!(
            "window [{}, {}] reaches the bulk spectrum of a sector of dimension {n}",
            window.lo, window.hi
        )));
    }
    let mut solver = EdgeSchur::new(h, edge, bulk);
    let lower = h.gershgorin_lower().min(top);
    let (mu_top, _, _) = solver.eval(top)?;
    let count = mu_top.iter().filter(|&&m| m <= T::zero()).count();
    let mut roots = Vec::with_capacity(count);
    for j in 0..count {
        roots.push(solver.root(j, lower, top, scale)?);
    }
    let mut psi = Array2::zeros((n, count));
    for (k, &e) in roots.iter().enumerate() {
        let (_, u, w) = solver.eval(e)?;
        let col = solver.lift(&u.column(k).to_owned(), &w);
        psi.column_mut(k).assign(&col);
    }
    let (values, vectors) = rayleigh_ritz(h, psi)?;
    let data = SpectralData::from_pairs(values, vectors, scale, Some(window));
    let res = data.max_residual(h).f64();
    let tol = 1e-10 * scale.f64().max(1.0);
    if res > tol {
        return Err(Error::NonConvergence {
            detail: "edge reduction eigenpairs".into(),
            max_residual: res,
        });
    }
    let keep: Vec<usize> = (0..data.len())
        .filter(|&a| window.contains(data.values[a].f64()))
        .collect();
    let mut vecs = Array2::zeros((n, keep.len()));
    for (k, &a) in keep.iter().enumerate() {
        vecs.column_mut(k).assign(&data.vector(a));
    }
    let vals = keep.iter().map(|&a| data.values[a]).collect();
    let out = SpectralData::from_pairs(vals, vecs, scale, Some(window)).with_window(window);
    Ok((
        out,
        WindowReport {
            method: WindowMethod::EdgeSchur {
                evaluations: solver.evaluations,
            },
            count_below_top: count,
            max_residual: res,
        },
    ))
}

/// Orthonormalizes the columns of `psi` and diagonalizes `H` on their span.
fn rayleigh_ritz<T: Real>(h: &SparseSym<T>, psi: Array2<T>) -> Result<(Vec<T>, Array2<T>)> {
    let (n, k) = psi.dim();
    if k == 0 {
        return Ok((Vec::new(), psi));
    }
    let gram = psi.t().dot(&psi);
    let (g, u) = dense::eigh(&gram)?;
    let mut basis = psi.dot(&u);
    for (mut col, &gv) in basis.columns_mut().into_iter().zip(g.iter()) {
        if gv <= T::zero() {
            return Err(Error::NonConvergence {
                detail: "edge reduction produced dependent vectors".into(),
                max_residual: f64::INFINITY,
            });
        }
        col.mapv_inplace(|x| x / gv.sqrt());
    }
    let mut hb = Array2::zeros((n, k));
    let mut y = vec![T::zero(); n];
    for c in 0..k {
        let x = basis.column(c).to_vec();
        h.matvec(&x, &mut y);
        hb.column_mut(c).assign(&Array1::from(y.clone()));
    }
    let small = basis.t().dot(&hb);
    let small = (&small + &small.t()) * T::of(0.5);
    let (w, z) = dense::eigh(&small)?;
    Ok((w.to_vec(), basis.dot(&z)))
}

struct EdgeSchur<'a, T> {
    h: &'a SparseSym<T>,
    edge: Vec<usize>,
    bulk: Vec<usize>,
    bulk_op: SparseSym<T>,
    a: Array2<T>,
    /// `V^T` as an `nb x ne` row-major block.
    vt: Vec<T>,
    /// Warm start and latest solution of `(B - E) W = V^T`.
    w: Vec<T>,
    evaluations: usize,
}

impl<'a, T: Real> EdgeSchur<'a, T> {
    fn new(h: &'a SparseSym<T>, edge: Vec<usize>, bulk: Vec<usize>) -> Self {
        let ne = edge.len();
        let nb = bulk.len();
        let bulk_op = h.principal(&bulk);
        let a = h.block(&edge, &edge);
        let mut pos = vec![usize::MAX; h.dim()];
        for (k, &r) in bulk.iter().enumerate() {
            pos[r] = k;
        }
        let mut vt = vec![T::zero(); nb * ne];
        for (i, &r) in edge.iter().enumerate() {
            for (c, v) in h.row(r) {
                if pos[c] != usize::MAX {
                    vt[pos[c] * ne + i] = v;
                }
            }
        }
        EdgeSchur {
            h,
            edge,
            bulk,
            bulk_op,
            a,
            vt,
            w: vec![T::zero(); nb * ne],
            evaluations: 0,
        }
    }

    /// Eigen-decomposition of `K(E)` and the solution `W = (B - E)^{-1} V^T`.
    fn eval(&mut self, e: T) -> Result<(Array1<T>, Array2<T>, Vec<T>)> {
        let ne = self.edge.len();
        let nb = self.bulk.len();
        block_cg(&self.bulk_op, e, ne, &self.vt, &mut self.w, T::of(1e-13), 20 * nb.max(50))?;
        self.evaluations += 1;
        let mut k = self.a.clone();
        for i in 0..ne {
            k[(i, i)] -= e;
        }
        for b in 0..nb {
            let vrow = &self.vt[b * ne..(b + 1) * ne];
            let wrow = &self.w[b * ne..(b + 1) * ne];
            for i in 0..ne {
                if vrow[i] == T::zero() {
                    continue;
                }
                for j in 0..ne {
                    k[(i, j)] -= vrow[i] * wrow[j];
                }
            }
        }
        let k = (&k + &k.t()) * T::of(0.5);
        let (mu, u) = dense::eigh(&k)?;
        Ok((mu, u, self.w.clone()))
    }

    /// Slope `-1 - |W u|^2` of the branch with eigenvector `u`.
    fn slope(&self, u: &Array1<T>, w: &[T]) -> T {
        let ne = self.edge.len();
        let mut s = T::zero();
        for b in 0..self.bulk.len() {
            let t: T = (0..ne).map(|i| w[b * ne + i] * u[i]).sum();
            s += t * t;
        }
        -T::one() - s
    }

    /// Full vector with edge part `u` and bulk part `-W u`.
    fn lift(&self, u: &Array1<T>, w: &[T]) -> Array1<T> {
        let ne = self.edge.len();
        let mut out = Array1::zeros(self.h.dim());
        for (i, &r) in self.edge.iter().enumerate() {
            out[r] = u[i];
        }
        for (b, &r) in self.bulk.iter().enumerate() {
            out[r] = -(0..ne).map(|i| w[b * ne + i] * u[i]).sum::<T>();
        }
        out
    }

    /// Zero of the `j`-th eigenvalue branch of `K` in `[lower, upper]`.
    fn root(&mut self, j: usize, lower: T, upper: T, scale: T) -> Result<T> {
        let tol = T::of(1e-13) * scale.max(T::one());
        let (mut a, mut b) = (lower, upper);
        let mut e = upper;
        for _ in 0..200 {
            let (mu, u, w) = self.eval(e)?;
            let m = mu[j];
            if m.abs() <= tol {
                return Ok(e);
            }
            if m < T::zero() {
                b = e;
            } else {
                a = e;
            }
            if b - a <= T::of(4.0) * T::epsilon() * scale.max(T::one()) {
                return Ok(e);
            }
            let d = self.slope(&u.column(j).to_owned(), &w);
            let next = e - m / d;
            e = if next > a && next < b { next } else { T::of(0.5) * (a + b) };
        }
        Err(Error::NonConvergence {
            detail: format!("edge reduction root {j}"),
            max_residual: f64::NAN,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_sector_hamiltonian, sample_disorder, DisorderRealization, ModelParams};
    use crate::spectral::DropletWindow;

    #[test]
    fn edge_reduction_matches_dense() {
        for (n, l, lam, seed) in [(2, 20, 1.0, 1), (3, 8, 0.5, 2), (2, 24, 0.0, 0)] {
            let p = ModelParams::new(5.0, lam, l).unwrap();
            let w = if lam > 0.0 {
                sample_disorder(&Default::default(), l, seed).unwrap()
            } else {
                DisorderRealization::zero(l)
            };
            let h = build_sector_hamiltonian::<f64>(n, &p, &w).unwrap();
            assert!(h.dim() > DENSE_PREFERRED_DIM);
            let win = DropletWindow::first(5.0, 0.1).unwrap().interval();
            let (data, report) = diagonalize_window(&h, win).unwrap();
            assert!(matches!(report.method, WindowMethod::EdgeSchur { .. }));
            let full = diagonalize_full(&h.matrix).unwrap();
            let want: Vec<f64> = full.values.iter().copied().filter(|&e| win.contains(e)).collect();
            assert_eq!(data.len(), want.len(), "N = {n}, L = {l}");
            for (a, b) in data.values.iter().zip(&want) {
                assert!((a - b).abs() < 1e-10);
            }
            assert!(data.orthonormality_defect() < 1e-10);
            assert_eq!(report.count_below_top, full.values.iter().filter(|&&e| e <= win.hi).count());
        }
    }

    #[test]
    fn gershgorin_certificate() {
        let p = ModelParams::new(5.0, 4.0, 6).unwrap();
        let w = DisorderRealization::from_values(Default::default(), 6, vec![1.0; 13]).unwrap();
        let h = build_sector_hamiltonian::<f64>(3, &p, &w).unwrap();
        let win = DropletWindow::first(5.0, 0.1).unwrap().interval();
        let (data, report) = diagonalize_window(&h, win).unwrap();
        assert!(data.is_empty());
        assert_eq!(report.method, WindowMethod::EmptyByGershgorin);
    }
}
