//! Matrix-free solvers for sparse symmetric operators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::SparseSym;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Solves `(A - shift) X = B` for `r` right-hand sides stored row-major,
/// assuming `A - shift` is positive definite. `x` holds the initial guess
/// and receives the solution. Jacobi preconditioned conjugate gradients,
/// run column-wise in lockstep. Returns the number of iterations.
pub fn block_cg<T: Real>(
    a: &SparseSym<T>,
    shift: T,
    r: usize,
    b: &[T],
    x: &mut [T],
    rel_tol: T,
    max_iter: usize,
) -> Result<usize> {
    let n = a.dim();
    assert_eq!(b.len(), n * r);
    assert_eq!(x.len(), n * r);
    if n == 0 || r == 0 {
        return Ok(0);
    }
    let inv_diag: Vec<T> = a
        .diagonal()
        .into_iter()
        .map(|d| {
            let d = d - shift;
            if d > T::zero() {
                T::one() / d
            } else {
                T::one()
            }
        })
        .collect();
    let mut res = vec![T::zero(); n * r];
    a.matvec_block(r, x, &mut res);
    for i in 0..n * r {
        res[i] = b[i] - (res[i] - shift * x[i]);
    }
    let col_norm = |v: &[T], c: usize| -> T {
        (0..n).map(|i| v[i * r + c] * v[i * r + c]).sum::<T>().sqrt()
    };
    let target: Vec<T> = (0..r).map(|c| rel_tol * col_norm(b, c)).collect();
    let mut z: Vec<T> = (0..n * r).map(|k| res[k] * inv_diag[k / r]).collect();
    let mut p = z.clone();
    let mut rz: Vec<T> = (0..r)
        .map(|c| (0..n).map(|i| res[i * r + c] * z[i * r + c]).sum())
        .collect();
    let mut q = vec![T::zero(); n * r];
    for it in 0..max_iter {
        let done = (0..r).all(|c| col_norm(&res, c) <= target[c]);
        if done {
            return Ok(it);
        }
        a.matvec_block(r, &p, &mut q);
        for k in 0..n * r {
            q[k] -= shift * p[k];
        }
        let pq: Vec<T> = (0..r)
            .map(|c| (0..n).map(|i| p[i * r + c] * q[i * r + c]).sum())
            .collect();
        let alpha: Vec<T> = (0..r)
            .map(|c| {
                if pq[c] > T::zero() && rz[c] != T::zero() {
                    rz[c] / pq[c]
                } else {
                    T::zero()
                }
            })
            .collect();
        for i in 0..n {
            for c in 0..r {
                let k = i * r + c;
                x[k] += alpha[c] * p[k];
                res[k] -= alpha[c] * q[k];
                z[k] = res[k] * inv_diag[i];
            }
        }
        let rz_new: Vec<T> = (0..r)
            .map(|c| (0..n).map(|i| res[i * r + c] * z[i * r + c]).sum())
            .collect();
        for c in 0..r {
            let beta = if rz[c] != T::zero() { rz_new[c] / rz[c] } else { T::zero() };
            for i in 0..n {
                let k = i * r + c;
                p[k] = z[k] + beta * p[k];
            }
        }
        rz = rz_new;
    }
    let worst = (0..r)
        .map(|c| (col_norm(&res, c) / target[c].max(T::min_positive_value())).f64())
        .fold(0.0, f64::max);
    Err(Error::NonConvergence {
        detail: format!("conjugate gradients after {max_iter} iterations"),
        max_residual: worst * rel_tol.f64(),
    })
}

/// A Ritz value with the residual bound `|beta_m z_m|`; some eigenvalue of
/// the operator lies within `residual` of `value`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RitzValue<T> {
    pub value: T,
    pub residual: T,
}

/// Runs `steps` Lanczos iterations without reorthogonalization from a
/// seeded random start and returns the Ritz values at most `upper` with
/// their residual bounds. Copies of converged Ritz values produced by loss
/// of orthogonality are kept; callers treat the result as a set.
pub fn lanczos_ritz_below<T: Real>(
    a: &SparseSym<T>,
    steps: usize,
    upper: T,
    seed: u64,
) -> Result<Vec<RitzValue<T>>> {
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let steps = steps.min(n).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<T> = (0..n).map(|_| T::of(rng.random::<f64>() - 0.5)).collect();
    let nv = v.iter().map(|&x| x * x).sum::<T>().sqrt();
    v.iter_mut().for_each(|x| *x /= nv);
    let mut v_prev = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<T> = Vec::with_capacity(steps);
    let mut b_prev = T::zero();
    let scale = a.max_row_sum();
    for _ in 0..steps {
        a.matvec(&v, &mut w);
        let al: T = w.iter().zip(&v).map(|(&x, &y)| x * y).sum();
        for i in 0..n {
            w[i] -= al * v[i] + b_prev * v_prev[i];
        }
        alpha.push(al);
        let b = w.iter().map(|&x| x * x).sum::<T>().sqrt();
        beta.push(b);
        if b <= T::of(T::eps_f64().sqrt()) * scale {
            break;
        }
        for i in 0..n {
            v_prev[i] = v[i];
            v[i] = w[i] / b;
        }
        b_prev = b;
    }
    let m = alpha.len();
    let b_last = beta[m - 1];
    let (vals, vecs) = T::tridiag_eigen_below(&alpha, &beta[..m - 1], upper, true)?;
    Ok(vals
        .iter()
        .enumerate()
        .map(|(k, &value)| RitzValue {
            value,
            residual: (b_last * vecs[k * m + m - 1]).abs(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::eigvalsh;

    fn path_laplacian(n: usize, shift: f64) -> SparseSym<f64> {
        SparseSym::from_rows(n, |i, push| {
            push(i, 2.0 + shift + 0.01 * i as f64);
            if i > 0 {
                push(i - 1, -1.0);
            }
            if i + 1 < n {
                push(i + 1, -1.0);
            }
        })
    }

    #[test]
    fn cg_solves_spd_systems() {
        let a = path_laplacian(200, 0.5);
        let r = 3;
        let b: Vec<f64> = (0..200 * r).map(|k| ((k * 7) % 11) as f64 - 5.0).collect();
        let mut x = vec![0.0; 200 * r];
        block_cg(&a, 0.2, r, &b, &mut x, 1e-12, 1000).unwrap();
        let mut ax = vec![0.0; 200 * r];
        a.matvec_block(r, &x, &mut ax);
        let err = (0..200 * r).map(|k| (ax[k] - 0.2 * x[k] - b[k]).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn lanczos_finds_low_eigenvalues() {
        let a = path_laplacian(300, 0.0);
        let exact = eigvalsh(&a.to_dense()).unwrap();
        let ritz = lanczos_ritz_below(&a, 300, 0.3, 1).unwrap();
        let converged: Vec<f64> = ritz.iter().filter(|r| r.residual < 1e-8).map(|r| r.value).collect();
        assert!(!converged.is_empty());
        for &t in &converged {
            let d = exact.iter().map(|&e| (e - t).abs()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-7);
        }
        assert!((converged[0] - exact[0]).abs() < 1e-8);
    }
}
