//! Dense kernels on `ndarray` matrices backed by LAPACK.

use ndarray::{Array1, Array2, ShapeBuilder};
use num_complex::Complex;

use crate::error::Result;
use crate::scalar::Real;

/// Column-major copy of `a`.
fn col_major<S: Copy>(a: &Array2<S>) -> Vec<S> {
    a.t().iter().copied().collect()
}

/// All eigenpairs of a real symmetric matrix, eigenvalues ascending and
/// eigenvectors in the columns.
pub fn eigh<T: Real>(a: &Array2<T>) -> Result<(Array1<T>, Array2<T>)> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut buf = col_major(a);
    let mut w = vec![T::zero(); n];
    T::sym_eigen(n, &mut buf, &mut w, true)?;
    let v = Array2::from_shape_vec((n, n).f(), buf).expect("shape");
    Ok((Array1::from(w), v))
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn eigvalsh<T: Real>(a: &Array2<T>) -> Result<Array1<T>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut buf = col_major(a);
    let mut w = vec![T::zero(); n];
    T::sym_eigen(n, &mut buf, &mut w, false)?;
    Ok(Array1::from(w))
}

/// Singular values of a real matrix, descending.
pub fn singular_values<T: Real>(a: &Array2<T>) -> Result<Vec<T>> {
    let (m, n) = a.dim();
    let mut buf = col_major(a);
    let mut s = vec![T::zero(); m.min(n)];
    T::singular_values(m, n, &mut buf, &mut s)?;
    Ok(s)
}

/// Trace norm `sum of singular values` of a real matrix.
pub fn trace_norm<T: Real>(a: &Array2<T>) -> Result<T> {
    Ok(singular_values(a)?.into_iter().sum())
}

/// Spectral norm of a complex matrix.
pub fn complex_norm<T: Real>(a: &Array2<Complex<T>>) -> Result<T> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Ok(T::zero());
    }
    let mut buf = col_major(a);
    let mut s = vec![T::zero(); m.min(n)];
    T::complex_singular_values(m, n, &mut buf, &mut s)?;
    Ok(s[0])
}

/// Spectral norm of a real matrix.
pub fn norm2<T: Real>(a: &Array2<T>) -> Result<T> {
    Ok(singular_values(a)?.first().copied().unwrap_or_else(T::zero))
}

/// Solves `A X = B` for a general complex `A`.
pub fn complex_solve<T: Real>(
    a: &Array2<Complex<T>>,
    b: &Array2<Complex<T>>,
) -> Result<Array2<Complex<T>>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(b.nrows(), n);
    let nrhs = b.ncols();
    let mut abuf = col_major(a);
    let mut bbuf = col_major(b);
    T::complex_solve(n, nrhs, &mut abuf, &mut bbuf)?;
    Ok(Array2::from_shape_vec((n, nrhs).f(), bbuf).expect("shape"))
}

/// Inverse of a general complex matrix.
pub fn complex_inverse<T: Real>(a: &Array2<Complex<T>>) -> Result<Array2<Complex<T>>> {
    complex_solve(a, &Array2::eye(a.nrows()))
}

/// Inverse of a real symmetric matrix through its eigendecomposition.
pub fn sym_inverse<T: Real>(a: &Array2<T>) -> Result<Array2<T>> {
    let (w, v) = eigh(a)?;
    let mut vd = v.clone();
    for (mut col, &e) in vd.columns_mut().into_iter().zip(w.iter()) {
        col.mapv_inplace(|x| x / e);
    }
    Ok(vd.dot(&v.t()))
}

/// Promotes a real matrix to complex.
pub fn complexify<T: Real>(a: &Array2<T>) -> Array2<Complex<T>> {
    a.mapv(|x| Complex::new(x, T::zero()))
}

/// `max_ij |A_ij|`.
pub fn max_abs<T: Real>(a: &Array2<T>) -> T {
    a.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}
