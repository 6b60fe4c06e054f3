//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All operators, spectral routines and correlators are generic over a
//! [`Real`] type; `f32` and `f64` implement it. Dense kernels are delegated
//! to LAPACK through the [`Lapack`] trait, which dispatches to the single- or
//! double-precision routine. All matrices passed across this boundary are in
//! column-major order.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::os::raw::{c_char, c_int};

use lapack_sys as lp;
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

// Link the system OpenBLAS, which also provides LAPACK.
extern crate openblas_src;

/// Floating point types usable for every computation in the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
    + ndarray::ScalarOperand
    + ndarray::LinalgScalar
    + Serialize
    + DeserializeOwned
    + Lapack
{
    /// Lossy conversion from an `f64` literal or computed constant.
    fn of(x: f64) -> Self;

    /// Lossless widening for statistics and reporting.
    fn f64(self) -> f64;

    /// Machine epsilon as `f64`.
    fn eps_f64() -> f64 {
        Self::epsilon().f64()
    }
}

impl Real for f32 {
    fn of(x: f64) -> Self {
        x as f32
    }
    fn f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn of(x: f64) -> Self {
        x
    }
    fn f64(self) -> f64 {
        self
    }
}

/// Error code returned by a LAPACK driver (`info != 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LapackInfo(pub i32);

/// Thin, safe wrappers over the LAPACK drivers used by the crate.
///
/// Every method takes column-major buffers and performs its own workspace
/// query.
pub trait Lapack: Sized + Copy {
    /// Symmetric eigensolver (`?syevd`). On exit `a` holds the eigenvectors
    /// in its columns when `vectors` is set; `w` receives ascending eigenvalues.
    fn sym_eigen(n: usize, a: &mut [Self], w: &mut [Self], vectors: bool)
        -> Result<(), LapackInfo>;

    /// Singular values of a general `m x n` real matrix (`?gesvd`, no vectors).
    fn singular_values(m: usize, n: usize, a: &mut [Self], s: &mut [Self])
        -> Result<(), LapackInfo>;

    /// Singular values of a general complex `m x n` matrix (`?gesvd`).
    fn complex_singular_values(m: usize, n: usize, a: &mut [Complex<Self>], s: &mut [Self])
        -> Result<(), LapackInfo>;

    /// Eigenpairs of a symmetric tridiagonal matrix with eigenvalue at most
    /// `upper` (`?stevr`, range mode). `d` is the diagonal, `e` the `n-1`
    /// off-diagonal. Returns the eigenvalues and, if requested, the
    /// eigenvectors as an `n x m` column-major buffer.
    fn tridiag_eigen_below(d: &[Self], e: &[Self], upper: Self, vectors: bool)
        -> Result<(Vec<Self>, Vec<Self>), LapackInfo>;

    /// Solves `A X = B` for complex general `A` (`?gesv`). `b` is `n x nrhs`.
    fn complex_solve(n: usize, nrhs: usize, a: &mut [Complex<Self>], b: &mut [Complex<Self>])
        -> Result<(), LapackInfo>;

    /// Solves a complex banded system (`?gbsv`). `ab` uses LAPACK band
    /// storage with `2*kl + ku + 1` rows.
    fn complex_band_solve(
        n: usize,
        kl: usize,
        ku: usize,
        nrhs: usize,
        ab: &mut [Complex<Self>],
        b: &mut [Complex<Self>],
    ) -> Result<(), LapackInfo>;
}

fn ci(x: usize) -> c_int {
    c_int::try_from(x).expect("LAPACK dimension overflows c_int")
}

fn check(info: c_int) -> Result<(), LapackInfo> {
    if info == 0 {
        Ok(())
    } else {
        Err(LapackInfo(info))
    }
}

macro_rules! impl_lapack {
    ($t:ty, $syevd:ident, $gesvd:ident, $cgesvd:ident, $stevr:ident, $gesv:ident, $gbsv:ident) => {
        impl Lapack for $t {
            fn sym_eigen(
                n: usize,
                a: &mut [Self],
                w: &mut [Self],
                vectors: bool,
            ) -> Result<(), LapackInfo> {
                assert_eq!(a.len(), n * n);
                assert_eq!(w.len(), n);
                if n == 0 {
                    return Ok(());
                }
                let jobz = if vectors { b'V' } else { b'N' } as c_char;
                let uplo = b'L' as c_char;
                let nn = ci(n);
                let mut info = 0;
                let mut wq = [0 as $t];
                let mut iq = [0 as c_int];
                unsafe {
                    lp::$syevd(
                        &jobz, &uplo, &nn, a.as_mut_ptr(), &nn, w.as_mut_ptr(),
                        wq.as_mut_ptr(), &-1, iq.as_mut_ptr(), &-1, &mut info,
                    );
                }
                check(info)?;
                let lwork = (wq[0] as usize).max(1);
                let liwork = (iq[0] as usize).max(1);
                let mut work = vec![0 as $t; lwork];
                let mut iwork = vec![0 as c_int; liwork];
                unsafe {
                    lp::$syevd(
                        &jobz, &uplo, &nn, a.as_mut_ptr(), &nn, w.as_mut_ptr(),
                        work.as_mut_ptr(), &ci(lwork), iwork.as_mut_ptr(), &ci(liwork),
                        &mut info,
                    );
                }
                check(info)
            }

            fn singular_values(
                m: usize,
                n: usize,
                a: &mut [Self],
                s: &mut [Self],
            ) -> Result<(), LapackInfo> {
                assert_eq!(a.len(), m * n);
                assert_eq!(s.len(), m.min(n));
                if m == 0 || n == 0 {
                    return Ok(());
                }
                let job = b'N' as c_char;
                let (mm, nn) = (ci(m), ci(n));
                let one = 1 as c_int;
                let mut u = [0 as $t];
                let mut vt = [0 as $t];
                let mut wq = [0 as $t];
                let mut info = 0;
                unsafe {
                    lp::$gesvd(
                        &job, &job, &mm, &nn, a.as_mut_ptr(), &mm, s.as_mut_ptr(),
                        u.as_mut_ptr(), &one, vt.as_mut_ptr(), &one, wq.as_mut_ptr(), &-1,
                        &mut info,
                    );
                }
                check(info)?;
                let lwork = (wq[0] as usize).max(1);
                let mut work = vec![0 as $t; lwork];
                unsafe {
                    lp::$gesvd(
                        &job, &job, &mm, &nn, a.as_mut_ptr(), &mm, s.as_mut_ptr(),
                        u.as_mut_ptr(), &one, vt.as_mut_ptr(), &one, work.as_mut_ptr(),
                        &ci(lwork), &mut info,
                    );
                }
                check(info)
            }

            fn complex_singular_values(
                m: usize,
                n: usize,
                a: &mut [Complex<Self>],
                s: &mut [Self],
            ) -> Result<(), LapackInfo> {
                assert_eq!(a.len(), m * n);
                assert_eq!(s.len(), m.min(n));
                if m == 0 || n == 0 {
                    return Ok(());
                }
                let job = b'N' as c_char;
                let (mm, nn) = (ci(m), ci(n));
                let one = 1 as c_int;
                let mut u = [Complex::<$t>::new(0.0, 0.0)];
                let mut vt = [Complex::<$t>::new(0.0, 0.0)];
                let mut wq = [Complex::<$t>::new(0.0, 0.0)];
                let mut rwork = vec![0 as $t; 5 * m.min(n)];
                let mut info = 0;
                unsafe {
                    lp::$cgesvd(
                        &job, &job, &mm, &nn, a.as_mut_ptr() as *mut _, &mm, s.as_mut_ptr(),
                        u.as_mut_ptr() as *mut _, &one, vt.as_mut_ptr() as *mut _, &one,
                        wq.as_mut_ptr() as *mut _, &-1, rwork.as_mut_ptr(), &mut info,
                    );
                }
                check(info)?;
                let lwork = (wq[0].re as usize).max(1);
                let mut work = vec![Complex::<$t>::new(0.0, 0.0); lwork];
                unsafe {
                    lp::$cgesvd(
                        &job, &job, &mm, &nn, a.as_mut_ptr() as *mut _, &mm, s.as_mut_ptr(),
                        u.as_mut_ptr() as *mut _, &one, vt.as_mut_ptr() as *mut _, &one,
                        work.as_mut_ptr() as *mut _, &ci(lwork), rwork.as_mut_ptr(), &mut info,
                    );
                }
                check(info)
            }

            fn tridiag_eigen_below(
                d: &[Self],
                e: &[Self],
                upper: Self,
                vectors: bool,
            ) -> Result<(Vec<Self>, Vec<Self>), LapackInfo> {
                let n = d.len();
                assert!(n == 0 || e.len() + 1 == n);
                if n == 0 {
                    return Ok((Vec::new(), Vec::new()));
                }
                let jobz = if vectors { b'V' } else { b'N' } as c_char;
                let range = b'V' as c_char;
                let nn = ci(n);
                let mut dd = d.to_vec();
                let mut ee = e.to_vec();
                ee.push(0 as $t);
                let lower = <$t>::NEG_INFINITY;
                let (il, iu) = (0 as c_int, 0 as c_int);
                let abstol = 0 as $t;
                let mut m = 0 as c_int;
                let mut w = vec![0 as $t; n];
                let ldz = if vectors { n } else { 1 };
                let mut z = vec![0 as $t; if vectors { n * n } else { 1 }];
                let mut isuppz = vec![0 as c_int; 2 * n];
                let mut wq = [0 as $t];
                let mut iq = [0 as c_int];
                let mut info = 0;
                unsafe {
                    lp::$stevr(
                        &jobz, &range, &nn, dd.as_mut_ptr(), ee.as_mut_ptr(), &lower, &upper,
                        &il, &iu, &abstol, &mut m, w.as_mut_ptr(), z.as_mut_ptr(), &ci(ldz),
                        isuppz.as_mut_ptr(), wq.as_mut_ptr(), &-1, iq.as_mut_ptr(), &-1,
                        &mut info,
                    );
                }
                check(info)?;
                let lwork = (wq[0] as usize).max(1);
                let liwork = (iq[0] as usize).max(1);
                let mut work = vec![0 as $t; lwork];
                let mut iwork = vec![0 as c_int; liwork];
                unsafe {
                    lp::$stevr(
                        &jobz, &range, &nn, dd.as_mut_ptr(), ee.as_mut_ptr(), &lower, &upper,
                        &il, &iu, &abstol, &mut m, w.as_mut_ptr(), z.as_mut_ptr(), &ci(ldz),
                        isuppz.as_mut_ptr(), work.as_mut_ptr(), &ci(lwork), iwork.as_mut_ptr(),
                        &ci(liwork), &mut info,
                    );
                }
                check(info)?;
                let m = m as usize;
                w.truncate(m);
                if vectors {
                    z.truncate(n * m);
                } else {
                    z.clear();
                }
                Ok((w, z))
            }

            fn complex_solve(
                n: usize,
                nrhs: usize,
                a: &mut [Complex<Self>],
                b: &mut [Complex<Self>],
            ) -> Result<(), LapackInfo> {
                assert_eq!(a.len(), n * n);
                assert_eq!(b.len(), n * nrhs);
                if n == 0 || nrhs == 0 {
                    return Ok(());
                }
                let nn = ci(n);
                let mut ipiv = vec![0 as c_int; n];
                let mut info = 0;
                unsafe {
                    lp::$gesv(
                        &nn, &ci(nrhs), a.as_mut_ptr() as *mut _, &nn, ipiv.as_mut_ptr(),
                        b.as_mut_ptr() as *mut _, &nn, &mut info,
                    );
                }
                check(info)
            }

            fn complex_band_solve(
                n: usize,
                kl: usize,
                ku: usize,
                nrhs: usize,
                ab: &mut [Complex<Self>],
                b: &mut [Complex<Self>],
            ) -> Result<(), LapackInfo> {
                let ldab = 2 * kl + ku + 1;
                assert_eq!(ab.len(), ldab * n);
                assert_eq!(b.len(), n * nrhs);
                if n == 0 || nrhs == 0 {
                    return Ok(());
                }
                let nn = ci(n);
                let mut ipiv = vec![0 as c_int; n];
                let mut info = 0;
                unsafe {
                    lp::$gbsv(
                        &nn, &ci(kl), &ci(ku), &ci(nrhs), ab.as_mut_ptr() as *mut _,
                        &ci(ldab), ipiv.as_mut_ptr(), b.as_mut_ptr() as *mut _, &nn,
                        &mut info,
                    );
                }
                check(info)
            }
        }
    };
}

impl_lapack!(f32, ssyevd_, sgesvd_, cgesvd_, sstevr_, cgesv_, cgbsv_);
impl_lapack!(f64, dsyevd_, dgesvd_, zgesvd_, dstevr_, zgesv_, zgbsv_);
