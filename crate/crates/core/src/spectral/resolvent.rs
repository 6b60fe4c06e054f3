use ndarray::Array2;
use num_complex::Complex;

use super::data::{eigenvalues_full, MAX_DENSE_DIM};
use crate::config_space::Config;
use crate::error::{param, Error, Result};
use crate::linalg::{dense, SparseSym};
use crate::operators::SectorOperator;
use crate::scalar::Real;

/// Smallest admissible distance between a real energy and the spectrum.
pub const RESOLVENT_GAP: f64 = 1e-10;

/// Banded solves are refused above this many band operations.
const MAX_BAND_WORK: f64 = 2e10;

/// `dist(E, sigma(H))` by dense diagonalization.
pub fn spectral_distance<T: Real>(h: &SparseSym<T>, e: T) -> Result<T> {
    let w = eigenvalues_full(h)?;
    Ok(w.iter().map(|&x| (x - e).abs()).fold(T::infinity(), T::min))
}

fn bandwidth<T: Real>(h: &SparseSym<T>) -> usize {
    (0..h.dim())
        .flat_map(|i| h.row(i).map(move |(j, _)| i.abs_diff(j)))
        .max()
        .unwrap_or(0)
}

/// Columns `(H - z)^{-1} e_c` for each `c` in `cols`, as an `n x |cols|`
/// matrix. Real `z` is accepted only at distance above [`RESOLVENT_GAP`]
/// from the spectrum, certified by Gershgorin discs or a dense spectrum.
pub fn greens_columns<T: Real>(
    h: &SparseSym<T>,
    z: Complex<T>,
    cols: &[usize],
) -> Result<Array2<Complex<T>>> {
    let n = h.dim();
    if cols.iter().any(|&c| c >= n) {
        return param("resolvent column out of range");
    }
    let gershgorin_gap = h.gershgorin_lower() - z.re;
    if z.im == T::zero() && gershgorin_gap.f64() <= RESOLVENT_GAP {
        if n > MAX_DENSE_DIM {
            return Err(Error::Unsupported(format!(
                "real energy resolvent needs a spectral distance certificate; dimension {n} is too large"
            )));
        }
        let d = spectral_distance(h, z.re)?;
        if d.f64() <= RESOLVENT_GAP {
            return Err(Error::ResolventSingular { distance: d.f64() });
        }
    }
    let nr = cols.len();
    let mut rhs = Array2::<Complex<T>>::zeros((n, nr));
    for (k, &c) in cols.iter().enumerate() {
        rhs[(c, k)] = Complex::new(T::one(), T::zero());
    }
    let x = if n <= MAX_DENSE_DIM {
        let mut a = dense::complexify(&h.to_dense());
        for i in 0..n {
            a[(i, i)] -= z;
        }
        dense::complex_solve(&a, &rhs)?
    } else {
        let kb = bandwidth(h);
        if n as f64 * (kb as f64).powi(2) > MAX_BAND_WORK {
            return Err(Error::Capacity {
                dim: n as u64,
                limit: MAX_DENSE_DIM as u64,
            });
        }
        let ldab = 3 * kb + 1;
        let mut ab = vec![Complex::new(T::zero(), T::zero()); ldab * n];
        for i in 0..n {
            for (j, v) in h.row(i) {
                let val = if i == j { Complex::new(v, T::zero()) - z } else { Complex::new(v, T::zero()) };
                ab[j * ldab + 2 * kb + i - j] = val;
            }
            if h.get(i, i) == T::zero() {
                ab[i * ldab + 2 * kb] = -z;
            }
        }
        let mut b: Vec<Complex<T>> = rhs.t().iter().copied().collect();
        T::complex_band_solve(n, kb, kb, nr, &mut ab, &mut b)?;
        Array2::from_shape_vec((nr, n), b).expect("shape").reversed_axes()
    };
    // residual check
    let mut worst = T::zero();
    for k in 0..nr {
        for i in 0..n {
            let mut acc = -z * x[(i, k)];
            for (j, v) in h.row(i) {
                acc += x[(j, k)] * v;
            }
            worst = worst.max((acc - rhs[(i, k)]).norm());
        }
    }
    let xnorm = x.iter().fold(T::zero(), |m, v| m.max(v.norm()));
    let tol = T::of(1e-10) * (T::one() + (h.max_row_sum() + z.norm()) * xnorm);
    if worst > tol {
        return Err(Error::NonConvergence {
            detail: "resolvent linear solve".into(),
            max_residual: worst.f64(),
        });
    }
    Ok(x)
}

/// `<e_u, (H - z)^{-1} e_v>` for row indices `u, v`.
pub fn greens_element<T: Real>(h: &SparseSym<T>, z: Complex<T>, u: usize, v: usize) -> Result<Complex<T>> {
    Ok(greens_columns(h, z, &[v])?[(u, 0)])
}

/// `<phi_u, (H_N - z)^{-1} phi_v>` for configurations `u, v`.
pub fn greens_element_config<T: Real>(
    op: &SectorOperator<T>,
    z: Complex<T>,
    u: &Config,
    v: &Config,
) -> Result<Complex<T>> {
    let ru = op
        .row_of_config(u)
        .ok_or_else(|| Error::Parameter(format!("{u} is not represented")))?;
    let rv = op
        .row_of_config(v)
        .ok_or_else(|| Error::Parameter(format!("{v} is not represented")))?;
    greens_element(&op.matrix, z, ru, rv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_sector_hamiltonian, sample_disorder, ModelParams};

    #[test]
    fn diagonal_operator() {
        let h = SparseSym::from_rows(3, |i, push| push(i, 1.0 + i as f64));
        let z = Complex::new(0.5, 0.1);
        for u in 0..3 {
            let g = greens_element(&h, z, u, u).unwrap();
            assert!((g - Complex::new(1.0, 0.0) / (Complex::new(1.0 + u as f64, 0.0) - z)).norm() < 1e-15);
        }
    }

    #[test]
    fn symmetry_and_dense_inverse() {
        let p = ModelParams::new(2.0, 1.0, 8).unwrap();
        let w = sample_disorder(&Default::default(), 8, 3).unwrap();
        let h = build_sector_hamiltonian::<f64>(1, &p, &w).unwrap();
        let z = Complex::new(0.9, 0.05);
        let mut a = dense::complexify(&h.matrix.to_dense());
        for i in 0..h.dim() {
            a[(i, i)] -= z;
        }
        let inv = dense::complex_inverse(&a).unwrap();
        for u in 0..h.dim() {
            for v in 0..h.dim() {
                let g = greens_element(&h.matrix, z, u, v).unwrap();
                assert!((g - inv[(u, v)]).norm() < 1e-12);
                let gc = greens_element(&h.matrix, z.conj(), v, u).unwrap();
                assert!((gc - g.conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn banded_path_agrees() {
        let p = ModelParams::new(2.0, 1.0, 2100).unwrap();
        let w = sample_disorder(&Default::default(), 2100, 5).unwrap();
        let h = build_sector_hamiltonian::<f64>(1, &p, &w).unwrap();
        assert!(h.dim() > MAX_DENSE_DIM);
        let z = Complex::new(1.1, 0.01);
        let cols = greens_columns(&h.matrix, z, &[2000, 2001]).unwrap();
        let x = cols.column(0);
        for i in 1..h.dim() - 1 {
            let mut acc = -z * x[i];
            for (j, v) in h.matrix.row(i) {
                acc += x[j] * v;
            }
            let want = if i == 2000 { 1.0 } else { 0.0 };
            assert!((acc - want).norm() < 1e-10);
        }
    }

    #[test]
    fn singular_real_energy() {
        let h = SparseSym::from_rows(2, |i, push| push(i, i as f64));
        let err = greens_element(&h, Complex::new(1.0, 0.0), 0, 0).unwrap_err();
        assert!(matches!(err, Error::ResolventSingular { .. }));
        assert!(greens_element(&h, Complex::new(0.5, 0.0), 1, 1).is_ok());
    }
}
