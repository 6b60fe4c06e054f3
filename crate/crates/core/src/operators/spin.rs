use num_complex::Complex64;

use crate::error::{param, Error, Result};
use crate::linalg::SparseSym;
use crate::scalar::Real;

use super::disorder::DisorderRealization;
use super::params::ModelParams;

/// Largest chain the full tensor-product build accepts.
pub const MAX_SPIN_SITES: usize = 22;

/// Hamiltonian on `(C^2)^{2L+1}`. Basis state `s` has bit `k` set when site
/// `k - L` carries a down spin (a particle).
#[derive(Clone, Debug)]
pub struct SpinOperator<T> {
    pub n_sites: usize,
    pub matrix: SparseSym<T>,
    pub params: ModelParams,
}

type M2 = [[Complex64; 2]; 2];

fn pauli() -> (M2, M2, M2) {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    // basis order: up, down
    ([[o, one], [one, o]], [[o, -i], [i, o]], [[one, o], [o, -one]])
}

fn kron(a: &M2, b: &M2) -> [[Complex64; 4]; 4] {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = a[r / 2][c / 2] * b[r % 2][c % 2];
        }
    }
    out
}

/// `h = (1 - Z Z)/4 - (X X + Y Y)/(4 Delta)` as a real 4x4 matrix in the
/// basis `2a + b` of the two spins `a, b`.
pub fn bond_term(anisotropy: f64) -> [[f64; 4]; 4] {
    let (x, y, z) = pauli();
    let (xx, yy, zz) = (kron(&x, &x), kron(&y, &y), kron(&z, &z));
    let mut h = [[0.0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let id = if r == c { 1.0 } else { 0.0 };
            let v = (Complex64::new(id, 0.0) - zz[r][c]) * 0.25
                - (xx[r][c] + yy[r][c]) / (4.0 * anisotropy);
            debug_assert!(v.im.abs() < 1e-15);
            h[r][c] = v.re;
        }
    }
    h
}

/// Assembles `H^(L) = sum_i h_{i,i+1} + lambda sum_i omega_i N_i + beta (N_{-L} + N_L)`.
pub fn build_spin_hamiltonian<T: Real>(
    params: &ModelParams,
    disorder: &DisorderRealization,
) -> Result<SpinOperator<T>> {
    params.validate()?;
    let n = params.n_sites();
    if n > MAX_SPIN_SITES {
        return Err(Error::Capacity {
            dim: 1u64 << n.min(63),
            limit: 1u64 << MAX_SPIN_SITES,
        });
    }
    if disorder.half_length != params.half_length {
        return param("disorder and parameters disagree on the volume");
    }
    let h = bond_term(params.anisotropy);
    let dim = 1usize << n;
    let field: Vec<f64> = (0..n)
        .map(|k| {
            let mut f = params.disorder * disorder.values[k];
            if k == 0 {
                f += params.boundary;
            }
            if k == n - 1 {
                f += params.boundary;
            }
            f
        })
        .collect();
    let matrix = SparseSym::from_rows(dim, |s, push| {
        let mut diag = 0.0;
        for (k, f) in field.iter().enumerate() {
            if s >> k & 1 == 1 {
                diag += f;
            }
        }
        for k in 0..n.saturating_sub(1) {
            let c = ((s >> k & 1) << 1) | (s >> (k + 1) & 1);
            for (r, row) in h.iter().enumerate() {
                let v = row[c];
                if v == 0.0 {
                    continue;
                }
                let t = (s & !(0b11 << k)) | ((r >> 1) << k) | ((r & 1) << (k + 1));
                if t == s {
                    diag += v;
                } else {
                    push(t, T::of(v));
                }
            }
        }
        push(s, T::of(diag));
    });
    Ok(SpinOperator {
        n_sites: n,
        matrix,
        params: *params,
    })
}

impl<T: Real> SpinOperator<T> {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Total particle number of basis state `s`.
    pub fn particle_number(s: usize) -> usize {
        s.count_ones() as usize
    }

    /// `max |[H, N]_{ij}|` for the total number operator.
    pub fn number_commutator(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim() {
            for (j, v) in self.matrix.row(i) {
                let d = Self::particle_number(j) as f64 - Self::particle_number(i) as f64;
                worst = worst.max((v * T::of(d)).abs());
            }
        }
        worst
    }

    /// Basis state with the given occupied sites.
    pub fn basis_index(&self, sites: &[crate::config_space::Site]) -> usize {
        let l = self.params.half_length;
        sites.iter().fold(0, |s, &x| s | 1 << (x + l))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::eigvalsh;

    #[test]
    fn bond_term_entries() {
        let h = bond_term(2.0);
        assert_eq!(h[0][0], 0.0);
        assert_eq!(h[3][3], 0.0);
        assert!((h[1][1] - 0.5).abs() < 1e-15);
        assert!((h[1][2] + 0.25).abs() < 1e-15);
        assert_eq!(h[0][3], 0.0);
    }

    #[test]
    fn single_site() {
        let p = ModelParams::new(2.0, 3.0, 0).unwrap();
        let omega = DisorderRealization::from_values(Default::default(), 0, vec![0.4]).unwrap();
        let h = build_spin_hamiltonian::<f64>(&p, &omega).unwrap();
        let d = h.matrix.to_dense();
        assert_eq!(d[(0, 0)], 0.0);
        assert!((d[(1, 1)] - (3.0 * 0.4 + 2.0 * 0.25)).abs() < 1e-15);
    }

    #[test]
    fn vacuum_and_conservation() {
        let p = ModelParams::new(3.0, 1.5, 3).unwrap();
        let omega = crate::operators::sample_disorder(&Default::default(), 3, 2).unwrap();
        let h = build_spin_hamiltonian::<f64>(&p, &omega).unwrap();
        assert_eq!(h.matrix.row(0).count(), 1);
        assert_eq!(h.matrix.get(0, 0), 0.0);
        assert_eq!(h.number_commutator(), 0.0);
        assert!(h.matrix.asymmetry() < 1e-15);
        let w = eigvalsh(&h.matrix.to_dense()).unwrap();
        assert!(w[0].abs() < 1e-12);
    }

    #[test]
    fn capacity() {
        let p = ModelParams::new(3.0, 1.5, 11).unwrap();
        let omega = DisorderRealization::zero(11);
        assert!(matches!(build_spin_hamiltonian::<f64>(&p, &omega), Err(Error::Capacity { .. })));
    }
}
