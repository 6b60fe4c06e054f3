use ndarray::Array2;
use num_complex::Complex;
use rand::Rng;

use crate::config_space::Site;
use crate::error::{param, Result};
use crate::linalg::dense;
use crate::scalar::Real;

/// Operator acting on the sites `support` of the chain and as the identity
/// elsewhere. Local basis index `m` has bit `k` set when `support[k]` is
/// occupied (spin down).
#[derive(Clone, Debug, PartialEq)]
pub struct LocalObservable<T> {
    pub support: Vec<Site>,
    pub matrix: Array2<Complex<T>>,
}

impl<T: Real> LocalObservable<T> {
    pub fn new(mut support: Vec<Site>, matrix: Array2<Complex<T>>) -> Result<Self> {
        let k = support.len();
        if k == 0 {
            return param("observable support is empty");
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != support {
            support = sorted;
            if support.len() != k {
                return param("observable support has repeated sites");
            }
            return param("observable support must be listed in increasing order");
        }
        if matrix.dim() != (1 << k, 1 << k) {
            return param(format!("local matrix for {k} sites must be {0}x{0}", 1 << k));
        }
        Ok(LocalObservable { support, matrix })
    }

    /// `N_i`, the projection onto a down spin at `site`.
    pub fn number(site: Site) -> Self {
        let mut m = Array2::zeros((2, 2));
        m[(1, 1)] = Complex::new(T::one(), T::zero());
        LocalObservable {
            support: vec![site],
            matrix: m,
        }
    }

    pub fn identity(support: Vec<Site>) -> Result<Self> {
        let d = 1 << support.len();
        Self::new(support, Array2::eye(d))
    }

    /// `P_+`: no particle on the support.
    pub fn p_plus(support: Vec<Site>) -> Result<Self> {
        let d = 1 << support.len();
        let mut m = Array2::zeros((d, d));
        m[(0, 0)] = Complex::new(T::one(), T::zero());
        Self::new(support, m)
    }

    /// Random complex local matrix with entries uniform in the unit square.
    pub fn random(support: Vec<Site>, rng: &mut impl Rng) -> Result<Self> {
        let d = 1 << support.len();
        let m = Array2::from_shape_fn((d, d), |_| {
            Complex::new(T::of(rng.random::<f64>() * 2.0 - 1.0), T::of(rng.random::<f64>() * 2.0 - 1.0))
        });
        Self::new(support, m)
    }

    /// Operator norm.
    pub fn norm(&self) -> Result<T> {
        dense::complex_norm(&self.matrix)
    }

    pub fn adjoint(&self) -> Self {
        LocalObservable {
            support: self.support.clone(),
            matrix: self.matrix.t().mapv(|z| z.conj()),
        }
    }

    /// Whether the supports intersect.
    pub fn overlaps(&self, other: &Self) -> bool {
        self.support.iter().any(|s| other.support.binary_search(s).is_ok())
    }

    /// Distance between the supports.
    pub fn support_distance(&self, other: &Self) -> u32 {
        self.support
            .iter()
            .flat_map(|a| other.support.iter().map(move |b| (a - b).unsigned_abs()))
            .min()
            .unwrap_or(u32::MAX)
    }

    fn local_index(&self, s: usize, half_length: Site) -> usize {
        self.support
            .iter()
            .enumerate()
            .fold(0, |m, (k, &site)| m | ((s >> (site + half_length) & 1) << k))
    }

    fn with_local(&self, s: usize, m: usize, half_length: Site) -> usize {
        self.support.iter().enumerate().fold(s, |acc, (k, &site)| {
            let bit = (site + half_length) as usize;
            (acc & !(1 << bit)) | (((m >> k) & 1) << bit)
        })
    }

    /// Dense matrix on the full chain `[-L, L]`.
    pub fn promote(&self, half_length: Site) -> Result<Array2<Complex<T>>> {
        if self.support.iter().any(|s| s.abs() > half_length) {
            return param("observable support leaves the chain");
        }
        let n = 1usize << (2 * half_length + 1);
        let d = self.matrix.nrows();
        let mut out = Array2::zeros((n, n));
        for s in 0..n {
            let c = self.local_index(s, half_length);
            for r in 0..d {
                let v = self.matrix[(r, c)];
                if v != Complex::new(T::zero(), T::zero()) {
                    out[(self.with_local(s, r, half_length), s)] = v;
                }
            }
        }
        Ok(out)
    }

    /// Diagonal of `P_-` (at least one particle on the support) in the
    /// full product basis.
    pub fn p_minus_mask(&self, half_length: Site) -> Vec<bool> {
        let n = 1usize << (2 * half_length + 1);
        (0..n).map(|s| self.local_index(s, half_length) != 0).collect()
    }
}
