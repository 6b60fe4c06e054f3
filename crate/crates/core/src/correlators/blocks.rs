use ndarray::Array2;
use num_complex::Complex;

use super::observable::LocalObservable;
use crate::error::{param, Result};
use crate::linalg::dense;
use crate::scalar::Real;

/// Splitting of a local observable along `P_+` (no particle on the support)
/// and `P_- = 1 - P_+`.
#[derive(Clone, Debug)]
pub struct BlockDecomposition<T> {
    pub support: Vec<crate::config_space::Site>,
    pub p_plus: Array2<Complex<T>>,
    pub p_minus: Array2<Complex<T>>,
    /// `blocks[a][b] = P_a X P_b` with index 0 for `+` and 1 for `-`.
    pub blocks: [[Array2<Complex<T>>; 2]; 2],
    /// `X^{+,+} = zeta P_+`.
    pub zeta: Complex<T>,
}

/// Sign of a block index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

pub fn block_decompose<T: Real>(x: &LocalObservable<T>) -> Result<BlockDecomposition<T>> {
    if x.support.is_empty() {
        return param("observable support is empty");
    }
    let d = x.matrix.nrows();
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let mut p_plus = Array2::zeros((d, d));
    p_plus[(0, 0)] = one;
    let p_minus = Array2::from_shape_fn((d, d), |(r, c)| if r == c && r != 0 { one } else { zero });
    let side = |m: usize| usize::from(m != 0);
    let mut blocks: [[Array2<Complex<T>>; 2]; 2] =
        std::array::from_fn(|_| std::array::from_fn(|_| Array2::zeros((d, d))));
    for ((r, c), &v) in x.matrix.indexed_iter() {
        blocks[side(r)][side(c)][(r, c)] = v;
    }
    Ok(BlockDecomposition {
        support: x.support.clone(),
        p_plus,
        p_minus,
        blocks,
        zeta: x.matrix[(0, 0)],
    })
}

impl<T: Real> BlockDecomposition<T> {
    pub fn block(&self, a: Sign, b: Sign) -> LocalObservable<T> {
        LocalObservable {
            support: self.support.clone(),
            matrix: self.blocks[a.index()][b.index()].clone(),
        }
    }

    pub fn reconstruct(&self) -> Array2<Complex<T>> {
        let [[pp, pm], [mp, mm]] = &self.blocks;
        pp + pm + mp + mm
    }

    /// Smallest eigenvalue of `sum_{i in J} N_i - P_-` on the local factor.
    pub fn number_domination_margin(&self) -> Result<T> {
        let d = self.p_minus.nrows();
        let m = Array2::from_shape_fn((d, d), |(r, c)| {
            let count = if r == c { T::of(r.count_ones() as f64) } else { T::zero() };
            count - self.p_minus[(r, c)].re
        });
        let w = dense::eigvalsh(&m)?;
        Ok(w.iter().copied().fold(T::infinity(), T::min))
    }

    /// `X^{+,+} - zeta P_+`, zero by construction.
    pub fn zeta_defect(&self) -> T {
        let diff = &self.blocks[0][0] - &self.p_plus.mapv(|p| p * self.zeta);
        diff.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn p_plus_decomposes_to_itself() {
        let x = LocalObservable::<f64>::p_plus(vec![0, 1]).unwrap();
        let b = block_decompose(&x).unwrap();
        assert_eq!(b.zeta, Complex::new(1.0, 0.0));
        for (a, c) in [(0, 1), (1, 0), (1, 1)] {
            assert!(b.blocks[a][c].iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn number_operator_has_no_plus_plus_block() {
        let b = block_decompose(&LocalObservable::<f64>::number(2)).unwrap();
        assert_eq!(b.zeta.norm(), 0.0);
        assert!(b.blocks[0][0].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn reconstruction_is_exact() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for k in 1..=3 {
            let x = LocalObservable::<f64>::random((0..k).collect(), &mut rng).unwrap();
            let b = block_decompose(&x).unwrap();
            assert_eq!(b.reconstruct(), x.matrix);
            assert!(b.number_domination_margin().unwrap() >= -1e-12);
            assert!(b.zeta.norm() <= x.norm().unwrap() + 1e-12);
            assert_eq!(b.zeta_defect(), 0.0);
        }
    }
}
