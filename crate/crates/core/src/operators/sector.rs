use std::sync::Arc;

use crate::config_space::{cluster_count, for_each_neighbor, Config, ConfigSpace, Site};
use crate::error::{param, Error, Result};
use crate::linalg::SparseSym;
use crate::scalar::Real;

use super::disorder::DisorderRealization;
use super::params::ModelParams;

/// Record of a modification applied to a sector operator.
#[derive(Clone, Debug, PartialEq)]
pub enum Surgery {
    Restrict { size: usize },
    Decouple { set_size: usize, cut_entries: usize },
    DeleteOverlapPotential { x: Config, y: Config, half_width: usize, overlap: usize },
    EdgeProjection { edge_size: usize },
}

/// The `N`-particle operator, possibly restricted or modified, over a set of
/// configurations of `X_N^(L)`. Row `r` of `matrix` corresponds to the
/// configuration with index `states[r]` in `space`.
#[derive(Clone, Debug)]
pub struct SectorOperator<T> {
    pub space: Arc<ConfigSpace>,
    pub states: Vec<usize>,
    pub matrix: SparseSym<T>,
    pub params: ModelParams,
    pub disorder: Arc<DisorderRealization>,
    pub surgery: Vec<Surgery>,
}

/// Diagonal entry of the sector operator at `x`.
pub fn sector_diagonal(x: &[Site], params: &ModelParams, disorder: &DisorderRealization) -> f64 {
    let l = params.half_length;
    let d = params.anisotropy;
    let touches = (x[0] == -l) as usize + (x[x.len() - 1] == l) as usize;
    let w = cluster_count(x);
    let degree = 2 * w - touches;
    degree as f64 / (2.0 * d)
        + params.gap() * w as f64
        + params.disorder * disorder.potential(x)
        + params.boundary_excess() * touches as f64
}

/// Assembles `H_N^(L) = -(1/2Delta) L + (1 - 1/Delta) W + lambda V + (beta - (1 - 1/Delta)/2) chi`.
pub fn build_sector_hamiltonian<T: Real>(
    n_particles: usize,
    params: &ModelParams,
    disorder: &DisorderRealization,
) -> Result<SectorOperator<T>> {
    params.validate()?;
    if disorder.half_length != params.half_length {
        return param(format!(
            "disorder drawn for L = {} used with L = {}",
            disorder.half_length, params.half_length
        ));
    }
    let space = Arc::new(ConfigSpace::new(n_particles, params.half_length)?);
    let hop = T::of(-1.0 / (2.0 * params.anisotropy));
    let volume = space.volume();
    let mut x = Vec::with_capacity(n_particles);
    let matrix = SparseSym::from_rows(space.dim(), |i, push| {
        space.unrank_into(i, &mut x);
        push(i, T::of(sector_diagonal(&x, params, disorder)));
        for_each_neighbor(&x, volume, |y| {
            push(space.index_of(y).expect("neighbor inside volume"), hop)
        });
    });
    Ok(SectorOperator {
        states: (0..space.dim()).collect(),
        space,
        matrix,
        params: *params,
        disorder: Arc::new(disorder.clone()),
        surgery: Vec::new(),
    })
}

impl<T: Real> SectorOperator<T> {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn n_particles(&self) -> usize {
        self.space.n_particles()
    }

    pub fn config(&self, row: usize) -> Config {
        self.space.config(self.states[row])
    }

    /// Row of configuration index `idx`, if represented.
    pub fn row_of(&self, idx: usize) -> Option<usize> {
        self.states.binary_search(&idx).ok()
    }

    pub fn row_of_config(&self, x: &Config) -> Option<usize> {
        self.space.index(x).and_then(|i| self.row_of(i))
    }

    /// Rows whose configuration has at most `k` clusters, and the rest.
    pub fn split_by_clusters(&self, k: usize) -> (Vec<usize>, Vec<usize>) {
        let mut low = Vec::new();
        let mut high = Vec::new();
        let mut x = Vec::new();
        for (r, &i) in self.states.iter().enumerate() {
            self.space.unrank_into(i, &mut x);
            if cluster_count(&x) <= k {
                low.push(r);
            } else {
                high.push(r);
            }
        }
        (low, high)
    }

    /// Rows whose configuration is a single cluster.
    pub fn edge_rows(&self) -> Vec<usize> {
        self.split_by_clusters(1).0
    }

    /// Local rows of the sorted configuration indices `set`; every element
    /// must be represented.
    pub fn rows_of(&self, set: &[usize]) -> Result<Vec<usize>> {
        set.iter()
            .map(|&i| {
                self.row_of(i).ok_or_else(|| {
                    Error::Parameter(format!("configuration {} is not represented", self.space.config(i)))
                })
            })
            .collect()
    }

    /// `max |A - A^T|`.
    pub fn asymmetry(&self) -> T {
        self.matrix.asymmetry()
    }

    /// Largest number of stored entries in a row.
    pub fn max_row_len(&self) -> usize {
        (0..self.dim()).map(|r| self.matrix.row_len(r)).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::eigvalsh;
    use ndarray::array;

    fn params(d: f64, lam: f64, l: Site) -> ModelParams {
        ModelParams::new(d, lam, l).unwrap()
    }

    #[test]
    fn single_particle_example() {
        let p = params(2.0, 0.0, 1);
        let h = build_sector_hamiltonian::<f64>(1, &p, &DisorderRealization::zero(1)).unwrap();
        let want = array![[0.75, -0.25, 0.0], [-0.25, 1.0, -0.25], [0.0, -0.25, 0.75]];
        assert_eq!(h.matrix.to_dense(), want);
        let w = eigvalsh(&h.matrix.to_dense()).unwrap();
        for (a, b) in w.iter().zip([0.5, 0.75, 1.25]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn interior_edge_diagonal() {
        let p = params(3.0, 2.0, 6);
        let omega = crate::operators::sample_disorder(&Default::default(), 6, 4).unwrap();
        let h = build_sector_hamiltonian::<f64>(3, &p, &omega).unwrap();
        let x = Config::packed(0, 3);
        let r = h.row_of_config(&x).unwrap();
        let want = 2.0 / 6.0 + (1.0 - 1.0 / 3.0) + 2.0 * omega.potential(x.sites());
        assert!((h.matrix.get(r, r) - want).abs() < 1e-14);
        assert_eq!(h.asymmetry(), 0.0);
        assert!(h.max_row_len() <= 2 * 3 + 1);
    }

    #[test]
    fn clean_lower_bound() {
        for n in 1..=4 {
            let p = params(2.5, 0.0, 4);
            let h = build_sector_hamiltonian::<f64>(n, &p, &DisorderRealization::zero(4)).unwrap();
            let w = eigvalsh(&h.matrix.to_dense()).unwrap();
            assert!(w[0] >= p.gap() - 1e-12, "N = {n}: {}", w[0]);
        }
    }

    #[test]
    fn mismatched_volume() {
        let p = params(2.0, 1.0, 3);
        assert!(build_sector_hamiltonian::<f64>(1, &p, &DisorderRealization::zero(2)).is_err());
    }
}
