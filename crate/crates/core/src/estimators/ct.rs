use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config_space::{set_distance, Config, Metric};
use crate::error::{param, Error, Result};
use crate::linalg::dense;
use crate::operators::{build_sector_hamiltonian, DisorderRealization, ModelParams, SectorOperator, SeedToken};
use crate::spectral::{greens_columns, DropletWindow};

use super::AUX_STREAM;

/// Constants of the bulk and edge-projected Combes-Thomas bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CTParameters {
    pub k: usize,
    pub anisotropy: f64,
    pub margin: f64,
    /// `4 Delta / (delta (Delta - 1))`
    pub c: f64,
    /// `log(1 + delta (Delta - 1) / (4 (k + 1)))`
    pub eta: f64,
    /// `8 Delta / (delta (Delta - 1))`
    pub c_prime: f64,
    /// `log(1 + delta (Delta - 1) / 8)`
    pub eta_prime: f64,
}

impl CTParameters {
    pub fn new(anisotropy: f64, margin: f64, k: usize) -> Result<Self> {
        if !(anisotropy > 1.0) || !(margin > 0.0 && margin < 1.0) || k == 0 {
            return param(format!("need Delta > 1, 0 < delta < 1, k >= 1; got {anisotropy}, {margin}, {k}"));
        }
        let g = margin * (anisotropy - 1.0);
        Ok(CTParameters {
            k,
            anisotropy,
            margin,
            c: 4.0 * anisotropy / g,
            eta: (1.0 + g / (4.0 * (k + 1) as f64)).ln(),
            c_prime: 8.0 * anisotropy / g,
            eta_prime: (1.0 + g / 8.0).ln(),
        })
    }

    pub fn bound(&self, distance: u64) -> f64 {
        self.c * (-self.eta * distance as f64).exp()
    }

    pub fn edge_bound(&self, distance: u64) -> f64 {
        self.c_prime * (-self.eta_prime * distance as f64).exp()
    }
}

/// One evaluated resolvent block against its bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CTCheck {
    pub distance: u64,
    pub lhs: f64,
    pub bound: f64,
}

impl CTCheck {
    pub fn passed(&self) -> bool {
        self.lhs <= self.bound * (1.0 + 1e-10)
    }

    pub fn margin(&self) -> f64 {
        self.bound - self.lhs
    }

    pub fn log_margin(&self) -> f64 {
        (self.bound / self.lhs).ln()
    }
}

/// A pair of configuration sets, as sorted configuration indices.
pub type SetPair = (Vec<usize>, Vec<usize>);

fn configs(op: &SectorOperator<f64>, set: &[usize]) -> Vec<Config> {
    set.iter().map(|&i| op.space.config(i)).collect()
}

fn block_norms(
    op: &SectorOperator<f64>,
    h: &SectorOperator<f64>,
    z: Complex64,
    pairs: &[SetPair],
    bound: impl Fn(u64) -> f64,
) -> Result<Vec<CTCheck>> {
    let mut cols: Vec<usize> = pairs.iter().flat_map(|(_, b)| b.iter().copied()).collect();
    cols.sort_unstable();
    cols.dedup();
    let col_rows = h.rows_of(&cols)?;
    let g = greens_columns(&h.matrix, z, &col_rows)?;
    pairs
        .iter()
        .map(|(a, b)| {
            if a.is_empty() || b.is_empty() {
                return Err(Error::EmptySet("Combes-Thomas set"));
            }
            let ra = h.rows_of(a)?;
            let cb: Vec<usize> = b.iter().map(|i| cols.binary_search(i).expect("column")).collect();
            let block = ndarray::Array2::from_shape_fn((ra.len(), cb.len()), |(p, q)| g[(ra[p], cb[q])]);
            let distance = set_distance(&configs(op, a), &configs(op, b), Metric::One)?;
            Ok(CTCheck {
                distance,
                lhs: dense::complex_norm(&block)?,
                bound: bound(distance),
            })
        })
        .collect()
}

/// Configuration indices of `op` with more than `k` clusters.
pub fn bulk_indices(op: &SectorOperator<f64>, k: usize) -> Vec<usize> {
    op.split_by_clusters(k).1.into_iter().map(|r| op.states[r]).collect()
}

fn check_energy(window: crate::spectral::Interval, energy: f64) -> Result<()> {
    if !window.contains(energy) {
        return Err(Error::OutsideWindow {
            energy,
            lo: window.lo,
            hi: window.hi,
        });
    }
    Ok(())
}

/// `||chi_A (Hbar_k - E - i eps)^{-1} chi_B||` against `C exp(-eta dist_1(A, B))`
/// for each pair, with the inverse taken on the configurations beyond `k`
/// clusters.
pub fn combes_thomas_batch(
    op: &SectorOperator<f64>,
    k: usize,
    energy: f64,
    epsilon: f64,
    pairs: &[SetPair],
) -> Result<Vec<CTCheck>> {
    let p = &op.params;
    let ct = CTParameters::new(p.anisotropy, p.window_margin, k)?;
    check_energy(DropletWindow::new(p.anisotropy, p.window_margin, k)?.interval(), energy)?;
    let bulk = bulk_indices(op, k);
    for (a, b) in pairs {
        if a.iter().chain(b).any(|i| bulk.binary_search(i).is_err()) {
            return param("Combes-Thomas sets must lie in the bulk");
        }
    }
    let hbar = op.restrict(&bulk)?;
    block_norms(op, &hbar, Complex64::new(energy, epsilon), pairs, |d| ct.bound(d))
}

pub fn combes_thomas_verify(
    op: &SectorOperator<f64>,
    k: usize,
    energy: f64,
    epsilon: f64,
    a: &[usize],
    b: &[usize],
) -> Result<CTCheck> {
    Ok(combes_thomas_batch(op, k, energy, epsilon, &[(a.to_vec(), b.to_vec())])?[0])
}

/// `||chi_A (H + P_1 - E - i eps)^{-1} chi_B||` against
/// `C' exp(-eta' dist_1(A, B))` on the whole configuration set.
pub fn edge_projection_ct_batch(
    op: &SectorOperator<f64>,
    energy: f64,
    epsilon: f64,
    pairs: &[SetPair],
) -> Result<Vec<CTCheck>> {
    let p = &op.params;
    let ct = CTParameters::new(p.anisotropy, p.window_margin, 1)?;
    check_energy(DropletWindow::first(p.anisotropy, p.window_margin)?.interval(), energy)?;
    let shifted = op.add_edge_projection();
    block_norms(op, &shifted, Complex64::new(energy, epsilon), pairs, |d| ct.edge_bound(d))
}

pub fn edge_projection_ct_verify(
    op: &SectorOperator<f64>,
    energy: f64,
    epsilon: f64,
    a: &[usize],
    b: &[usize],
) -> Result<CTCheck> {
    Ok(edge_projection_ct_batch(op, energy, epsilon, &[(a.to_vec(), b.to_vec())])?[0])
}

/// Random sorted subset of `pool` with between 1 and `max_size` elements.
pub fn random_set(pool: &[usize], max_size: usize, rng: &mut impl Rng) -> Vec<usize> {
    let size = rng.random_range(1..=max_size.min(pool.len()).max(1));
    let mut v: Vec<usize> = sample(rng, pool.len(), size).into_iter().map(|i| pool[i]).collect();
    v.sort_unstable();
    v
}

/// Grid of realizations, particle numbers, energies, offsets and random
/// set pairs over which both bounds are checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CTSweepConfig {
    pub params: ModelParams,
    pub disorder: crate::operators::DisorderSpec,
    pub n_list: Vec<usize>,
    pub k: usize,
    /// Number of evenly spaced energies across the window, ends included.
    pub energies: usize,
    pub epsilons: Vec<f64>,
    pub pairs: usize,
    pub max_set_size: usize,
    pub realizations: u64,
    pub master_seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CTSweepReport {
    pub bulk_checks: usize,
    pub bulk_violations: usize,
    pub edge_checks: usize,
    pub edge_violations: usize,
    /// Largest `lhs / bound` seen.
    pub worst_ratio: f64,
    /// Least-squares slope of `log(bound / lhs)` against distance.
    pub log_margin_slope: f64,
}

fn energies(window: crate::spectral::Interval, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![window.center()],
        _ => (0..count)
            .map(|t| window.lo + window.width() * t as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xm = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - xm).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

pub fn ct_sweep(cfg: &CTSweepConfig) -> Result<CTSweepReport> {
    cfg.params.validate()?;
    let bulk_window = DropletWindow::new(cfg.params.anisotropy, cfg.params.window_margin, cfg.k)?.interval();
    let edge_window = DropletWindow::first(cfg.params.anisotropy, cfg.params.window_margin)?.interval();
    let per_realization: Vec<Result<(Vec<CTCheck>, Vec<CTCheck>)>> = (0..cfg.realizations)
        .into_par_iter()
        .map(|r| {
            let seed = SeedToken::new(cfg.master_seed, r);
            let disorder = DisorderRealization::sample(&cfg.disorder, cfg.params.half_length, seed)?;
            let mut rng = SeedToken::new(cfg.master_seed, r | AUX_STREAM).rng();
            let mut bulk_out = Vec::new();
            let mut edge_out = Vec::new();
            for &n in &cfg.n_list {
                let op = build_sector_hamiltonian::<f64>(n, &cfg.params, &disorder)?;
                let bulk = bulk_indices(&op, cfg.k);
                let all: Vec<usize> = (0..op.space.dim()).collect();
                for &eps in &cfg.epsilons {
                    if !bulk.is_empty() {
                        for e in energies(bulk_window, cfg.energies) {
                            let pairs: Vec<SetPair> = (0..cfg.pairs)
                                .map(|_| (random_set(&bulk, cfg.max_set_size, &mut rng), random_set(&bulk, cfg.max_set_size, &mut rng)))
                                .collect();
                            bulk_out.extend(combes_thomas_batch(&op, cfg.k, e, eps, &pairs)?);
                        }
                    }
                    for e in energies(edge_window, cfg.energies) {
                        let pairs: Vec<SetPair> = (0..cfg.pairs)
                            .map(|_| (random_set(&all, cfg.max_set_size, &mut rng), random_set(&all, cfg.max_set_size, &mut rng)))
                            .collect();
                        edge_out.extend(edge_projection_ct_batch(&op, e, eps, &pairs)?);
                    }
                }
            }
            Ok((bulk_out, edge_out))
        })
        .collect();
    let mut report = CTSweepReport::default();
    let mut margins = Vec::new();
    for res in per_realization {
        let (bulk, edge) = res?;
        for (checks, total, bad) in [
            (&bulk, &mut report.bulk_checks, &mut report.bulk_violations),
            (&edge, &mut report.edge_checks, &mut report.edge_violations),
        ] {
            for c in checks {
                *total += 1;
                *bad += usize::from(!c.passed());
                report.worst_ratio = report.worst_ratio.max(c.lhs / c.bound);
                margins.push((c.distance as f64, c.log_margin()));
            }
        }
    }
    report.log_margin_slope = slope(&margins);
    Ok(report)
}
