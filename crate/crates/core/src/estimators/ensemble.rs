use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{fit_exponential, ExpFit, FitPoint, RunningStats};
use super::RESAMPLE_STRIDE;
use crate::config_space::{Config, Site};
use crate::correlators::{correlator_apriori_constant, sector_correlator};
use crate::error::{param, Error, Result};
use crate::operators::{build_sector_hamiltonian, DisorderRealization, DisorderSpec, ModelParams, SeedToken};
use crate::spectral::{diagonalize_window, greens_columns, DropletWindow};

/// Disorder ensemble over distances and particle numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub params: ModelParams,
    #[serde(default)]
    pub disorder: DisorderSpec,
    pub n_list: Vec<usize>,
    pub distances: Vec<u32>,
    pub realizations: u64,
    pub master_seed: u64,
    /// Fractional exponent `0 < s < 1`.
    #[serde(default = "default_s")]
    pub s: f64,
    /// Imaginary part of the resolvent energy.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Largest particle number in eigencorrelator sums.
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Resolvent energy; the center of the droplet window when absent.
    #[serde(default)]
    pub energy: Option<f64>,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
}

fn default_s() -> f64 {
    0.5
}

fn default_epsilon() -> f64 {
    1e-3
}

fn default_n_max() -> usize {
    4
}

fn default_confidence() -> f64 {
    0.95
}

impl EnsembleConfig {
    pub fn new(params: ModelParams, distances: Vec<u32>, realizations: u64, master_seed: u64) -> Self {
        EnsembleConfig {
            params,
            disorder: DisorderSpec::default(),
            n_list: vec![2],
            distances,
            realizations,
            master_seed,
            s: default_s(),
            epsilon: default_epsilon(),
            n_max: default_n_max(),
            energy: None,
            confidence: default_confidence(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.disorder.validate()?;
        if !(self.s > 0.0 && self.s < 1.0) {
            return param(format!("fractional exponent {} must lie in (0, 1)", self.s));
        }
        if self.realizations == 0 {
            return param("at least one realization is needed");
        }
        if self.distances.is_empty() {
            return param("no distances requested");
        }
        if !(self.epsilon >= 0.0) {
            return param("resolvent offset must be nonnegative");
        }
        if self.n_list.iter().any(|&n| n == 0) || self.n_max == 0 {
            return param("particle numbers must be positive");
        }
        Ok(())
    }

    fn window(&self) -> Result<crate::spectral::Interval> {
        Ok(DropletWindow::first(self.params.anisotropy, self.params.window_margin)?.interval())
    }

    pub fn resolvent_energy(&self) -> Result<f64> {
        Ok(self.energy.unwrap_or(self.window()?.center()))
    }
}

/// Per-distance statistics of an ensemble with an exponential fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRecord {
    /// Particle number, or `None` for sums over sectors.
    pub n_particles: Option<usize>,
    pub distances: Vec<u32>,
    pub stats: Vec<RunningStats>,
    pub fit: Option<ExpFit>,
    pub fit_error: Option<String>,
    /// Realizations redrawn because the resolvent was singular.
    pub resampled: u64,
    /// Largest top-sector correlator seen, for sector sums.
    pub tail_max: Option<f64>,
    /// Sector correlators above their a priori bound.
    pub apriori_violations: usize,
    /// `samples[r][k]`: realization `r` at `distances[k]`.
    pub samples: Vec<Vec<f64>>,
}

impl DecayRecord {
    fn from_samples(
        n_particles: Option<usize>,
        distances: Vec<u32>,
        samples: Vec<Vec<f64>>,
        confidence: f64,
    ) -> Self {
        let stats: Vec<RunningStats> = (0..distances.len())
            .map(|k| samples.iter().map(|row| row[k]).collect())
            .collect();
        let points: Vec<FitPoint> = distances
            .iter()
            .zip(&stats)
            .map(|(&d, s)| FitPoint {
                distance: d as f64,
                mean: s.mean,
                std_error: s.std_error(),
            })
            .collect();
        let (fit, fit_error) = match fit_exponential(&points, confidence) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        DecayRecord {
            n_particles,
            distances,
            stats,
            fit,
            fit_error,
            resampled: 0,
            tail_max: None,
            apriori_violations: 0,
            samples,
        }
    }

    pub fn means(&self) -> Vec<f64> {
        self.stats.iter().map(|s| s.mean).collect()
    }

    pub fn std_errors(&self) -> Vec<f64> {
        self.stats.iter().map(|s| s.std_error()).collect()
    }

    /// Whether consecutive means never increase by more than `sigmas`
    /// combined standard errors.
    pub fn monotone_within(&self, sigmas: f64) -> bool {
        self.stats.windows(2).all(|w| {
            let tol = sigmas * (w[0].std_error().powi(2) + w[1].std_error().powi(2)).sqrt();
            w[1].mean <= w[0].mean + tol
        })
    }

    pub fn decays(&self) -> bool {
        self.fit.as_ref().is_some_and(ExpFit::decays)
    }
}

/// First site of the left packed configuration, placing the pair of edge
/// configurations at the largest distance symmetrically in the volume.
pub fn edge_anchor(n_particles: usize, max_distance: u32, half_length: Site) -> Result<Site> {
    let span = max_distance as Site + n_particles as Site - 1;
    let first = -(span / 2) - (span % 2);
    if first < -half_length || first + span > half_length {
        return param(format!(
            "distance {max_distance} with {n_particles} particles does not fit in [-{half_length}, {half_length}]"
        ));
    }
    Ok(first)
}

fn fractional_moment_row(cfg: &EnsembleConfig, n: usize, anchor: Site, r: u64) -> Result<(Vec<f64>, u64)> {
    let z = Complex64::new(cfg.resolvent_energy()?, cfg.epsilon);
    let mut attempt = 0u64;
    loop {
        let seed = SeedToken::new(cfg.master_seed, r + attempt * RESAMPLE_STRIDE);
        let disorder = DisorderRealization::sample(&cfg.disorder, cfg.params.half_length, seed)?;
        let op = build_sector_hamiltonian::<f64>(n, &cfg.params, &disorder)?;
        let u = op.space.index(&Config::packed(anchor, n)).expect("anchor inside");
        let cols: Vec<usize> = cfg
            .distances
            .iter()
            .map(|&d| op.space.index(&Config::packed(anchor + d as Site, n)).expect("inside"))
            .collect();
        match greens_columns(&op.matrix, z, &cols) {
            Ok(g) => return Ok(((0..cols.len()).map(|k| g[(u, k)].norm().powf(cfg.s)).collect(), attempt)),
            Err(Error::ResolventSingular { .. }) if attempt < 16 => attempt += 1,
            Err(e) => return Err(e),
        }
    }
}

/// `E |<phi_u, (H_N - E - i eps)^{-1} phi_v>|^s` over packed `u, v` at the
/// configured distances, one record per particle number.
pub fn fractional_moment_scan(cfg: &EnsembleConfig) -> Result<Vec<DecayRecord>> {
    cfg.validate()?;
    let dmax = *cfg.distances.iter().max().expect("nonempty");
    cfg.n_list
        .iter()
        .map(|&n| {
            let anchor = edge_anchor(n, dmax, cfg.params.half_length)?;
            let rows: Vec<Result<(Vec<f64>, u64)>> = (0..cfg.realizations)
                .into_par_iter()
                .map(|r| fractional_moment_row(cfg, n, anchor, r))
                .collect();
            let mut samples = Vec::with_capacity(rows.len());
            let mut resampled = 0;
            for row in rows {
                let (values, redrawn) = row?;
                samples.push(values);
                resampled += redrawn;
            }
            let mut rec = DecayRecord::from_samples(Some(n), cfg.distances.clone(), samples, cfg.confidence);
            rec.resampled = resampled;
            Ok(rec)
        })
        .collect()
}

/// Sites `(i, j)` at distance `d`, placed symmetrically about the origin.
pub fn site_pair(d: u32) -> (Site, Site) {
    let i = -((d as Site + 1) / 2);
    (i, i + d as Site)
}

struct CorrelatorRow {
    sums: Vec<f64>,
    tail: f64,
    violations: usize,
}

fn eigencorrelator_row(cfg: &EnsembleConfig, r: u64) -> Result<CorrelatorRow> {
    let window = cfg.window()?;
    let seed = SeedToken::new(cfg.master_seed, r);
    let disorder = DisorderRealization::sample(&cfg.disorder, cfg.params.half_length, seed)?;
    let bound = correlator_apriori_constant(cfg.params.anisotropy, cfg.params.window_margin);
    let mut row = CorrelatorRow {
        sums: vec![0.0; cfg.distances.len()],
        tail: 0.0,
        violations: 0,
    };
    for n in 1..=cfg.n_max {
        let op = build_sector_hamiltonian::<f64>(n, &cfg.params, &disorder)?;
        let (data, _) = diagonalize_window(&op, window)?;
        if data.is_empty() {
            continue;
        }
        for (k, &d) in cfg.distances.iter().enumerate() {
            let (i, j) = site_pair(d);
            let q = sector_correlator(&op, &data, i, j, &window)?;
            row.violations += usize::from(q > bound * n as f64);
            row.sums[k] += q;
            if n == cfg.n_max {
                row.tail = row.tail.max(q);
            }
        }
    }
    Ok(row)
}

/// `E sum_{N <= N_max} Q_N(i, j; I_{1,delta})` at the configured distances.
pub fn eigencorrelator_decay(cfg: &EnsembleConfig) -> Result<DecayRecord> {
    cfg.validate()?;
    let l = cfg.params.half_length;
    if cfg.distances.iter().any(|&d| {
        let (i, j) = site_pair(d);
        i < -l || j > l
    }) {
        return param("site pair outside the chain");
    }
    let rows: Vec<Result<CorrelatorRow>> = (0..cfg.realizations)
        .into_par_iter()
        .map(|r| eigencorrelator_row(cfg, r))
        .collect();
    let mut samples = Vec::with_capacity(rows.len());
    let mut tail = 0.0f64;
    let mut violations = 0;
    for row in rows {
        let row = row?;
        tail = tail.max(row.tail);
        violations += row.violations;
        samples.push(row.sums);
    }
    let mut rec = DecayRecord::from_samples(None, cfg.distances.clone(), samples, cfg.confidence);
    rec.tail_max = Some(tail);
    rec.apriori_violations = violations;
    Ok(rec)
}
