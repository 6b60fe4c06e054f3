use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::wilson_upper;
use super::wegner::wegner_constant;
use crate::config_space::{box_half_width, Config, Site};
use crate::error::{param, Result};
use crate::operators::{
    build_sector_hamiltonian, DisorderRealization, DisorderSpec, ModelParams, SectorOperator, SeedToken,
};
use crate::spectral::{diagonalize_window, DropletWindow, Interval};

/// Constants of the two-box separation estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationParameters {
    pub half_width: usize,
    /// `log(1 + delta (Delta - 1) / 16)`
    pub eta1: f64,
    /// `128 / (eta1 delta^2 (Delta - 1)^2)`
    pub c1: f64,
    /// `C_W(delta / 4, Delta)`
    pub c_w: f64,
}

impl SeparationParameters {
    pub fn new(params: &ModelParams, half_width: usize) -> Self {
        let g = params.window_margin * (params.anisotropy - 1.0);
        let eta1 = (1.0 + g / 16.0).ln();
        SeparationParameters {
            half_width,
            eta1,
            c1: 128.0 / (eta1 * g * g),
            c_w: wegner_constant(params.window_margin / 4.0, params.anisotropy),
        }
    }

    /// `2 C_1 exp(-(3/2) eta_1 M)`.
    pub fn offset(&self) -> f64 {
        2.0 * self.c1 * (-1.5 * self.eta1 * self.half_width as f64).exp()
    }

    /// `C_W lambda^{-1} ||rho||_inf M^3 (eps + offset)` with the unknown
    /// absolute constant set to one.
    pub fn reference(&self, params: &ModelParams, spec: &DisorderSpec, epsilon: f64) -> f64 {
        let m = self.half_width as f64;
        self.c_w / params.disorder * spec.density_sup() * m.powi(3) * (epsilon + self.offset())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationOutcome {
    pub half_width: usize,
    pub epsilons: Vec<f64>,
    pub hits: Vec<u64>,
    pub trials: u64,
    pub frequencies: Vec<f64>,
    pub wilson_upper: Vec<f64>,
    pub reference: Vec<f64>,
    /// Realizations where either box has no eigenvalue in the window.
    pub empty: u64,
}

fn window_spectrum(op: &SectorOperator<f64>, center: &Config, m: usize, window: Interval) -> Result<Vec<f64>> {
    let boxed = op.space.edge_box(center, m)?;
    let (data, _) = diagonalize_window(&op.restrict(&boxed.support_set)?, window)?;
    Ok(data.values)
}

fn set_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| (x - y).abs()))
        .fold(f64::INFINITY, f64::min)
}

/// Probability that the `I_{1,delta/2}` spectra of `H_{S_M(x)}` and
/// `H_{S_M(y)}` come within `eps`, for packed `x, y` starting at `i, j`
/// and `M = floor(|i - j| / 4)`.
#[allow(clippy::too_many_arguments)]
pub fn spectral_separation(
    params: &ModelParams,
    spec: &DisorderSpec,
    n_particles: usize,
    i: Site,
    j: Site,
    epsilons: &[f64],
    realizations: u64,
    master_seed: u64,
) -> Result<SeparationOutcome> {
    params.validate()?;
    let m = box_half_width(i, j);
    let need = 2.0 * n_particles as f64 + 2.0 * params.boundary;
    if (m as f64) < need {
        return param(format!("box half-width {m} is below 2N + 2 beta = {need}"));
    }
    if realizations == 0 || epsilons.iter().any(|e| !(*e >= 0.0)) {
        return param("need realizations and nonnegative offsets");
    }
    let window = DropletWindow::first(params.anisotropy, params.window_margin / 2.0)?.interval();
    let (x, y) = (Config::packed(i, n_particles), Config::packed(j, n_particles));
    let gaps: Vec<Result<f64>> = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let disorder = DisorderRealization::sample(spec, params.half_length, SeedToken::new(master_seed, r))?;
            let op = build_sector_hamiltonian::<f64>(n_particles, params, &disorder)?;
            let sx = window_spectrum(&op, &x, m, window)?;
            let sy = window_spectrum(&op, &y, m, window)?;
            Ok(set_gap(&sx, &sy))
        })
        .collect();
    let gaps: Vec<f64> = gaps.into_iter().collect::<Result<_>>()?;
    let sp = SeparationParameters::new(params, m);
    let hits: Vec<u64> = epsilons
        .iter()
        .map(|&e| gaps.iter().filter(|&&g| g <= e).count() as u64)
        .collect();
    Ok(SeparationOutcome {
        half_width: m,
        epsilons: epsilons.to_vec(),
        frequencies: hits.iter().map(|&h| h as f64 / realizations as f64).collect(),
        wilson_upper: hits
            .iter()
            .map(|&h| wilson_upper(h, realizations, 0.99))
            .collect::<Result<_>>()?,
        reference: epsilons.iter().map(|&e| sp.reference(params, spec, e)).collect(),
        hits,
        trials: realizations,
        empty: gaps.iter().filter(|g| g.is_infinite()).count() as u64,
    })
}
