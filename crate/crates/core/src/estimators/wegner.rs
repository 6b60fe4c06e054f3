use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::wilson_upper;
use crate::config_space::Config;
use crate::error::{param, Result};
use crate::operators::{build_sector_hamiltonian, DisorderRealization, DisorderSpec, ModelParams, SeedToken};
use crate::spectral::{diagonalize_window, DropletWindow, Interval};

/// Constants of the Wegner estimate for restrictions to `S_M(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WegnerParameters {
    pub anisotropy: f64,
    pub margin: f64,
    pub disorder: f64,
    pub density_sup: f64,
    /// `1 + sqrt(2) / (delta (Delta - 1))`
    pub c_w: f64,
}

impl WegnerParameters {
    pub fn new(params: &ModelParams, spec: &DisorderSpec) -> Result<Self> {
        params.validate()?;
        if !(params.disorder > 0.0) {
            return param("the Wegner bound needs a positive disorder strength");
        }
        Ok(WegnerParameters {
            anisotropy: params.anisotropy,
            margin: params.window_margin,
            disorder: params.disorder,
            density_sup: spec.density_sup(),
            c_w: wegner_constant(params.window_margin, params.anisotropy),
        })
    }

    /// `C_W lambda^{-1} ||rho||_inf (2M + 1)(2M + N) |I|`.
    pub fn bound(&self, half_width: usize, n_particles: usize, width: f64) -> f64 {
        let m = half_width as f64;
        self.c_w / self.disorder * self.density_sup * (2.0 * m + 1.0) * (2.0 * m + n_particles as f64) * width
    }

    /// Largest admissible `|I| = 2 delta (1 - 1/Delta) / C_W`.
    pub fn validity_cap(&self) -> f64 {
        2.0 * self.margin * (1.0 - 1.0 / self.anisotropy) / self.c_w
    }

    /// Interval width, halved from the validity cap until the bound drops
    /// below `target`.
    pub fn shrink_width(&self, half_width: usize, n_particles: usize, target: f64) -> f64 {
        let mut w = self.validity_cap();
        while self.bound(half_width, n_particles, w) >= target {
            w *= 0.5;
        }
        w
    }
}

/// `C_W(delta, Delta) = 1 + sqrt(2) / (delta (Delta - 1))`.
pub fn wegner_constant(margin: f64, anisotropy: f64) -> f64 {
    1.0 + 2f64.sqrt() / (margin * (anisotropy - 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WegnerOutcome {
    pub interval: Interval,
    pub hits: u64,
    pub trials: u64,
    pub frequency: f64,
    /// 99% Wilson upper confidence bound of the hit probability.
    pub wilson_upper: f64,
    pub bound: f64,
}

impl WegnerOutcome {
    pub fn passed(&self) -> bool {
        self.wilson_upper <= self.bound
    }
}

/// Frequency of `sigma(H_{S_M(x)}) ∩ I != ∅` over `realizations` draws.
#[allow(clippy::too_many_arguments)]
pub fn wegner_empirical(
    params: &ModelParams,
    spec: &DisorderSpec,
    n_particles: usize,
    half_width: usize,
    center: &Config,
    interval: Interval,
    realizations: u64,
    master_seed: u64,
) -> Result<WegnerOutcome> {
    let w = WegnerParameters::new(params, spec)?;
    let droplet = DropletWindow::first(params.anisotropy, params.window_margin)?.interval();
    if !droplet.contains_interval(&interval) {
        return param(format!("[{}, {}] is not inside the droplet window", interval.lo, interval.hi));
    }
    if interval.width() > w.validity_cap() {
        return param(format!(
            "interval width {} exceeds the admissible {}",
            interval.width(),
            w.validity_cap()
        ));
    }
    if realizations == 0 {
        return param("at least one realization is needed");
    }
    let hits: Vec<Result<bool>> = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let disorder = DisorderRealization::sample(spec, params.half_length, SeedToken::new(master_seed, r))?;
            let op = build_sector_hamiltonian::<f64>(n_particles, params, &disorder)?;
            let boxed = op.space.edge_box(center, half_width)?;
            let restricted = op.restrict(&boxed.support_set)?;
            let (data, _) = diagonalize_window(&restricted, interval)?;
            Ok(!data.is_empty())
        })
        .collect();
    let mut count = 0u64;
    for h in hits {
        count += u64::from(h?);
    }
    Ok(WegnerOutcome {
        interval,
        hits: count,
        trials: realizations,
        frequency: count as f64 / realizations as f64,
        wilson_upper: wilson_upper(count, realizations, 0.99)?,
        bound: w.bound(half_width, n_particles, interval.width()),
    })
}
