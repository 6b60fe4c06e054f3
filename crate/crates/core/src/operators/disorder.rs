use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::Beta;
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;

use crate::config_space::Site;
use crate::error::{param, Error, Result};

/// Single-site field distribution, supported on `[0, omega_max]` with a
/// bounded density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum DisorderSpec {
    Uniform {
        omega_max: f64,
    },
    /// `omega_max * Beta(a, b)` with `a, b >= 1`.
    TruncatedBeta {
        a: f64,
        b: f64,
        omega_max: f64,
    },
    /// Piecewise constant density on consecutive cells of equal width
    /// covering `[0, omega_max]`, proportional to `weights`.
    PiecewiseDensity {
        weights: Vec<f64>,
        omega_max: f64,
    },
}

impl Default for DisorderSpec {
    fn default() -> Self {
        DisorderSpec::Uniform { omega_max: 1.0 }
    }
}

impl DisorderSpec {
    pub fn validate(&self) -> Result<()> {
        let wmax = self.omega_max();
        if !(wmax > 0.0 && wmax.is_finite()) {
            return param(format!("omega_max {wmax} must be positive and finite"));
        }
        match self {
            DisorderSpec::Uniform { .. } => Ok(()),
            DisorderSpec::TruncatedBeta { a, b, .. } => {
                if *a >= 1.0 && *b >= 1.0 && a.is_finite() && b.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Unsupported(format!(
                        "beta shape ({a}, {b}) has an unbounded density"
                    )))
                }
            }
            DisorderSpec::PiecewiseDensity { weights, .. } => {
                if weights.is_empty()
                    || weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite())
                    || weights.iter().sum::<f64>() <= 0.0
                {
                    param("piecewise weights must be nonnegative with a positive sum")
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn omega_max(&self) -> f64 {
        match self {
            DisorderSpec::Uniform { omega_max }
            | DisorderSpec::TruncatedBeta { omega_max, .. }
            | DisorderSpec::PiecewiseDensity { omega_max, .. } => *omega_max,
        }
    }

    /// `sup rho`.
    pub fn density_sup(&self) -> f64 {
        let wmax = self.omega_max();
        match self {
            DisorderSpec::Uniform { .. } => 1.0 / wmax,
            DisorderSpec::TruncatedBeta { a, b, .. } => {
                let (a, b) = (*a, *b);
                let mode = if a == 1.0 && b == 1.0 {
                    0.5
                } else {
                    (a - 1.0) / (a + b - 2.0)
                };
                let log_pdf = |x: f64| {
                    let la = if a == 1.0 { 0.0 } else { (a - 1.0) * x.ln() };
                    let lb = if b == 1.0 { 0.0 } else { (b - 1.0) * (1.0 - x).ln() };
                    la + lb - ln_beta(a, b)
                };
                log_pdf(mode).exp() / wmax
            }
            DisorderSpec::PiecewiseDensity { weights, .. } => {
                let total: f64 = weights.iter().sum();
                let cell = wmax / weights.len() as f64;
                weights.iter().fold(0.0, |m: f64, w| m.max(*w)) / (total * cell)
            }
        }
    }

    fn draw(&self, rng: &mut impl Rng, n: usize) -> Result<Vec<f64>> {
        self.validate()?;
        let wmax = self.omega_max();
        Ok(match self {
            DisorderSpec::Uniform { .. } => (0..n).map(|_| wmax * rng.random::<f64>()).collect(),
            DisorderSpec::TruncatedBeta { a, b, .. } => {
                let d = Beta::new(*a, *b).map_err(|e| Error::Unsupported(e.to_string()))?;
                (0..n).map(|_| wmax * d.sample(rng)).collect()
            }
            DisorderSpec::PiecewiseDensity { weights, .. } => {
                let total: f64 = weights.iter().sum();
                let cell = wmax / weights.len() as f64;
                (0..n)
                    .map(|_| {
                        let mut u = rng.random::<f64>() * total;
                        let mut k = 0;
                        while k + 1 < weights.len() && u >= weights[k] {
                            u -= weights[k];
                            k += 1;
                        }
                        cell * (k as f64 + rng.random::<f64>())
                    })
                    .collect()
            }
        })
    }
}

/// Reproducibility token: realization `stream` of the run seeded by `master`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedToken {
    pub master: u64,
    pub stream: u64,
}

impl SeedToken {
    pub fn new(master: u64, stream: u64) -> Self {
        SeedToken { master, stream }
    }

    /// Independent generator for this token. Streams of one master seed do
    /// not overlap, so realizations can be drawn in any order.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

/// Fields `omega_i`, `i = -L..=L`, with their provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderRealization {
    pub spec: DisorderSpec,
    pub seed: SeedToken,
    pub half_length: Site,
    pub values: Vec<f64>,
}

impl DisorderRealization {
    /// Draws the realization for `seed`; deterministic in `(spec, L, seed)`.
    pub fn sample(spec: &DisorderSpec, half_length: Site, seed: SeedToken) -> Result<Self> {
        if half_length < 0 {
            return param(format!("half-length {half_length} is negative"));
        }
        let n = (2 * half_length + 1) as usize;
        let values = spec.draw(&mut seed.rng(), n)?;
        Ok(DisorderRealization {
            spec: spec.clone(),
            seed,
            half_length,
            values,
        })
    }

    /// Realization with prescribed values, e.g. `omega = 0`.
    pub fn from_values(spec: DisorderSpec, half_length: Site, values: Vec<f64>) -> Result<Self> {
        if values.len() != (2 * half_length + 1) as usize {
            return param(format!(
                "{} field values for {} sites",
                values.len(),
                2 * half_length + 1
            ));
        }
        let wmax = spec.omega_max();
        if values.iter().any(|v| !(*v >= 0.0 && *v <= wmax)) {
            return param(format!("field values must lie in [0, {wmax}]"));
        }
        Ok(DisorderRealization {
            spec,
            seed: SeedToken::new(0, 0),
            half_length,
            values,
        })
    }

    pub fn zero(half_length: Site) -> Self {
        Self::from_values(
            DisorderSpec::default(),
            half_length,
            vec![0.0; (2 * half_length + 1) as usize],
        )
        .expect("zero field is admissible")
    }

    pub fn at(&self, site: Site) -> f64 {
        self.values[(site + self.half_length) as usize]
    }

    /// Copy with the field at `site` replaced.
    pub fn with_value(&self, site: Site, value: f64) -> Self {
        let mut out = self.clone();
        out.values[(site + self.half_length) as usize] = value;
        out
    }

    /// `V(x) = sum_j omega_{x_j}`.
    pub fn potential(&self, sites: &[Site]) -> f64 {
        sites.iter().map(|&s| self.at(s)).sum()
    }
}

/// Draws `omega` for seed `seed` on stream 0.
pub fn sample_disorder(spec: &DisorderSpec, half_length: Site, seed: u64) -> Result<DisorderRealization> {
    DisorderRealization::sample(spec, half_length, SeedToken::new(seed, 0))
}
