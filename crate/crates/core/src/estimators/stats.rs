use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};

/// Streaming mean and variance (Welford).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningStats {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Combines two accumulators (Chan et al.).
    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let n = self.count + other.count;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.count as f64 / n as f64;
        let m2 = self.m2 + other.m2 + d * d * (self.count as f64 * other.count as f64) / n as f64;
        RunningStats { count: n, mean, m2 }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return f64::INFINITY;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = RunningStats::default();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// One-sided Wilson score upper bound for a binomial proportion.
pub fn wilson_upper(hits: u64, trials: u64, confidence: f64) -> Result<f64> {
    if trials == 0 || hits > trials || !(0.5..1.0).contains(&confidence) {
        return Err(Error::Parameter(format!(
            "Wilson bound needs 0 <= hits <= trials, trials > 0 and confidence in [0.5, 1); got {hits}/{trials} at {confidence}"
        )));
    }
    let z = Normal::standard().inverse_cdf(confidence);
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let center = p + z2 / (2.0 * n);
    let spread = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Ok(((center + spread) / (1.0 + z2 / n)).min(1.0))
}

/// Observed mean at one distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub distance: f64,
    pub mean: f64,
    pub std_error: f64,
}

/// `mean(d) ~ C exp(-m d)` fitted on log means.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub log_c: f64,
    pub rate: f64,
    pub rate_std_error: f64,
    pub confidence: f64,
    pub rate_ci: (f64, f64),
    pub r_squared: f64,
    pub points_used: usize,
    /// Points discarded for a nonpositive mean.
    pub points_dropped: usize,
    pub distance_range: (f64, f64),
}

impl ExpFit {
    /// Whether the confidence interval for the rate excludes zero from above.
    pub fn decays(&self) -> bool {
        self.rate_ci.0 > 0.0
    }

    /// `C exp(-m d)`; only inside the fitted distance range.
    pub fn predict(&self, distance: f64) -> Result<f64> {
        let (lo, hi) = self.distance_range;
        if distance < lo || distance > hi {
            return Err(Error::Fit(format!(
                "distance {distance} outside the fitted range [{lo}, {hi}]"
            )));
        }
        Ok((self.log_c - self.rate * distance).exp())
    }
}

/// Weighted least squares of `log mean` against distance with weights
/// `(mean / stderr)^2`, or ordinary least squares when some standard error
/// vanishes. The interval uses Student's t with `n - 2` degrees of freedom.
pub fn fit_exponential(points: &[FitPoint], confidence: f64) -> Result<ExpFit> {
    let used: Vec<&FitPoint> = points.iter().filter(|p| p.mean > 0.0 && p.mean.is_finite()).collect();
    let dropped = points.len() - used.len();
    if used.len() < 3 {
        return Err(Error::Fit(format!(
            "{} strictly positive means, at least 3 needed",
            used.len()
        )));
    }
    if !(0.0..1.0).contains(&confidence) {
        return Err(Error::Fit(format!("confidence {confidence} outside (0, 1)")));
    }
    let weighted = used.iter().all(|p| p.std_error > 0.0 && p.std_error.is_finite());
    let xs: Vec<f64> = used.iter().map(|p| p.distance).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.mean.ln()).collect();
    let ws: Vec<f64> = used
        .iter()
        .map(|p| if weighted { (p.mean / p.std_error).powi(2) } else { 1.0 })
        .collect();
    let sw: f64 = ws.iter().sum();
    let xm = xs.iter().zip(&ws).map(|(x, w)| x * w).sum::<f64>() / sw;
    let ym = ys.iter().zip(&ws).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(&ws).map(|(x, w)| w * (x - xm).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("all distances coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).zip(&ws).map(|((x, y), w)| w * (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .zip(&ws)
        .map(|((x, y), w)| w * (y - intercept - slope * x).powi(2))
        .sum();
    let tss: f64 = ys.iter().zip(&ws).map(|(y, w)| w * (y - ym).powi(2)).sum();
    let dof = (used.len() - 2) as f64;
    let se = (rss / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::Fit(e.to_string()))?
        .inverse_cdf(0.5 + confidence / 2.0);
    let rate = -slope;
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ExpFit {
        log_c: intercept,
        rate,
        rate_std_error: se,
        confidence,
        rate_ci: (rate - t * se, rate + t * se),
        r_squared: if tss > 0.0 { 1.0 - rss / tss } else { 1.0 },
        points_used: used.len(),
        points_dropped: dropped,
        distance_range: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal as Gauss};

    fn exact(d: f64) -> f64 {
        5.0 * (-0.7 * d).exp()
    }

    #[test]
    fn recovers_exact_exponential() {
        let pts: Vec<FitPoint> = (1..=8)
            .map(|d| FitPoint { distance: d as f64, mean: exact(d as f64), std_error: 0.0 })
            .collect();
        let f = fit_exponential(&pts, 0.95).unwrap();
        assert!((f.rate - 0.7).abs() < 1e-10);
        assert!((f.log_c - 5f64.ln()).abs() < 1e-10);
        assert!(f.decays());
        assert!(f.predict(20.0).is_err());
    }

    #[test]
    fn tolerates_multiplicative_noise() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let noise = Gauss::new(0.0, 0.05).unwrap();
        let pts: Vec<FitPoint> = (1..=12)
            .map(|d| {
                let m = exact(d as f64) * (1.0 + noise.sample(&mut rng));
                FitPoint { distance: d as f64, mean: m, std_error: 0.05 * m }
            })
            .collect();
        let f = fit_exponential(&pts, 0.95).unwrap();
        assert!((f.rate - 0.7).abs() < 0.1);
    }

    #[test]
    fn constant_data_does_not_decay() {
        let pts: Vec<FitPoint> = (1..=6)
            .map(|d| FitPoint { distance: d as f64, mean: 0.3, std_error: 0.01 })
            .collect();
        let f = fit_exponential(&pts, 0.95).unwrap();
        assert!(f.rate_ci.0 <= 0.0 && f.rate_ci.1 >= 0.0);
        assert!(!f.decays());
    }

    #[test]
    fn filters_and_refuses() {
        let mut pts: Vec<FitPoint> = (1..=3)
            .map(|d| FitPoint { distance: d as f64, mean: exact(d as f64), std_error: 0.0 })
            .collect();
        pts.push(FitPoint { distance: 4.0, mean: 0.0, std_error: 0.0 });
        assert_eq!(fit_exponential(&pts, 0.95).unwrap().points_dropped, 1);
        assert!(fit_exponential(&pts[..2], 0.95).is_err());
    }

    #[test]
    fn welford_merge_matches_direct() {
        let xs: Vec<f64> = (0..50).map(|k| (k as f64 * 0.37).sin()).collect();
        let all: RunningStats = xs.iter().copied().collect();
        let a: RunningStats = xs[..17].iter().copied().collect();
        let b: RunningStats = xs[17..].iter().copied().collect();
        let m = a.merge(&b);
        let mean = xs.iter().sum::<f64>() / 50.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 49.0;
        assert!((all.mean - mean).abs() < 1e-14 && (all.variance() - var).abs() < 1e-14);
        assert!((m.mean - mean).abs() < 1e-14 && (m.variance() - var).abs() < 1e-14);
    }

    #[test]
    fn wilson_bound_brackets_frequency() {
        let u = wilson_upper(0, 2000, 0.99).unwrap();
        assert!(u > 0.0 && u < 0.003);
        let u = wilson_upper(50, 100, 0.99).unwrap();
        assert!(u > 0.5 && u < 0.7);
        assert!(wilson_upper(3, 2, 0.99).is_err());
    }
}
