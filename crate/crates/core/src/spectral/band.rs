use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return param(format!("interval [{lo}, {hi}] is empty"));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, e: f64) -> bool {
        e >= self.lo && e <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.lo >= self.lo && other.hi <= self.hi
    }

    /// Hausdorff distance between a finite point set and this interval;
    /// infinite when the set is empty.
    pub fn hausdorff_to_points(&self, points: &[f64]) -> f64 {
        if points.is_empty() {
            return f64::INFINITY;
        }
        let mut sorted = points.to_vec();
        sorted.sort_by(f64::total_cmp);
        let out = sorted
            .iter()
            .map(|&p| (self.lo - p).max(p - self.hi).max(0.0))
            .fold(0.0, f64::max);
        // farthest interval point from the set: an endpoint or a gap midpoint
        let nearest = |x: f64| sorted.iter().map(|&p| (p - x).abs()).fold(f64::INFINITY, f64::min);
        let mut cover = nearest(self.lo).max(nearest(self.hi));
        for w in sorted.windows(2) {
            let (a, b) = (w[0].max(self.lo), w[1].min(self.hi));
            if a < b {
                cover = cover.max(nearest(0.5 * (a + b)));
            }
        }
        out.max(cover)
    }
}

/// `delta_N = tanh(rho) [(cosh N rho - 1)/sinh N rho, (cosh N rho + 1)/sinh N rho]`
/// with `cosh rho = Delta`.
pub fn droplet_band(n_particles: usize, anisotropy: f64) -> Result<Interval> {
    if !(anisotropy > 1.0) {
        return param(format!("anisotropy {anisotropy} must exceed 1"));
    }
    if n_particles == 0 {
        return param("droplet band needs at least one particle");
    }
    let rho = anisotropy.acosh();
    let t = rho.tanh();
    // (cosh x -+ 1)/sinh x = (1 -+ e)/(1 +- e) with e = exp(-x)
    let e = (-(n_particles as f64) * rho).exp();
    Ok(Interval {
        lo: t * (1.0 - e) / (1.0 + e),
        hi: t * (1.0 + e) / (1.0 - e),
    })
}

/// `sqrt(1 - 1/Delta^2)`, the common limit of the droplet bands.
pub fn droplet_band_limit(anisotropy: f64) -> f64 {
    (1.0 - 1.0 / (anisotropy * anisotropy)).sqrt()
}

/// `I_{k,delta} = [1 - 1/Delta, (k + 1 - delta)(1 - 1/Delta)]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DropletWindow {
    pub anisotropy: f64,
    pub margin: f64,
    pub k: usize,
}

impl DropletWindow {
    pub fn new(anisotropy: f64, margin: f64, k: usize) -> Result<Self> {
        if !(anisotropy > 1.0) {
            return param(format!("anisotropy {anisotropy} must exceed 1"));
        }
        if !(margin > 0.0 && margin < 1.0) {
            return param(format!("window margin {margin} outside (0, 1)"));
        }
        if k == 0 {
            return param("window index k must be at least 1");
        }
        Ok(DropletWindow { anisotropy, margin, k })
    }

    pub fn first(anisotropy: f64, margin: f64) -> Result<Self> {
        Self::new(anisotropy, margin, 1)
    }

    pub fn interval(&self) -> Interval {
        let g = 1.0 - 1.0 / self.anisotropy;
        Interval {
            lo: g,
            hi: (self.k as f64 + 1.0 - self.margin) * g,
        }
    }

    /// Lower bound `(k + 1)(1 - 1/Delta)` of the operator restricted to
    /// configurations with more than `k` clusters.
    pub fn bulk_floor(&self) -> f64 {
        (self.k as f64 + 1.0) * (1.0 - 1.0 / self.anisotropy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_bands() {
        let b = droplet_band(1, 2.0).unwrap();
        assert!((b.lo - 0.5).abs() < 1e-15 && (b.hi - 1.5).abs() < 1e-14);
        let b = droplet_band(2, 2.0).unwrap();
        assert!((b.lo - 0.75).abs() < 1e-15 && (b.hi - 1.0).abs() < 1e-14);
        let b = droplet_band(3, 3.0).unwrap();
        assert!((b.lo - (1.0 - 1.0 / 15.0)).abs() < 1e-14);
        assert!((b.hi - (1.0 - 1.0 / 21.0)).abs() < 1e-14);
        let b = droplet_band(1000, 2.0).unwrap();
        assert!((b.lo - 0.75f64.sqrt()).abs() < 1e-12 && (b.hi - 0.75f64.sqrt()).abs() < 1e-12);
        assert!(droplet_band(1, 1.0).is_err());
    }

    #[test]
    fn windows() {
        let w = DropletWindow::first(2.0, 0.1).unwrap().interval();
        assert!((w.lo - 0.5).abs() < 1e-15 && (w.hi - 0.95).abs() < 1e-15);
        assert!(DropletWindow::first(2.0, 0.0).is_err());
    }

    #[test]
    fn hausdorff() {
        let i = Interval::new(0.0, 1.0).unwrap();
        assert_eq!(i.hausdorff_to_points(&[0.0, 0.5, 1.0]), 0.25);
        assert_eq!(i.hausdorff_to_points(&[0.5]), 0.5);
        assert!((i.hausdorff_to_points(&[-0.3, 0.0, 1.0]) - 0.5).abs() < 1e-15);
        assert_eq!(i.hausdorff_to_points(&[]), f64::INFINITY);
    }
}
