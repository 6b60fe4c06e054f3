//! Ordered particle configurations on the chain `[-L, L]` and the geometry
//! of the configuration graph.
//!
//! A configuration is a strictly increasing tuple of occupied sites. Two
//! configurations are adjacent when they differ by moving one particle by one
//! site. Configurations of a finite volume are enumerated in lexicographic
//! order and indexed through the combinatorial number system, so ranking and
//! unranking need no hash map.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Lattice site index.
pub type Site = i32;

/// Largest configuration space the crate will enumerate.
pub const MAX_SPACE_DIM: u64 = 1_000_000;

/// Sentinel returned by set distances when one of the sets is empty.
pub const INFINITE_DISTANCE: u64 = u64::MAX;

/// An ordered tuple of occupied sites `x_1 < x_2 < ... < x_N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Site>", into = "Vec<Site>")]
pub struct Config(Vec<Site>);

impl TryFrom<Vec<Site>> for Config {
    type Error = Error;
    fn try_from(sites: Vec<Site>) -> Result<Self> {
        Config::new(sites)
    }
}

impl From<Config> for Vec<Site> {
    fn from(c: Config) -> Self {
        c.0
    }
}

impl Config {
    pub fn new(sites: Vec<Site>) -> Result<Self> {
        if sites.is_empty() {
            return param("a configuration needs at least one particle");
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return param(format!("sites {sites:?} are not strictly increasing"));
        }
        Ok(Config(sites))
    }

    /// The fully packed configuration `(first, first+1, ..., first+n-1)`.
    pub fn packed(first: Site, n: usize) -> Self {
        assert!(n >= 1);
        Config((0..n as Site).map(|k| first + k).collect())
    }

    pub fn sites(&self) -> &[Site] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Site {
        self.0[0]
    }

    pub fn last(&self) -> Site {
        self.0[self.0.len() - 1]
    }

    /// Number of maximal blocks of consecutive occupied sites.
    pub fn cluster_count(&self) -> usize {
        cluster_count(&self.0)
    }

    /// Whether the configuration is a single cluster.
    pub fn is_edge(&self) -> bool {
        self.cluster_count() == 1
    }

    pub fn contains_site(&self, site: Site) -> bool {
        self.0.binary_search(&site).is_ok()
    }

    /// Translate every particle by `k`.
    pub fn shifted(&self, k: Site) -> Config {
        Config(self.0.iter().map(|s| s + k).collect())
    }

    pub fn within(&self, volume: Volume) -> bool {
        match volume {
            Volume::Unbounded => true,
            Volume::Finite(l) => self.first() >= -l && self.last() <= l,
        }
    }

    /// All configurations at 1-distance one, truncated to the volume.
    pub fn neighbors(&self, volume: Volume) -> Vec<Config> {
        let mut out = Vec::with_capacity(2 * self.len());
        for_each_neighbor(&self.0, volume, |y| out.push(Config(y.to_vec())));
        out
    }
}

impl std::fmt::Display for Config {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// `W(x) = 1 + #{j : x_{j+1} != x_j + 1}`.
pub fn cluster_count(sites: &[Site]) -> usize {
    1 + sites.windows(2).filter(|w| w[1] != w[0] + 1).count()
}

/// Finite chain `[-L, L]` or the whole lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Volume {
    Finite(Site),
    Unbounded,
}

/// Calls `f` on every neighbor of `sites` (one particle moved by one site).
pub fn for_each_neighbor(sites: &[Site], volume: Volume, mut f: impl FnMut(&[Site])) {
    let n = sites.len();
    let mut buf = sites.to_vec();
    for j in 0..n {
        let x = sites[j];
        let left_free = if j == 0 {
            match volume {
                Volume::Finite(l) => x > -l,
                Volume::Unbounded => true,
            }
        } else {
            sites[j - 1] < x - 1
        };
        if left_free {
            buf[j] = x - 1;
            f(&buf);
            buf[j] = x;
        }
        let right_free = if j + 1 == n {
            match volume {
                Volume::Finite(l) => x < l,
                Volume::Unbounded => true,
            }
        } else {
            sites[j + 1] > x + 1
        };
        if right_free {
            buf[j] = x + 1;
            f(&buf);
            buf[j] = x;
        }
    }
}

/// Distance on configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    /// `sum_i |x_i - y_i|`, the graph distance.
    One,
    /// `max_i |x_i - y_i|`.
    Infinity,
}

pub fn distance(x: &Config, y: &Config, metric: Metric) -> Result<u64> {
    if x.len() != y.len() {
        return param(format!(
            "distance between configurations with {} and {} particles",
            x.len(),
            y.len()
        ));
    }
    Ok(raw_distance(x.sites(), y.sites(), metric))
}

pub(crate) fn raw_distance(x: &[Site], y: &[Site], metric: Metric) -> u64 {
    let it = x.iter().zip(y).map(|(a, b)| (a - b).unsigned_abs() as u64);
    match metric {
        Metric::One => it.sum(),
        Metric::Infinity => it.max().unwrap_or(0),
    }
}

/// Minimum pairwise distance between two sets; [`INFINITE_DISTANCE`] if
/// either is empty.
pub fn set_distance(a: &[Config], b: &[Config], metric: Metric) -> Result<u64> {
    let mut best = INFINITE_DISTANCE;
    for x in a {
        for y in b {
            best = best.min(distance(x, y, metric)?);
        }
    }
    Ok(best)
}

/// Table of binomial coefficients `C(m, k)` for `m <= n`, `k <= kmax`,
/// saturating at `u64::MAX`.
#[derive(Clone, Debug)]
struct Binomials {
    kmax: usize,
    table: Vec<u64>,
}

impl Binomials {
    fn new(n: usize, kmax: usize) -> Self {
        let w = kmax + 1;
        let mut table = vec![0u64; (n + 1) * w];
        for m in 0..=n {
            table[m * w] = 1;
            for k in 1..=kmax.min(m) {
                let a = table[(m - 1) * w + k - 1];
                let b = if k <= m - 1 { table[(m - 1) * w + k] } else { 0 };
                table[m * w + k] = a.saturating_add(b);
            }
        }
        Binomials { kmax, table }
    }

    fn get(&self, m: i64, k: usize) -> u64 {
        if m < 0 || k > self.kmax {
            return 0;
        }
        let m = m as usize;
        if k > m {
            return 0;
        }
        self.table[m * (self.kmax + 1) + k]
    }
}

/// Binomial coefficient `C(n, k)` in `u128`; used for capacity checks.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All `N`-particle configurations in `[-L, L]`, lexicographically indexed.
#[derive(Clone, Debug)]
pub struct ConfigSpace {
    n_particles: usize,
    half_length: Site,
    dim: usize,
    binom: Binomials,
}

impl ConfigSpace {
    /// Enumerates `X_N^(L)`. Fails for `N` outside `1..=2L+1` or when the
    /// dimension exceeds [`MAX_SPACE_DIM`].
    pub fn new(n_particles: usize, half_length: Site) -> Result<Self> {
        if half_length < 0 {
            return param(format!("half-length {half_length} is negative"));
        }
        let sites = (2 * half_length + 1) as usize;
        if n_particles < 1 || n_particles > sites {
            return param(format!(
                "particle number {n_particles} outside 1..={sites} for L = {half_length}"
            ));
        }
        let dim = binomial(sites as u64, n_particles as u64);
        if dim > MAX_SPACE_DIM as u128 {
            return Err(Error::Capacity {
                dim: dim.min(u64::MAX as u128) as u64,
                limit: MAX_SPACE_DIM,
            });
        }
        Ok(ConfigSpace {
            n_particles,
            half_length,
            dim: dim as usize,
            binom: Binomials::new(sites, n_particles),
        })
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn half_length(&self) -> Site {
        self.half_length
    }

    pub fn volume(&self) -> Volume {
        Volume::Finite(self.half_length)
    }

    pub fn n_sites(&self) -> usize {
        (2 * self.half_length + 1) as usize
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lexicographic rank of `sites`, or `None` if it is not a valid
    /// configuration of this space.
    pub fn index_of(&self, sites: &[Site]) -> Option<usize> {
        let n = self.n_sites() as i64;
        let np = self.n_particles;
        if sites.len() != np {
            return None;
        }
        let l = self.half_length as i64;
        let mut rank: u64 = 0;
        let mut prev: i64 = -1;
        for (i, &s) in sites.iter().enumerate() {
            let a = s as i64 + l;
            if a <= prev || a >= n {
                return None;
            }
            let k = np - 1 - i;
            rank += self.binom.get(n - 1 - prev, k + 1) - self.binom.get(n - a, k + 1);
            prev = a;
        }
        Some(rank as usize)
    }

    pub fn index(&self, x: &Config) -> Option<usize> {
        self.index_of(x.sites())
    }

    /// Writes the configuration with rank `idx` into `out`.
    pub fn unrank_into(&self, idx: usize, out: &mut Vec<Site>) {
        assert!(idx < self.dim, "index {idx} out of range {}", self.dim);
        out.clear();
        let n = self.n_sites() as i64;
        let np = self.n_particles;
        let mut r = idx as u64;
        let mut v: i64 = 0;
        for i in 0..np {
            let k = np - 1 - i;
            loop {
                let count = self.binom.get(n - 1 - v, k);
                if r < count {
                    break;
                }
                r -= count;
                v += 1;
            }
            out.push((v - self.half_length as i64) as Site);
            v += 1;
        }
    }

    pub fn config(&self, idx: usize) -> Config {
        let mut v = Vec::with_capacity(self.n_particles);
        self.unrank_into(idx, &mut v);
        Config(v)
    }

    /// Iterates over all configurations in index order.
    pub fn iter(&self) -> impl Iterator<Item = Config> + '_ {
        let mut cur: Vec<Site> = (0..self.n_particles as Site)
            .map(|k| k - self.half_length)
            .collect();
        let l = self.half_length;
        let np = self.n_particles;
        let mut remaining = self.dim;
        std::iter::from_fn(move || {
            if remaining == 0 {
                return None;
            }
            remaining -= 1;
            let out = Config(cur.clone());
            // advance to the lexicographic successor
            if remaining > 0 {
                let mut j = np - 1;
                while cur[j] == l - (np - 1 - j) as Site {
                    j -= 1;
                }
                cur[j] += 1;
                for t in j + 1..np {
                    cur[t] = cur[t - 1] + 1;
                }
            }
            Some(out)
        })
    }

    /// Number of neighbors of `x` inside the volume.
    pub fn degree(&self, x: &[Site]) -> usize {
        let mut d = 0;
        for_each_neighbor(x, self.volume(), |_| d += 1);
        d
    }

    /// Indices of neighbors of configuration `idx`, in increasing order.
    pub fn neighbor_indices(&self, idx: usize) -> Vec<usize> {
        let x = self.config(idx);
        let mut out = Vec::with_capacity(2 * self.n_particles);
        for_each_neighbor(x.sites(), self.volume(), |y| {
            out.push(self.index_of(y).expect("neighbor inside volume"))
        });
        out.sort_unstable();
        out
    }

    /// Index of the packed configuration starting at `first`, if inside.
    pub fn edge_index(&self, first: Site) -> Option<usize> {
        let last = first + self.n_particles as Site - 1;
        if first < -self.half_length || last > self.half_length {
            return None;
        }
        self.index(&Config::packed(first, self.n_particles))
    }

    /// `X_{N,k}` and its complement, the bulk beyond `k` clusters.
    pub fn stratum(&self, k: usize) -> EdgeStratum {
        let mut members = Vec::new();
        let mut complement = Vec::new();
        for (i, x) in self.iter().enumerate() {
            if x.cluster_count() <= k {
                members.push(i);
            } else {
                complement.push(i);
            }
        }
        EdgeStratum {
            k,
            members,
            complement,
        }
    }

    /// `S_Psi`: configurations with at least one particle in `psi`.
    pub fn support_set(&self, psi: &[Site]) -> Vec<usize> {
        let mut sorted = psi.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        self.iter()
            .enumerate()
            .filter(|(_, x)| x.sites().iter().any(|s| sorted.binary_search(s).is_ok()))
            .map(|(i, _)| i)
            .collect()
    }

    /// Edge box `Lambda_M(x)` and its support strip `S_M(x)` around the
    /// packed configuration `center`.
    pub fn edge_box(&self, center: &Config, half_width: usize) -> Result<EdgeBox> {
        if !center.is_edge() || center.len() != self.n_particles {
            return param(format!("box center {center} is not an edge configuration"));
        }
        let m = half_width as Site;
        let x1 = center.first();
        let lambda_set = (x1 - m..=x1 + m)
            .filter_map(|y1| self.edge_index(y1))
            .collect();
        let window: Vec<Site> = (x1 - m..=x1 + m).collect();
        let support_set = self.support_set(&window);
        Ok(EdgeBox {
            center: center.clone(),
            half_width,
            lambda_set,
            support_set,
        })
    }
}

/// `X_{N,k}` (at most `k` clusters) and the bulk `X_N \ X_{N,k}`, as sorted
/// index lists.
#[derive(Clone, Debug)]
pub struct EdgeStratum {
    pub k: usize,
    pub members: Vec<usize>,
    pub complement: Vec<usize>,
}

/// Box `Lambda_M(x)` along the edge together with the strip set `S_M(x)`.
#[derive(Clone, Debug)]
pub struct EdgeBox {
    pub center: Config,
    pub half_width: usize,
    /// Edge configurations with first coordinate within `M` of the center.
    pub lambda_set: Vec<usize>,
    /// Configurations with a particle in `{x_1 - M, ..., x_1 + M}`.
    pub support_set: Vec<usize>,
}

impl EdgeBox {
    /// The sites `{x_1 - M, ..., x_1 + M}`.
    pub fn window(&self) -> std::ops::RangeInclusive<Site> {
        let m = self.half_width as Site;
        self.center.first() - m..=self.center.first() + m
    }
}

/// `M(i, j) = floor(|i - j| / 4)`.
pub fn box_half_width(i: Site, j: Site) -> usize {
    ((i - j).unsigned_abs() / 4) as usize
}
