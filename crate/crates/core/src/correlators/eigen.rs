use std::ops::{Add, Range, Sub};

use ndarray::{Array2, ArrayView1};
use num_complex::Complex;
use num_traits::Zero;

use super::observable::LocalObservable;
use crate::config_space::Site;
use crate::error::{param, Error, Result};
use crate::linalg::dense;
use crate::operators::SpinOperator;
use crate::scalar::Real;
use crate::spectral::{diagonalize_full, Interval, SpectralData};

type C<T> = Complex<T>;

/// Complete eigenbasis of the spin Hamiltonian on `[-L, L]`, used to express
/// observables as matrices `X~_ab = <psi_a, X psi_b>`.
#[derive(Clone, Debug)]
pub struct EigenBasis<T> {
    pub data: SpectralData<T>,
    pub half_length: Site,
    vc: Array2<C<T>>,
}

impl<T: Real> EigenBasis<T> {
    pub fn new(data: SpectralData<T>, half_length: Site) -> Result<Self> {
        let n = 1usize << (2 * half_length + 1);
        if data.dim() != n || data.len() != n {
            return param("eigenbasis must be complete on the full chain");
        }
        let vc = dense::complexify(&data.vectors);
        Ok(EigenBasis {
            data,
            half_length,
            vc,
        })
    }

    pub fn from_spin(op: &SpinOperator<T>) -> Result<Self> {
        Self::new(diagonalize_full(&op.matrix)?, op.params.half_length)
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    /// `V^T X V`.
    pub fn transform(&self, full: &Array2<C<T>>) -> Array2<C<T>> {
        self.vc.t().dot(&full.dot(&self.vc))
    }

    /// `V X~ V^T`.
    pub fn reconstruct(&self, tilde: &Array2<C<T>>) -> Array2<C<T>> {
        self.vc.dot(&tilde.dot(&self.vc.t()))
    }

    pub fn observable(&self, x: &LocalObservable<T>) -> Result<Array2<C<T>>> {
        Ok(self.transform(&x.promote(self.half_length)?))
    }

    /// Membership of each eigenvalue in `f`, clusters kept whole.
    pub fn members(&self, f: &Interval) -> Vec<bool> {
        let mut m = vec![false; self.data.len()];
        for c in self.data.clusters_in(f) {
            for a in c {
                m[a] = true;
            }
        }
        m
    }

    /// Eigenvalues of `H_I = P_I H`: `E_a` inside the window, zero outside.
    pub fn restricted_energies(&self, window: &Interval) -> Vec<f64> {
        let m = self.members(window);
        self.data
            .values
            .iter()
            .zip(m)
            .map(|(&e, inside)| if inside { e.f64() } else { 0.0 })
            .collect()
    }

    /// `||P psi_a||` for the diagonal projection `P` given by `mask`.
    pub fn masked_norm(&self, a: usize, mask: &[bool]) -> T {
        self.data
            .vector(a)
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(&v, _)| v * v)
            .sum::<T>()
            .sqrt()
    }
}

fn normalization_tol<T: Real>() -> f64 {
    (1e3 * T::eps_f64()).max(1e-10)
}

/// `|<psi, X Y psi> - <psi, X psi><psi, Y psi>|` for full-chain matrices.
pub fn state_correlator<T: Real>(
    x: &Array2<C<T>>,
    y: &Array2<C<T>>,
    psi: ArrayView1<'_, T>,
) -> Result<T> {
    let norm = psi.iter().map(|&v| v * v).sum::<T>().sqrt();
    if (norm.f64() - 1.0).abs() > normalization_tol::<T>() {
        return param(format!("state is not normalized (norm {norm})"));
    }
    let p = psi.mapv(|v| C::new(v, T::zero()));
    let yp = y.dot(&p);
    let xp_adj = x.t().mapv(|z| z.conj()).dot(&p);
    let xy = xp_adj.iter().zip(yp.iter()).fold(C::<T>::zero(), |s, (a, b)| s + a.conj() * b);
    let ex = p.iter().zip(x.dot(&p).iter()).fold(C::<T>::zero(), |s, (a, b)| s + a.conj() * b);
    let ey = p.iter().zip(yp.iter()).fold(C::<T>::zero(), |s, (a, b)| s + a.conj() * b);
    Ok((xy - ex * ey).norm())
}

/// `|tr(P_F X P_F^c Y P_F)|` from eigenbasis matrices and the membership of
/// each eigenvalue in `F`.
pub fn set_correlator_masked<T: Real>(xt: &Array2<C<T>>, yt: &Array2<C<T>>, in_f: &[bool]) -> T {
    let mut s = C::zero();
    for (a, &fa) in in_f.iter().enumerate() {
        if !fa {
            continue;
        }
        for (b, &fb) in in_f.iter().enumerate() {
            if !fb {
                s += xt[(a, b)] * yt[(b, a)];
            }
        }
    }
    s.norm()
}

pub fn set_correlator<T: Real>(
    basis: &EigenBasis<T>,
    xt: &Array2<C<T>>,
    yt: &Array2<C<T>>,
    f: &Interval,
) -> T {
    set_correlator_masked(xt, yt, &basis.members(f))
}

/// Supremum over interval partitions and an achieving partition, given as
/// ranges of eigenvalue indices.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionSup<T> {
    pub value: T,
    pub groups: Vec<Range<usize>>,
    /// Whether `value` is the exact maximum.
    pub exact: bool,
}

/// Prefix sums giving `sum_{a in G} row_a - sum_{a,b in G} pair_ab` for any
/// contiguous group `G` of window indices in O(1).
struct GroupSums<V> {
    offset: usize,
    rows: Vec<V>,
    pairs: Array2<V>,
}

impl<V: Copy + Zero + Add<Output = V> + Sub<Output = V>> GroupSums<V> {
    fn new(span: Range<usize>, row: impl Fn(usize) -> V, pair: impl Fn(usize, usize) -> V) -> Self {
        let m = span.len();
        let mut rows = vec![V::zero(); m + 1];
        let mut pairs = Array2::from_elem((m + 1, m + 1), V::zero());
        for u in 0..m {
            rows[u + 1] = rows[u] + row(span.start + u);
            for v in 0..m {
                pairs[(u + 1, v + 1)] = pairs[(u, v + 1)] + pairs[(u + 1, v)] - pairs[(u, v)]
                    + pair(span.start + u, span.start + v);
            }
        }
        GroupSums {
            offset: span.start,
            rows,
            pairs,
        }
    }

    fn value(&self, g: &Range<usize>) -> V {
        let (lo, hi) = (g.start - self.offset, g.end - self.offset);
        let inner = self.pairs[(hi, hi)] - self.pairs[(lo, hi)] - self.pairs[(hi, lo)] + self.pairs[(lo, lo)];
        self.rows[hi] - self.rows[lo] - inner
    }
}

/// Maximizes `sum_G weight(G)` over groupings of consecutive units.
fn best_grouping<T: Real>(units: &[Range<usize>], weight: impl Fn(&Range<usize>) -> T) -> (T, Vec<Range<usize>>) {
    let k = units.len();
    let mut best = vec![T::zero(); k + 1];
    let mut from = vec![0usize; k + 1];
    for v in 1..=k {
        let mut top = T::neg_infinity();
        for u in 0..v {
            let w = best[u] + weight(&(units[u].start..units[v - 1].end));
            if w > top {
                top = w;
                from[v] = u;
            }
        }
        best[v] = top;
    }
    let mut groups = Vec::new();
    let mut v = k;
    while v > 0 {
        let u = from[v];
        groups.push(units[u].start..units[v - 1].end);
        v = u;
    }
    groups.reverse();
    (best[k], groups)
}

fn window_units<T: Real>(basis: &EigenBasis<T>, window: &Interval) -> Vec<Range<usize>> {
    let units = basis.data.clusters_in(window);
    debug_assert!(units.windows(2).all(|w| w[0].end == w[1].start));
    units
}

/// `sup_P sum_{F in P} R_{X,Y}(F)` over partitions of the window into
/// intervals. Partitions act through contiguous groupings of the ordered
/// eigenvalue clusters in the window; the maximum over groupings is found
/// exactly by dynamic programming.
pub fn partition_sup<T: Real>(
    basis: &EigenBasis<T>,
    xt: &Array2<C<T>>,
    yt: &Array2<C<T>>,
    window: &Interval,
) -> PartitionSup<T> {
    let units = window_units(basis, window);
    if units.is_empty() {
        return PartitionSup {
            value: T::zero(),
            groups: Vec::new(),
            exact: true,
        };
    }
    let n = basis.dim();
    let span = units[0].start..units[units.len() - 1].end;
    let sums = GroupSums::new(
        span,
        |a| (0..n).fold(C::zero(), |s, b| s + xt[(a, b)] * yt[(b, a)]),
        |a, b| xt[(a, b)] * yt[(b, a)],
    );
    let (value, groups) = best_grouping(&units, |g| sums.value(g).norm());
    PartitionSup {
        value,
        groups,
        exact: true,
    }
}

/// Partition supremum of `sum_{a in F, b notin F} |X~_ab| |Y~_ba|`, which
/// bounds `R_{tau_t(X),Y}` for every `t`.
pub fn certified_partition_bound<T: Real>(
    basis: &EigenBasis<T>,
    xt: &Array2<C<T>>,
    yt: &Array2<C<T>>,
    window: &Interval,
) -> T {
    let units = window_units(basis, window);
    if units.is_empty() {
        return T::zero();
    }
    let n = basis.dim();
    let span = units[0].start..units[units.len() - 1].end;
    let sums = GroupSums::new(
        span,
        |a| (0..n).map(|b| xt[(a, b)].norm() * yt[(b, a)].norm()).sum(),
        |a, b| xt[(a, b)].norm() * yt[(b, a)].norm(),
    );
    best_grouping(&units, |g| sums.value(g).max(T::zero())).0
}

/// `tau_t^I` applied in the eigenbasis.
pub fn evolve_tilde<T: Real>(
    basis: &EigenBasis<T>,
    xt: &Array2<C<T>>,
    window: &Interval,
    t: f64,
) -> Array2<C<T>> {
    let h = basis.restricted_energies(window);
    Array2::from_shape_fn(xt.dim(), |(a, b)| {
        let phase = t * (h[a] - h[b]);
        xt[(a, b)] * C::new(T::of(phase.cos()), T::of(phase.sin()))
    })
}

/// `tau_t^I(X) = exp(i t H_I) X exp(-i t H_I)` on the full chain.
pub fn restricted_evolution<T: Real>(
    basis: &EigenBasis<T>,
    x: &Array2<C<T>>,
    window: &Interval,
    t: f64,
) -> Array2<C<T>> {
    basis.reconstruct(&evolve_tilde(basis, &basis.transform(x), window, t))
}

/// 64 points over the slowest in-window quasi-period followed by 16
/// logarithmically spaced long times.
pub fn default_time_grid<T: Real>(basis: &EigenBasis<T>, window: &Interval) -> Vec<f64> {
    let means: Vec<f64> = window_units(basis, window)
        .iter()
        .map(|c| basis.data.cluster_mean(c))
        .collect();
    let g_min = means
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let period = if g_min.is_finite() && g_min > 0.0 {
        2.0 * std::f64::consts::PI / g_min
    } else {
        2.0 * std::f64::consts::PI
    };
    let mut grid: Vec<f64> = (0..64).map(|k| period * k as f64 / 63.0).collect();
    grid.extend((1..=16).map(|k| period * 10f64.powf(4.0 * k as f64 / 16.0)));
    grid
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicalSup<T> {
    /// Largest value over the grid; a lower bound for the supremum over time.
    pub grid_max: T,
    pub argmax: f64,
    /// Upper bound valid for every time.
    pub certified: T,
}

pub fn dynamical_sup<T: Real>(
    basis: &EigenBasis<T>,
    xt: &Array2<C<T>>,
    yt: &Array2<C<T>>,
    window: &Interval,
    grid: &[f64],
) -> Result<DynamicalSup<T>> {
    if grid.is_empty() || grid.iter().any(|t| !t.is_finite()) {
        return param("time grid must be finite and nonempty");
    }
    let mut grid_max = T::zero();
    let mut argmax = grid[0];
    for &t in grid {
        let v = partition_sup(basis, &evolve_tilde(basis, xt, window, t), yt, window).value;
        if v > grid_max {
            grid_max = v;
            argmax = t;
        }
    }
    Ok(DynamicalSup {
        grid_max,
        argmax,
        certified: certified_partition_bound(basis, xt, yt, window),
    })
}

fn require_disjoint<T: Real>(x: &LocalObservable<T>, y: &LocalObservable<T>) -> Result<()> {
    if x.overlaps(y) {
        return Err(Error::Parameter("observable supports overlap".into()));
    }
    Ok(())
}

/// Values of `R_{tau(X^{+,-}),Y^{+,-}}(F)` and `R_{tau(X^{-,+}),Y^{-,+}}(F)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VanishingReport {
    pub plus_minus: f64,
    pub minus_plus: f64,
}

impl VanishingReport {
    pub const TOLERANCE: f64 = 1e-10;

    pub fn holds(&self) -> bool {
        self.plus_minus <= Self::TOLERANCE && self.minus_plus <= Self::TOLERANCE
    }
}

pub fn vanishing_identities_check<T: Real>(
    basis: &EigenBasis<T>,
    x: &LocalObservable<T>,
    y: &LocalObservable<T>,
    window: &Interval,
    f: &Interval,
    t: f64,
) -> Result<VanishingReport> {
    use super::blocks::{block_decompose, Sign};
    require_disjoint(x, y)?;
    let (bx, by) = (block_decompose(x)?, block_decompose(y)?);
    let in_f = basis.members(f);
    let value = |a: Sign, b: Sign| -> Result<f64> {
        let xt = evolve_tilde(basis, &basis.observable(&bx.block(a, b))?, window, t);
        let yt = basis.observable(&by.block(a, b))?;
        Ok(set_correlator_masked(&xt, &yt, &in_f).f64())
    };
    Ok(VanishingReport {
        plus_minus: value(Sign::Plus, Sign::Minus)?,
        minus_plus: value(Sign::Minus, Sign::Plus)?,
    })
}

/// Dynamical correlator against the particle-content envelope
/// `64 ||X|| ||Y|| sum_E ||P_-^X psi_E|| ||P_-^Y psi_E||`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeReport {
    pub grid_max: f64,
    pub certified: f64,
    pub envelope: f64,
}

impl EnvelopeReport {
    pub const CONSTANT: f64 = 64.0;

    pub fn holds(&self) -> bool {
        self.grid_max <= self.envelope
    }
}

pub fn envelope_check<T: Real>(
    basis: &EigenBasis<T>,
    x: &LocalObservable<T>,
    y: &LocalObservable<T>,
    window: &Interval,
    grid: &[f64],
) -> Result<EnvelopeReport> {
    require_disjoint(x, y)?;
    let (xt, yt) = (basis.observable(x)?, basis.observable(y)?);
    let dynamics = dynamical_sup(basis, &xt, &yt, window, grid)?;
    let (mx, my) = (x.p_minus_mask(basis.half_length), y.p_minus_mask(basis.half_length));
    let weight: f64 = basis
        .members(window)
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(a, _)| (basis.masked_norm(a, &mx) * basis.masked_norm(a, &my)).f64())
        .sum();
    Ok(EnvelopeReport {
        grid_max: dynamics.grid_max.f64(),
        certified: dynamics.certified.f64(),
        envelope: EnvelopeReport::CONSTANT * x.norm()?.f64() * y.norm()?.f64() * weight,
    })
}
