use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use xxz_core::config_space::{Config, Site};
use xxz_core::correlators::{
    block_decompose, sector_correlator, spin_number_correlator, sum_identity_check, vanishing_identities_check,
    CorrelatorKind, CorrelatorRecord, EigenBasis, LocalObservable,
};
use xxz_core::estimators::{
    ct_sweep, eigencorrelator_decay, fit_exponential, fractional_moment_scan, site_pair, wegner_empirical,
    CTSweepConfig, DecayRecord, ExpFit, FitPoint, WegnerParameters,
};
use xxz_core::operators::{
    build_sector_hamiltonian, build_spin_hamiltonian, DisorderRealization, ModelParams, SeedToken, MAX_SPIN_SITES,
};
use xxz_core::spectral::{diagonalize_full, diagonalize_window, droplet_band, DropletWindow, Interval, MAX_DENSE_DIM};

use crate::config::{EnsembleKind, RunConfig};
use crate::error::{io_err, HarnessError, Result};
use crate::manifest::RunManifest;
use crate::persist::{
    decay_rows, load, persist, write_json, BandRow, CorrelatorRow, DecayRow, Format, OperatorRow, Table,
};

/// Resolved inputs shared by all subcommands.
#[derive(Clone, Debug)]
pub struct Context {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub format: Format,
    pub arguments: Vec<String>,
}

impl Context {
    pub fn seed(&self) -> u64 {
        self.config.ensemble.master_seed
    }

    fn params(&self) -> Result<ModelParams> {
        self.config.model.params()
    }

    fn realization(&self, stream: u64) -> Result<DisorderRealization> {
        let p = self.params()?;
        Ok(DisorderRealization::sample(
            &self.config.model.field,
            p.half_length,
            SeedToken::new(self.seed(), stream),
        )?)
    }

    fn window(&self) -> Result<Interval> {
        let p = self.params()?;
        Ok(DropletWindow::first(p.anisotropy, p.window_margin)?.interval())
    }

    fn manifest(&self, experiment: &str) -> RunManifest {
        RunManifest::start(experiment, self.arguments.clone(), self.config.clone(), self.seed(), self.format)
    }
}

/// Files written by a command and whether its checks passed.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub outputs: Vec<PathBuf>,
    pub passed: bool,
}

struct Writer<'a> {
    ctx: &'a Context,
    outputs: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(ctx: &'a Context) -> Result<Self> {
        std::fs::create_dir_all(&ctx.out_dir).map_err(io_err(&ctx.out_dir))?;
        Ok(Writer {
            ctx,
            outputs: Vec::new(),
        })
    }

    fn table<T: Table>(&mut self, stem: &str, rows: &[T]) -> Result<()> {
        let name = format!("{stem}.{}", self.ctx.format.extension());
        persist(rows, &self.ctx.out_dir.join(&name), self.ctx.format)?;
        self.outputs.push(name.into());
        Ok(())
    }

    fn json<T: Serialize + ?Sized>(&mut self, stem: &str, value: &T) -> Result<()> {
        let name = format!("{stem}.json");
        write_json(value, &self.ctx.out_dir.join(&name))?;
        self.outputs.push(name.into());
        Ok(())
    }

    fn finish(self, mut manifest: RunManifest, passed: bool) -> Result<Report> {
        manifest.outputs = self.outputs.clone();
        manifest.finish(&self.ctx.out_dir)?;
        Ok(Report {
            outputs: self.outputs,
            passed,
        })
    }
}

pub fn build(ctx: &Context, n_list: &[usize], stream: u64) -> Result<Report> {
    let params = ctx.params()?;
    let w = ctx.realization(stream)?;
    let mut rows = Vec::new();
    println!("{:>3} {:>4} {:>10} {:>12} {:>6} {:>8} {:>12} {:>12}", "N", "L", "dim", "nnz", "row", "edge", "gersh_lo", "row_sum");
    for &n in n_list {
        let op = build_sector_hamiltonian::<f64>(n, &params, &w)?;
        let row = OperatorRow {
            n_particles: n,
            half_length: params.half_length,
            dim: op.dim(),
            nnz: op.matrix.nnz(),
            max_row_len: op.max_row_len(),
            edge_dim: op.edge_rows().len(),
            gershgorin_lower: op.matrix.gershgorin_lower(),
            max_row_sum: op.matrix.max_row_sum(),
        };
        println!(
            "{:>3} {:>4} {:>10} {:>12} {:>6} {:>8} {:>12.6} {:>12.6}",
            row.n_particles, row.half_length, row.dim, row.nnz, row.max_row_len, row.edge_dim, row.gershgorin_lower, row.max_row_sum
        );
        rows.push(row);
    }
    let mut out = Writer::new(ctx)?;
    out.table("operators", &rows)?;
    out.json("disorder", &w)?;
    out.finish(ctx.manifest("build"), true)
}

pub fn spectrum(ctx: &Context, n: usize, stream: u64, window_only: bool) -> Result<Report> {
    let params = ctx.params()?;
    let w = ctx.realization(stream)?;
    let window = ctx.window()?;
    let op = build_sector_hamiltonian::<f64>(n, &params, &w)?;
    let data = if !window_only && op.dim() <= MAX_DENSE_DIM {
        diagonalize_full(&op.matrix)?.with_window(window)
    } else {
        diagonalize_window(&op, window)?.0
    };
    let rows = data.rows();
    let inside = rows.iter().filter(|r| r.in_window).count();
    println!(
        "N={n} L={} dim {}: {} eigenvalues exported, {inside} in [{:.6}, {:.6}]",
        params.half_length,
        op.dim(),
        rows.len(),
        window.lo,
        window.hi
    );
    let mut out = Writer::new(ctx)?;
    out.table(&format!("spectrum_N{n}"), &rows)?;
    out.json("disorder", &w)?;
    out.finish(ctx.manifest("spectrum"), true)
}

pub fn band(ctx: &Context, n_list: &[usize]) -> Result<Report> {
    let delta = ctx.config.model.anisotropy;
    let mut rows = Vec::new();
    println!("{:>5} {:>20} {:>20}", "N", "lo", "hi");
    for &n in n_list {
        let b = droplet_band(n, delta)?;
        println!("{n:>5} {:>20.15} {:>20.15}", b.lo, b.hi);
        rows.push(BandRow {
            n_particles: n,
            lo: b.lo,
            hi: b.hi,
        });
    }
    let mut out = Writer::new(ctx)?;
    out.table("band", &rows)?;
    out.finish(ctx.manifest("band"), true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Picture {
    /// Sector correlators `Q_N(i, j; I)`.
    Sector,
    /// Full-chain number correlators, all sectors at once.
    Spin,
}

pub fn correlate(
    ctx: &Context,
    n_list: &[usize],
    pairs: &[(Site, Site)],
    stream: u64,
    picture: Picture,
) -> Result<Report> {
    let params = ctx.params()?;
    let w = ctx.realization(stream)?;
    let window = ctx.window()?;
    let span = (window.lo, window.hi);
    let mut records = Vec::new();
    match picture {
        Picture::Sector => {
            for &n in n_list {
                let op = build_sector_hamiltonian::<f64>(n, &params, &w)?;
                let (data, _) = diagonalize_window(&op, window)?;
                for &(i, j) in pairs {
                    let q = sector_correlator(&op, &data, i, j, &window)?;
                    records.push(CorrelatorRecord::new(CorrelatorKind::Sector, ctx.seed(), stream, n, i, j, 0.0, span, q)?);
                }
            }
        }
        Picture::Spin => {
            let sites = (2 * params.half_length + 1) as usize;
            if sites > MAX_SPIN_SITES {
                return Err(HarnessError::Config(format!(
                    "the spin picture needs at most {MAX_SPIN_SITES} sites, got {sites}"
                )));
            }
            let basis = EigenBasis::from_spin(&build_spin_hamiltonian::<f64>(&params, &w)?)?;
            for &(i, j) in pairs {
                let q = spin_number_correlator(&basis, i, j, &window)?;
                records.push(CorrelatorRecord::new(CorrelatorKind::Sector, ctx.seed(), stream, 0, i, j, 0.0, span, q)?);
            }
        }
    }
    println!("{:>3} {:>5} {:>5} {:>14}", "N", "i", "j", "value");
    for r in &records {
        println!("{:>3} {:>5} {:>5} {:>14.6e}", r.n_particles, r.i, r.j, r.value);
    }
    let rows: Vec<CorrelatorRow> = records.iter().map(CorrelatorRow::from).collect();
    let mut out = Writer::new(ctx)?;
    out.table("correlators", &rows)?;
    out.finish(ctx.manifest("correlate"), true)
}

/// Fit summary of one decay table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitSummary {
    pub n_particles: Option<usize>,
    pub fit: Option<ExpFit>,
    pub error: Option<String>,
}

fn print_fit(s: &FitSummary) {
    let label = s.n_particles.map_or("sum".to_string(), |n| format!("N={n}"));
    match (&s.fit, &s.error) {
        (Some(f), _) => println!(
            "{label}: rate {:.4} CI [{:.4}, {:.4}] R^2 {:.4} decays {}",
            f.rate,
            f.rate_ci.0,
            f.rate_ci.1,
            f.r_squared,
            f.decays()
        ),
        (None, e) => println!("{label}: no fit ({})", e.clone().unwrap_or_default()),
    }
}

pub fn ensemble(ctx: &Context) -> Result<Report> {
    let cfg = ctx.config.ensemble_config()?;
    let records: Vec<DecayRecord> = match ctx.config.ensemble.kind {
        EnsembleKind::FractionalMoments => fractional_moment_scan(&cfg)?,
        EnsembleKind::Eigencorrelators => vec![eigencorrelator_decay(&cfg)?],
    };
    let (mut decay, mut samples, mut fits) = (Vec::new(), Vec::new(), Vec::new());
    for rec in &records {
        let (d, s) = decay_rows(rec);
        decay.extend(d);
        samples.extend(s);
        let summary = FitSummary {
            n_particles: rec.n_particles,
            fit: rec.fit.clone(),
            error: rec.fit_error.clone(),
        };
        print_fit(&summary);
        if rec.resampled > 0 {
            println!("  {} singular realizations redrawn", rec.resampled);
        }
        if let Some(t) = rec.tail_max {
            println!("  top-sector tail max {t:.3e}, a priori violations {}", rec.apriori_violations);
        }
        fits.push(summary);
    }
    let mut out = Writer::new(ctx)?;
    out.table("decay", &decay)?;
    out.table("samples", &samples)?;
    out.json("fits", &fits)?;
    let mut manifest = ctx.manifest("ensemble");
    manifest.ensemble = Some(cfg);
    out.finish(manifest, true)
}

pub fn fit(ctx: &Context, input: &Path, format: Format, confidence: f64) -> Result<Report> {
    let rows: Vec<DecayRow> = load(input, format)?;
    let mut groups: BTreeMap<Option<usize>, Vec<FitPoint>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.n_particles).or_default().push(FitPoint {
            distance: r.distance as f64,
            mean: r.mean,
            std_error: r.stderr,
        });
    }
    let fits: Vec<FitSummary> = groups
        .into_iter()
        .map(|(n, points)| {
            let (fit, error) = match fit_exponential(&points, confidence) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            FitSummary {
                n_particles: n,
                fit,
                error,
            }
        })
        .collect();
    fits.iter().for_each(print_fit);
    let mut out = Writer::new(ctx)?;
    out.json("fits", &fits)?;
    out.finish(ctx.manifest("fit"), true)
}

#[derive(Clone, Debug)]
pub struct CtOptions {
    pub n_list: Vec<usize>,
    pub k: usize,
    pub energies: usize,
    pub epsilons: Vec<f64>,
    pub pairs: usize,
    pub max_set_size: usize,
    pub realizations: u64,
}

pub fn verify_ct(ctx: &Context, o: &CtOptions) -> Result<Report> {
    let cfg = CTSweepConfig {
        params: ctx.params()?,
        disorder: ctx.config.model.field.clone(),
        n_list: o.n_list.clone(),
        k: o.k,
        energies: o.energies,
        epsilons: o.epsilons.clone(),
        pairs: o.pairs,
        max_set_size: o.max_set_size,
        realizations: o.realizations,
        master_seed: ctx.seed(),
    };
    let r = ct_sweep(&cfg)?;
    let passed = r.bulk_violations == 0 && r.edge_violations == 0;
    println!(
        "bulk {}/{} violations, edge-projected {}/{} violations, worst ratio {:.3e}, log-margin slope {:.3}",
        r.bulk_violations, r.bulk_checks, r.edge_violations, r.edge_checks, r.worst_ratio, r.log_margin_slope
    );
    let mut out = Writer::new(ctx)?;
    out.json("ct_report", &r)?;
    out.finish(ctx.manifest("verify-ct"), passed)
}

pub fn verify_wegner(ctx: &Context, n: usize, half_width: usize, realizations: u64) -> Result<Report> {
    let params = ctx.params()?;
    let spec = &ctx.config.model.field;
    let wp = WegnerParameters::new(&params, spec)?;
    let width = wp.shrink_width(half_width, n, 0.5);
    let window = ctx.window()?;
    let band = droplet_band(n, params.anisotropy)?;
    let center = 0.5 * (band.lo.max(window.lo) + window.hi);
    let interval = Interval::new(center - width / 2.0, center + width / 2.0)?;
    let first = -(n as Site) / 2;
    let out = wegner_empirical(&params, spec, n, half_width, &Config::packed(first, n), interval, realizations, ctx.seed())?;
    println!(
        "|I| = {width:.3e} at {center:.4}: {}/{} hits, Wilson upper {:.4e} vs bound {:.4e}",
        out.hits, out.trials, out.wilson_upper, out.bound
    );
    let passed = out.passed();
    let mut w = Writer::new(ctx)?;
    w.json("wegner_report", &out)?;
    w.finish(ctx.manifest("verify-wegner"), passed)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IdentityReport {
    pub instances: usize,
    pub vanishing_max: f64,
    pub reconstruction_exact: bool,
    pub sum_identity_seeds: u64,
    pub sum_identity_max_defect: f64,
}

fn random_support(rng: &mut ChaCha8Rng, lo: Site, hi: Site) -> Vec<Site> {
    let s: Vec<Site> = (lo..=hi).filter(|_| rng.random_bool(0.5)).collect();
    if s.is_empty() {
        vec![rng.random_range(lo..=hi)]
    } else {
        s
    }
}

pub fn verify_identities(ctx: &Context, instances: usize, seeds: u64) -> Result<Report> {
    let base = ctx.params()?;
    let field = &ctx.config.model.field;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed());
    let mut report = IdentityReport {
        instances,
        reconstruction_exact: true,
        sum_identity_seeds: seeds,
        ..Default::default()
    };
    let params = base.with_half_length(2)?;
    for trial in 0..instances {
        let w = DisorderRealization::sample(field, 2, SeedToken::new(ctx.seed(), trial as u64))?;
        let basis = EigenBasis::from_spin(&build_spin_hamiltonian::<f64>(&params, &w)?)?;
        let cut = rng.random_range(-1..=2);
        let x = LocalObservable::random(random_support(&mut rng, -2, cut - 1), &mut rng)?;
        let y = LocalObservable::random(random_support(&mut rng, cut, 2), &mut rng)?;
        let v = &basis.data.values;
        let (a, b) = (rng.random_range(0..v.len()), rng.random_range(0..v.len()));
        let (a, b) = (a.min(b), a.max(b));
        let window = Interval::new(v[a] - 1e-9, v[b] + 1e-9)?;
        let f = Interval::new(v[a] - 1e-9, v[rng.random_range(a..=b)] + 1e-9)?;
        let r = vanishing_identities_check(&basis, &x, &y, &window, &f, rng.random_range(0.0..100.0))?;
        report.vanishing_max = report.vanishing_max.max(r.plus_minus).max(r.minus_plus);
        for obs in [&x, &y] {
            report.reconstruction_exact &= block_decompose(obs)?.reconstruct() == obs.matrix;
        }
    }
    let params = base.with_half_length(3)?;
    let window = ctx.window()?;
    for seed in 0..seeds {
        let w = DisorderRealization::sample(field, 3, SeedToken::new(ctx.seed(), seed))?;
        let basis = EigenBasis::from_spin(&build_spin_hamiltonian::<f64>(&params, &w)?)?;
        let mut sectors = Vec::new();
        for n in 1..=7 {
            let op = build_sector_hamiltonian::<f64>(n, &params, &w)?;
            let data = diagonalize_full(&op.matrix)?;
            sectors.push((op, data));
        }
        let refs: Vec<_> = sectors.iter().map(|(o, d)| (o, d)).collect();
        for (i, j) in [(-3, 3), (-1, 2), (0, 0), (1, 3)] {
            let d = sum_identity_check(&basis, &refs, i, j, &window)?.defect();
            report.sum_identity_max_defect = report.sum_identity_max_defect.max(d);
        }
    }
    let passed = report.vanishing_max <= 1e-10 && report.reconstruction_exact && report.sum_identity_max_defect <= 1e-8;
    println!(
        "vanishing max {:.2e} over {} instances, reconstruction exact {}, sum identity defect {:.2e} over {} seeds",
        report.vanishing_max, instances, report.reconstruction_exact, report.sum_identity_max_defect, seeds
    );
    let mut out = Writer::new(ctx)?;
    out.json("identity_report", &report)?;
    out.finish(ctx.manifest("verify-identities"), passed)
}

/// Site pairs `(i, j)` centered on the origin at the given distances.
pub fn centered_pairs(distances: &[u32]) -> Vec<(Site, Site)> {
    distances.iter().map(|&d| site_pair(d)).collect()
}
