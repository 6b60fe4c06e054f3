use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use xxz_core::config_space::Site;

use crate::commands::{self, centered_pairs, Context, CtOptions, Picture, Report};
use crate::config::{EnsembleKind, RunConfig};
use crate::error::{HarnessError, Result};
use crate::manifest::RunManifest;
use crate::persist::{format_of, Format};

/// Numerical laboratory for the random XXZ chain in the Ising phase.
#[derive(Debug, Parser)]
#[command(name = "xxz", version = crate::manifest::CODE_VERSION)]
pub struct Cli {
    /// JSON run configuration; defaults apply to absent fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Master seed; overrides the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true, env = "XXZ_OUT_DIR", default_value = "out")]
    pub out_dir: PathBuf,

    /// Worker threads; all outputs are independent of this value.
    #[arg(long, global = true, env = "XXZ_THREADS")]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(flatten)]
    pub model: ModelArgs,

    #[command(subcommand)]
    pub command: Command,
}

/// Overrides of the model section of the configuration.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Anisotropy `Delta > 1`.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Disorder strength.
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Half-length `L` of the chain `[-L, L]`.
    #[arg(long, short = 'L', global = true)]
    pub half_length: Option<Site>,
    /// Boundary field.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Droplet window margin.
    #[arg(long, global = true)]
    pub margin: Option<f64>,
    /// Upper end of the uniform field distribution.
    #[arg(long, global = true)]
    pub omega_max: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assemble sector operators and export summaries.
    Build {
        #[arg(long, value_parser = parse_usizes, default_value = "1..3")]
        n: List<usize>,
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
    /// Diagonalize one sector and export its spectrum.
    Spectrum {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Export only the droplet window even when full diagonalization fits.
        #[arg(long)]
        window_only: bool,
    },
    /// Droplet band table.
    Band {
        #[arg(long, value_parser = parse_usizes, default_value = "1..5")]
        n: List<usize>,
    },
    /// Number correlators in the droplet window for one realization.
    Correlate {
        #[arg(long, value_parser = parse_usizes, default_value = "1..2")]
        n: List<usize>,
        /// Distances of site pairs centered on the origin.
        #[arg(long, value_parser = parse_u32s, default_value = "0..6")]
        distances: List<u32>,
        /// Explicit site pairs `i:j,...`; replaces the distances.
        #[arg(long, value_parser = parse_pairs, allow_hyphen_values = true)]
        pairs: Option<List<(Site, Site)>>,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long, value_enum, default_value_t = Picture::Sector)]
        picture: Picture,
    },
    /// Monte Carlo estimator runs.
    Ensemble {
        #[arg(long, value_enum)]
        kind: Option<EnsembleKind>,
        #[arg(long, value_parser = parse_usizes)]
        n: Option<List<usize>>,
        #[arg(long, value_parser = parse_u32s)]
        distances: Option<List<u32>>,
        #[arg(long)]
        realizations: Option<u64>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Deterministic and statistical verification suites.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Exponential fits of a stored decay table.
    Fit {
        input: PathBuf,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
    },
    /// Rerun a recorded run into the output directory and compare outputs.
    Replay { manifest: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// Combes-Thomas bounds for the bulk restriction and for `H + P_1`.
    Ct {
        #[arg(long, value_parser = parse_usizes, default_value = "2")]
        n: List<usize>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 5)]
        energies: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,0.01")]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long, default_value_t = 3)]
        max_set_size: usize,
        #[arg(long, default_value_t = 100)]
        realizations: u64,
    },
    /// Empirical Wegner frequency against its bound.
    Wegner {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        half_width: usize,
        #[arg(long, default_value_t = 2000)]
        realizations: u64,
    },
    /// Exact correlator identities.
    Identities {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
    },
}

/// Comma separated list argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct List<T>(pub Vec<T>);

fn parse_list<T: std::str::FromStr + Copy + Ord>(s: &str, step: impl Fn(T) -> T) -> std::result::Result<List<T>, String>
where
    T::Err: std::fmt::Display,
{
    let one = |t: &str| t.trim().parse::<T>().map_err(|e| format!("{t:?}: {e}"));
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (one(a)?, one(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {part}"));
            }
            let mut x = a;
            while x <= b {
                out.push(x);
                x = step(x);
            }
        } else {
            out.push(one(part)?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(List(out))
}

/// `3`, `1,2,4` or the inclusive range `1..5`.
pub fn parse_usizes(s: &str) -> std::result::Result<List<usize>, String> {
    parse_list(s, |x: usize| x + 1)
}

pub fn parse_u32s(s: &str) -> std::result::Result<List<u32>, String> {
    parse_list(s, |x: u32| x + 1)
}

/// `i:j,i:j`.
pub fn parse_pairs(s: &str) -> std::result::Result<List<(Site, Site)>, String> {
    s.split(',')
        .map(|p| {
            let (i, j) = p.split_once(':').ok_or_else(|| format!("{p:?} is not i:j"))?;
            let site = |t: &str| t.trim().parse::<Site>().map_err(|e| format!("{t:?}: {e}"));
            Ok((site(i)?, site(j)?))
        })
        .collect::<std::result::Result<_, String>>()
        .map(List)
}

impl ModelArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let m = &mut cfg.model;
        m.anisotropy = self.delta.unwrap_or(m.anisotropy);
        m.disorder = self.lambda.unwrap_or(m.disorder);
        m.half_length = self.half_length.unwrap_or(m.half_length);
        m.window_margin = self.margin.unwrap_or(m.window_margin);
        if self.beta.is_some() {
            m.boundary = self.beta;
        }
        if let Some(w) = self.omega_max {
            m.field = xxz_core::operators::DisorderSpec::Uniform { omega_max: w };
        }
    }
}

fn resolve(cli: &Cli, arguments: Vec<String>) -> Result<Context> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cli.model.apply(&mut config);
    if let Some(s) = cli.seed {
        config.ensemble.master_seed = s;
    }
    if let Command::Ensemble {
        kind,
        n,
        distances,
        realizations,
        n_max,
    } = &cli.command
    {
        let e = &mut config.ensemble;
        e.kind = kind.unwrap_or(e.kind);
        e.n_list = n.clone().map_or_else(|| e.n_list.clone(), |l| l.0);
        e.distances = distances.clone().map_or_else(|| e.distances.clone(), |l| l.0);
        e.realizations = realizations.unwrap_or(e.realizations);
        e.n_max = n_max.unwrap_or(e.n_max);
    }
    config.model.params()?;
    Ok(Context {
        config,
        out_dir: cli.out_dir.clone(),
        format: cli.format,
        arguments,
    })
}

/// Runs `command` against a resolved context.
pub fn execute(command: &Command, ctx: &Context) -> Result<Report> {
    match command {
        Command::Build { n, stream } => commands::build(ctx, &n.0, *stream),
        Command::Spectrum { n, stream, window_only } => commands::spectrum(ctx, *n, *stream, *window_only),
        Command::Band { n } => commands::band(ctx, &n.0),
        Command::Correlate {
            n,
            distances,
            pairs,
            stream,
            picture,
        } => {
            let pairs = pairs.clone().map_or_else(|| centered_pairs(&distances.0), |l| l.0);
            commands::correlate(ctx, &n.0, &pairs, *stream, *picture)
        }
        Command::Ensemble { .. } => commands::ensemble(ctx),
        Command::Verify { suite } => match suite {
            Suite::Ct {
                n,
                k,
                energies,
                epsilons,
                pairs,
                max_set_size,
                realizations,
            } => commands::verify_ct(
                ctx,
                &CtOptions {
                    n_list: n.0.clone(),
                    k: *k,
                    energies: *energies,
                    epsilons: epsilons.clone(),
                    pairs: *pairs,
                    max_set_size: *max_set_size,
                    realizations: *realizations,
                },
            ),
            Suite::Wegner {
                n,
                half_width,
                realizations,
            } => commands::verify_wegner(ctx, *n, *half_width, *realizations),
            Suite::Identities { instances, seeds } => commands::verify_identities(ctx, *instances, *seeds),
        },
        Command::Fit { input, confidence } => commands::fit(ctx, input, format_of(input)?, *confidence),
        Command::Replay { manifest } => replay(manifest, &ctx.out_dir),
    }
}

/// Reruns the run recorded in `manifest` into `out_dir` and checks that
/// every output file is byte-identical.
pub fn replay(manifest: &Path, out_dir: &Path) -> Result<Report> {
    let recorded = RunManifest::load(manifest)?;
    let source = manifest.parent().unwrap_or(Path::new("."));
    if source.canonicalize().ok() == out_dir.canonicalize().ok() {
        return Err(HarnessError::Config("replay needs an output directory other than the recorded one".into()));
    }
    let cli = Cli::try_parse_from(&recorded.arguments)
        .map_err(|e| HarnessError::Config(format!("recorded arguments: {e}")))?;
    if matches!(cli.command, Command::Replay { .. }) {
        return Err(HarnessError::Config("cannot replay a replay".into()));
    }
    let ctx = Context {
        config: recorded.config.clone(),
        out_dir: out_dir.to_path_buf(),
        format: recorded.format,
        arguments: recorded.arguments.clone(),
    };
    let report = execute(&cli.command, &ctx)?;
    let mut identical = report.outputs == recorded.outputs;
    for name in &recorded.outputs {
        let a = std::fs::read(source.join(name)).map_err(crate::error::io_err(source.join(name)))?;
        let b = std::fs::read(out_dir.join(name)).map_err(crate::error::io_err(out_dir.join(name)))?;
        if a != b {
            println!("differs: {}", name.display());
            identical = false;
        }
    }
    println!(
        "replay of {} ({} files): {}",
        recorded.experiment,
        recorded.outputs.len(),
        if identical { "identical" } else { "mismatch" }
    );
    Ok(Report {
        outputs: report.outputs,
        passed: identical && report.passed,
    })
}

/// Exit status: 0 on success, 1 when a check fails, 2 on errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let arguments = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let outcome = resolve(&cli, arguments).and_then(|ctx| {
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cli.threads {
            pool = pool.num_threads(t);
        }
        pool.build()?.install(|| execute(&cli.command, &ctx))
    });
    match outcome {
        Ok(r) if r.passed => 0,
        Ok(_) => {
            eprintln!("xxz: check failed");
            1
        }
        Err(e) => {
            eprintln!("xxz: {e}");
            2
        }
    }
}
