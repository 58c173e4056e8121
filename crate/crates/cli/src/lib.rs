//! The `equilab` experiment driver: each subcommand builds a [`Report`], writes it
//! as CSV and exits nonzero when one of its checks fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod report;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use config::Config;
use equilab::solv::LatticeSpec;
use std::io::Write;
use std::path::PathBuf;

pub use report::{Cell, Check, Report};

pub const SEED_ENV: &str = "EQUILAB_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "equilab",
    version,
    about = "Harmonic measure experiments on hyperbolic foliations"
)]
pub struct Cli {
    /// Optional `key = value` file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the CSV here instead of stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for stochastic commands (default: config, then $EQUILAB_SEED).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monodromy matrix [[a, b], [c, d]].
    #[arg(long, global = true, num_args = 4, value_names = ["A", "B", "C", "D"], allow_negative_numbers = true)]
    pub lattice: Option<Vec<i64>>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ∫_0^∞ sqrt(e^{-t} - e^{-2t}) dt against π/2.
    LimitIntegral {
        #[arg(long)]
        tol: Option<f64>,
    },
    /// The limit band density Φ̂ and its periodization.
    PhihatCurve {
        #[arg(long, allow_negative_numbers = true)]
        t_lo: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        t_hi: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long = "K", visible_alias = "k")]
        k: Option<u32>,
    },
    /// Binned band masses against the limit, per radius.
    BandConvergence {
        #[arg(long, value_delimiter = ',')]
        rhos: Option<Vec<f64>>,
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Monte Carlo histogram of t mod 1 on the solvmanifold.
    McSolv {
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long = "K", visible_alias = "k")]
        k: Option<u32>,
    },
    /// Defect ratios over the regression basis.
    DefectSweep {
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        rho_primes: Option<Vec<f64>>,
        #[arg(long)]
        basis_size: Option<usize>,
    },
    /// L¹ gaps between the ψ- and φ-measures.
    MeasureGap {
        #[arg(long, value_delimiter = ',')]
        rhos: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        rho_primes: Option<Vec<f64>>,
    },
    /// Commutation residuals of the geodesic and horocycle flows.
    FlowsCheck {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid: Option<Vec<f64>>,
    },
    /// Green–Riesz residual table.
    GreenRiesz {
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        cases: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::LimitIntegral { .. } => "limit-integral",
            Command::PhihatCurve { .. } => "phihat-curve",
            Command::BandConvergence { .. } => "band-convergence",
            Command::McSolv { .. } => "mc-solv",
            Command::DefectSweep { .. } => "defect-sweep",
            Command::MeasureGap { .. } => "measure-gap",
            Command::FlowsCheck { .. } => "flows-check",
            Command::GreenRiesz { .. } => "green-riesz",
        }
    }
}

fn seed(cli: &Cli, cfg: &Config) -> anyhow::Result<Option<u64>> {
    if let Some(s) = cli.seed {
        return Ok(Some(s));
    }
    if let Some(s) = cfg.get("seed")? {
        return Ok(Some(s));
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => Ok(Some(
            v.trim()
                .parse()
                .with_context(|| format!("{SEED_ENV}={v:?} is not a seed"))?,
        )),
        Err(_) => Ok(None),
    }
}

fn lattice(cli: &Cli, cfg: &Config) -> anyhow::Result<LatticeSpec> {
    let ints = match &cli.lattice {
        Some(v) => Some(v.clone()),
        None => cfg.get_list::<i64>("lattice")?,
    };
    match ints.as_deref() {
        None => Ok(LatticeSpec::default()),
        Some(&[a, b, c, d]) => Ok(LatticeSpec::from_ints(a, b, c, d)?),
        Some(v) => bail!("lattice needs four integers, got {}", v.len()),
    }
}

fn positive_tol(tol: f64) -> anyhow::Result<f64> {
    if !(tol > 0.0) {
        bail!("tolerances must be positive, got {tol}");
    }
    Ok(tol)
}

/// Resolves the parameters of `cli` and builds its report.
pub fn build_report(cli: &Cli) -> anyhow::Result<Report> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let report = match &cli.command {
        Command::LimitIntegral { tol } => {
            let tol = positive_tol(cfg.resolve(*tol, "tol", 1e-10)?)?;
            commands::limit_integral(&commands::LimitIntegral { tol })?
        }
        Command::PhihatCurve { t_lo, t_hi, points, k } => {
            let d = commands::PhihatCurve::default();
            commands::phihat_curve(&commands::PhihatCurve {
                t_lo: cfg.resolve(*t_lo, "t_lo", d.t_lo)?,
                t_hi: cfg.resolve(*t_hi, "t_hi", d.t_hi)?,
                points: cfg.resolve(*points, "points", d.points)?,
                k: cfg.resolve(*k, "k", d.k)?,
            })?
        }
        Command::BandConvergence { rhos, bins } => {
            let d = commands::BandConvergence::default();
            commands::band_convergence(&commands::BandConvergence {
                rhos: cfg.resolve_list(rhos.clone(), "rhos", d.rhos)?,
                bins: cfg.resolve(*bins, "bins", d.bins)?,
            })?
        }
        Command::McSolv { rho, n, bins, k } => {
            let Some(seed) = seed(cli, &cfg)? else {
                bail!("mc-solv needs a seed: pass --seed, set `seed` in the config or {SEED_ENV}");
            };
            let d = commands::McSolv::new(seed);
            commands::mc_solv(&commands::McSolv {
                rho: cfg.resolve(*rho, "rho", d.rho)?,
                n: cfg.resolve(*n, "n", d.n)?,
                bins: cfg.resolve(*bins, "bins", d.bins)?,
                k: cfg.resolve(*k, "k", d.k)?,
                seed,
                lattice: lattice(cli, &cfg)?,
            })?
        }
        Command::DefectSweep {
            rho,
            rho_primes,
            basis_size,
        } => {
            let d = commands::DefectSweep::default();
            commands::defect_sweep(&commands::DefectSweep {
                rho: cfg.resolve(*rho, "rho", d.rho)?,
                rho_primes: cfg.resolve_list(rho_primes.clone(), "rho_primes", d.rho_primes)?,
                basis_size: cfg.resolve(*basis_size, "basis_size", d.basis_size)?,
            })?
        }
        Command::MeasureGap { rhos, rho_primes } => {
            let d = commands::MeasureGap::default();
            commands::measure_gap_table(&commands::MeasureGap {
                rhos: cfg.resolve_list(rhos.clone(), "rhos", d.rhos)?,
                rho_primes: cfg.resolve_list(rho_primes.clone(), "rho_primes", d.rho_primes)?,
            })?
        }
        Command::FlowsCheck { grid } => {
            let d = commands::FlowsCheck::default();
            commands::flows_check(&commands::FlowsCheck {
                grid: cfg.resolve_list(grid.clone(), "grid", d.grid)?,
            })?
        }
        Command::GreenRiesz { tol, cases } => {
            let d = commands::GreenRiesz::default();
            commands::green_riesz(&commands::GreenRiesz {
                tol: positive_tol(cfg.resolve(*tol, "tol", d.tol)?)?,
                cases: cfg.resolve(*cases, "cases", d.cases)?,
                seed: seed(cli, &cfg)?.unwrap_or(d.seed),
            })?
        }
    };
    Ok(report)
}

/// Runs `cli` on a pool of `--threads` workers, writes the CSV and the summary,
/// and returns whether every check passed.
pub fn run(cli: &Cli) -> anyhow::Result<bool> {
    let cfg_threads = match &cli.config {
        Some(p) => Config::load(p)?.get::<usize>("threads")?,
        None => None,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads.or(cfg_threads) {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        pool = pool.num_threads(t);
    }
    let report = pool.build()?.install(|| build_report(cli))?;

    match &cli.out {
        Some(path) => {
            let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            report.write_csv(std::io::BufWriter::new(file))?;
        }
        None => report.write_csv(std::io::stdout().lock())?,
    }

    let mut err = std::io::stderr().lock();
    for line in &report.summary {
        writeln!(err, "{}: {line}", cli.command.name())?;
    }
    let failed: Vec<&Check> = report.failures().collect();
    for c in &failed {
        writeln!(err, "FAILED {}: {}", c.name, c.detail)?;
    }
    if !failed.is_empty() {
        let mut names: Vec<&str> = failed.iter().map(|c| c.name.as_str()).collect();
        names.dedup();
        writeln!(err, "violated criteria: {}", names.join(", "))?;
    }
    Ok(failed.is_empty())
}
