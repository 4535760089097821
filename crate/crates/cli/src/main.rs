//! Command-line front end: solve Lyapunov equations, trace numerical ranges
//! and pseudospectra, evaluate singular-value decay bounds, and reproduce
//! the reference figures as CSV tables and SVG plots.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
//! 4 soundness violation (a valid bound fell below the realized decay).

mod io;
mod run;
mod svg;

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use run::{BoundsConfig, Output, SoundnessViolation, Source};

#[derive(Parser)]
#[command(name = "lyapdecay", version, about = "Singular value decay of Lyapunov solutions")]
struct Cli {
    /// Config file with `key=value` lines; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV/SVG artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma list of output formats: csv, svg.
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SourceArgs {
    /// Matrix file for A (header `rows cols complex|real`, then entries).
    #[arg(long)]
    a: Option<PathBuf>,
    /// Matrix file for B.
    #[arg(long)]
    b: Option<PathBuf>,
    /// Built-in family: fd, jordan, 2x2, random.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// 2x2 family right-hand side parameter t.
    #[arg(long)]
    t: Option<f64>,
    /// Rank of B for the random family.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Comma list of real ADI shifts (overrides --strategy).
    #[arg(long)]
    shifts: Option<String>,
    /// Shift selection strategy: single, log.
    #[arg(long)]
    strategy: Option<String>,
    /// Number of generated shifts.
    #[arg(long)]
    k: Option<usize>,
    /// Numerical range boundary points.
    #[arg(long)]
    m: Option<usize>,
    /// Pseudospectral level.
    #[arg(long)]
    eps: Option<String>,
    /// Resolvent grid resolution per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Lift the size cap on the companion/Krylov factorization.
    #[arg(long)]
    cap_override: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve AX + XA* = -BB* and report the singular value spectrum.
    Solve(SourceArgs),
    /// Trace the numerical range boundary W(A).
    Nrange {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Trace epsilon-pseudospectrum contours.
    Psa {
        #[command(flatten)]
        source: SourceArgs,
        /// Comma list of epsilon levels.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Evaluate every decay bound on one problem.
    Bounds {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Decay curves and numerical ranges for the fd family across n.
    Fig1 {
        /// Comma list of dimensions (default 16,32,64,128,256).
        #[arg(long)]
        n: Option<String>,
    },
    /// Decay curves and numerical ranges for the Jordan family across alpha.
    Fig2 {
        /// Comma list of alpha values (default 0.5,1,2,4).
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Worst-case 2x2 ratio sweep over alpha with the closed form.
    Sweep2x2 {
        /// Number of alpha grid points.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Admissible numerical-abscissa strip from (||A||, ||B||, s1, sn).
    Strip {
        /// Comma list ||A||,||B||,s1,sn (default 1,1,1,0.5).
        #[arg(long)]
        values: Option<String>,
    },
    /// Side-by-side bound comparison table for one problem.
    Compare {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
}

/// Key=value config file; `#` starts a comment.
struct Cfg(HashMap<String, String>);

impl Cfg {
    fn load(path: Option<&PathBuf>) -> Result<Self> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .with_context(|| format!("line {}: expected key=value", lineno + 1))?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => match raw.parse() {
                Ok(v) => Ok(Some(v)),
                Err(_) => bail!("config key '{key}': cannot parse '{raw}'"),
            },
        }
    }
}

fn pick<T: FromStr>(flag: Option<T>, cfg: &Cfg, key: &str, default: T) -> Result<T> {
    Ok(match flag {
        Some(v) => v,
        None => cfg.get(key)?.unwrap_or(default),
    })
}

fn parse_list<T: FromStr>(raw: &str, what: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| anyhow::anyhow!("bad {what} entry '{s}'"))
        })
        .collect()
}

fn resolve_source(args: &SourceArgs, cfg: &Cfg) -> Result<Source> {
    run::parse_matrix_source(
        args.a.as_deref(),
        args.b.as_deref(),
        args.family
            .clone()
            .or(cfg.get::<String>("family")?)
            .as_deref(),
        pick_opt(args.n, cfg, "n")?,
        pick_opt(args.alpha, cfg, "alpha")?,
        pick_opt(args.t, cfg, "t")?,
        pick_opt(args.r, cfg, "r")?,
        pick_opt(args.seed, cfg, "seed")?,
    )
}

fn pick_opt<T: FromStr>(flag: Option<T>, cfg: &Cfg, key: &str) -> Result<Option<T>> {
    Ok(match flag {
        Some(v) => Some(v),
        None => cfg.get(key)?,
    })
}

fn resolve_bounds(args: &BoundsArgs, cfg: &Cfg) -> Result<BoundsConfig> {
    let shifts = match args.shifts.clone().or(cfg.get::<String>("shifts")?) {
        Some(raw) => Some(parse_list::<f64>(&raw, "shift")?),
        None => None,
    };
    let eps_raw = pick(args.eps.clone(), cfg, "eps", "0.1".into())?;
    let eps_list = parse_list::<f64>(&eps_raw, "eps")?;
    Ok(BoundsConfig {
        shifts,
        strategy: args.strategy.clone().or(cfg.get::<String>("strategy")?),
        k: pick(args.k, cfg, "k", 4)?,
        m: pick(args.m, cfg, "m", 128)?,
        eps: *eps_list.first().context("--eps list is empty")?,
        grid: pick(args.grid, cfg, "grid", 128)?,
        cap_override: args.cap_override || cfg.get::<bool>("cap-override")?.unwrap_or(false),
    })
}

fn resolve_output(cli: &Cli, cfg: &Cfg) -> Result<Output> {
    let dir = pick(cli.out.clone(), cfg, "out", PathBuf::from("out"))?;
    let formats = pick(cli.format.clone(), cfg, "format", "csv,svg".into())?;
    let mut csv = false;
    let mut svg = false;
    for f in formats.split(',') {
        match f.trim() {
            "csv" => csv = true,
            "svg" => svg = true,
            other => bail!("unknown format '{other}' (expected csv, svg)"),
        }
    }
    Ok(Output { dir, csv, svg })
}

fn dispatch(cli: &Cli, cfg: &Cfg) -> Result<()> {
    let out = resolve_output(cli, cfg)?;
    match &cli.command {
        Command::Solve(source) => run::run_solve(&resolve_source(source, cfg)?, &out),
        Command::Nrange { source, m } => {
            let m = pick(*m, cfg, "m", 256)?;
            run::run_nrange(&resolve_source(source, cfg)?, m, &out)
        }
        Command::Psa { source, eps, grid } => {
            let raw = pick(eps.clone(), cfg, "eps", "0.05,0.1,0.2".into())?;
            let eps_list = parse_list::<f64>(&raw, "eps")?;
            let grid = pick(*grid, cfg, "grid", 256)?;
            run::run_psa(&resolve_source(source, cfg)?, &eps_list, grid, &out)
        }
        Command::Bounds { source, bounds } => {
            let bcfg = resolve_bounds(bounds, cfg)?;
            run::run_bounds(&resolve_source(source, cfg)?, &bcfg, &out)
        }
        Command::Compare { source, bounds } => {
            let bcfg = resolve_bounds(bounds, cfg)?;
            run::run_compare(&resolve_source(source, cfg)?, &bcfg, &out)
        }
        Command::Fig1 { n } => {
            let raw = pick(n.clone(), cfg, "n", "16,32,64,128,256".into())?;
            run::run_fig1(&parse_list(&raw, "n")?, &out)
        }
        Command::Fig2 { alpha, n } => {
            let raw = pick(alpha.clone(), cfg, "alpha", "0.5,1,2,4".into())?;
            let n = pick(*n, cfg, "n", 64)?;
            run::run_fig2(&parse_list(&raw, "alpha")?, n, &out)
        }
        Command::Sweep2x2 { points } => {
            let points = pick(*points, cfg, "points", 200)?;
            if points < 2 {
                bail!("sweep needs at least 2 points");
            }
            run::run_sweep2x2(points, &out)
        }
        Command::Strip { values } => {
            let raw = pick(values.clone(), cfg, "values", "1,1,1,0.5".into())?;
            let list = parse_list::<f64>(&raw, "value")?;
            let values: [f64; 4] = list
                .try_into()
                .map_err(|_| anyhow::anyhow!("--values needs exactly 4 entries"))?;
            run::run_strip(&values, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match Cfg::load(cli.config.as_ref()) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(2);
        }
    };
    match dispatch(&cli, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<SoundnessViolation>().is_some() {
                ExitCode::from(4)
            } else if err.downcast_ref::<lyapdecay::Error>().is_some() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
