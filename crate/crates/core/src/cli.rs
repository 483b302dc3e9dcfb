//! Command line front end: `run <experiment>` and `validate-config FILE`.
//!
//! Settings are layered as built-in defaults, then the worker count from
//! [`WORKERS_ENV`], then `--config FILE`, then flags.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiment::{
    parse_f64_list, parse_k_factor, parse_usize_list, run as run_experiment, ConfigOverrides, ExperimentConfig,
    ExperimentId, McOverrides,
};
use crate::sweep::SweepResult;

/// Environment variable holding the default Monte Carlo worker count.
pub const WORKERS_ENV: &str = "WEICHSEL_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "weichsel", version, about = "Channel hardening and favorable propagation sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write its CSV.
    Run(RunArgs),
    /// Parse a config file and print its canonical, fully resolved form.
    ValidateConfig { file: PathBuf },
}

/// Lists accept `a,b,c` and inclusive ranges `lo:hi[:step]`.
#[derive(Debug, Args)]
struct RunArgs {
    /// hardening | block-interference | one-ring-interference | moment-validate | scaling-diagnostic
    experiment: String,
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Antenna counts.
    #[arg(long)]
    m: Option<String>,
    /// Rank parameters D for the block study.
    #[arg(long = "d-rank")]
    d_rank: Option<String>,
    /// Linear Ricean K-factor, or `inf`.
    #[arg(long = "k-factor", allow_hyphen_values = true)]
    k_factor: Option<String>,
    /// LoS angle in radians.
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Antenna spacing in wavelengths.
    #[arg(long)]
    spacing: Option<f64>,
    /// First user's angular spreads, degrees.
    #[arg(long = "spread1-deg")]
    spread1_deg: Option<String>,
    /// Second user's angular spreads, degrees.
    #[arg(long = "spread2-deg")]
    spread2_deg: Option<String>,
    /// Monte Carlo trials per estimate
    #[arg(long)]
    trials: Option<u64>,
    /// Base seed; every random stream is derived from it
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo workers; defaults to $WEICHSEL_WORKERS, else 4.
    #[arg(long)]
    workers: Option<usize>,
    /// Haar eigenbasis draws per M (hardening).
    #[arg(long = "basis-draws")]
    basis_draws: Option<usize>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn overrides(&self) -> Result<ConfigOverrides> {
        let mc = (self.trials.is_some() || self.seed.is_some() || self.workers.is_some()).then_some(McOverrides {
            trials: self.trials,
            seed: self.seed,
            workers: self.workers,
        });
        Ok(ConfigOverrides {
            m: self.m.as_deref().map(parse_usize_list).transpose()?,
            d_rank: self.d_rank.as_deref().map(parse_usize_list).transpose()?,
            k_factor: self.k_factor.as_deref().map(parse_k_factor).transpose()?,
            phi: self.phi,
            spacing: self.spacing,
            spread1_deg: self.spread1_deg.as_deref().map(parse_f64_list).transpose()?,
            spread2_deg: self.spread2_deg.as_deref().map(parse_f64_list).transpose()?,
            basis_draws: self.basis_draws,
            mc,
            out: self.out.clone(),
            ..Default::default()
        })
    }
}

fn env_overrides(env_workers: Option<&str>) -> Result<ConfigOverrides> {
    let Some(raw) = env_workers else {
        return Ok(ConfigOverrides::default());
    };
    let workers: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{WORKERS_ENV} must be a positive integer, got {raw:?}")))?;
    Ok(ConfigOverrides {
        mc: Some(McOverrides {
            workers: Some(workers),
            ..Default::default()
        }),
        ..Default::default()
    })
}

fn read_overrides(path: &Path) -> Result<ConfigOverrides> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    ConfigOverrides::from_json(&text)
}

/// Resolves the config a `run` invocation would use.
fn resolve_run(args: &RunArgs, env_workers: Option<&str>) -> Result<ExperimentConfig> {
    let id: ExperimentId = args.experiment.parse()?;
    let env = env_overrides(env_workers)?;
    let file = args.config.as_deref().map(read_overrides).transpose()?.unwrap_or_default();
    let flags = args.overrides()?;
    ExperimentConfig::resolve(id, &[&env, &file, &flags])
}

/// Resolves a standalone config file; it must name its experiment.
pub fn resolve_config_file(path: &Path) -> Result<ExperimentConfig> {
    let file = read_overrides(path)?;
    let id = file
        .experiment
        .ok_or_else(|| Error::Config(format!("{} does not name an experiment", path.display())))?;
    ExperimentConfig::resolve(id, &[&file])
}

pub fn write_result(result: &SweepResult, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            result.write_csv(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            result.write_csv(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn execute(cli: Cli, env_workers: Option<&str>) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = resolve_run(&args, env_workers)?;
            let result = run_experiment(&cfg)?;
            write_result(&result, cfg.out.as_deref())?;
            if let Some(path) = &cfg.out {
                eprintln!("wrote {} rows to {}", result.len(), path.display());
            }
        }
        Command::ValidateConfig { file } => {
            let mut out = io::stdout().lock();
            writeln!(out, "{}", resolve_config_file(&file)?.to_canonical_json())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs, and returns the
/// process exit code: 0 success, 2 config error, 3 numerical failure,
/// 4 I/O error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_workers = std::env::var(WORKERS_ENV).ok();
    run_with_env(args, env_workers.as_deref())
}

/// As [`run`], with the worker environment variable passed explicitly.
pub fn run_with_env<I, T>(args: I, env_workers: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli, env_workers) {
        Ok(()) => 0,
        // a closed downstream pipe (`| head`) is not a failure of ours
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
