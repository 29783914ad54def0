//! `nps` command implementations. `main` only parses arguments, sets up
//! logging and maps [`Outcome`] to an exit code.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use nps_core::harness::{self, sweep_jobs, write_session_csv, write_verify_csv};
use nps_core::protcode::Convention;
use nps_core::{parse_scenario, Scenario};

#[derive(Debug, Parser)]
#[command(name = "nps", version, about = "Rotating network-coding protection: runs, recoverability checks and sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one session of a scenario and print the per-round report.
    Run(RunArgs),
    /// Check every t-column submatrix for full rank over a grid of (n, t, q).
    Verify(VerifyArgs),
    /// Fail every relay of a scenario in turn, once per seed, and emit CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Coefficient exponent layout; overrides the scenario's.
    #[arg(long, value_parser = parse_convention)]
    pub convention: Option<Convention>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Seeded data, replacing the scenario's data section.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Values of n: `a..b` (inclusive) or `a,b,c`.
    #[arg(long, value_parser = parse_values)]
    pub n: Values,
    #[arg(long, value_parser = parse_values)]
    pub t: Values,
    /// Field orders; non-prime-powers are skipped.
    #[arg(long, value_parser = parse_values, default_value = "2..64")]
    pub q: Values,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seeds per relay, starting at `--seed`.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    /// Comma-separated relays to fail; every relay when omitted, none when empty.
    #[arg(long)]
    pub nodes: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

/// A parsed `--n`/`--t`/`--q` argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Values(pub Vec<u64>);

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Some round failed to decode or some sweep row did not recover.
    RecoveryFailure,
}

fn parse_convention(s: &str) -> Result<Convention, String> {
    s.parse::<Convention>().map_err(|e| e.to_string())
}

/// `a..b` and `a..=b` are inclusive; `a,b,c` is a list; a bare number is
/// itself. Nested forms such as `2..4,7` are allowed.
pub fn parse_values(s: &str) -> Result<Values, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |x: &str| x.trim().parse::<u64>().map_err(|_| format!("`{x}` is not a number"));
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range `{part}`"));
            }
            if b - a > 1 << 16 {
                return Err(format!("range `{part}` is too large"));
            }
            out.extend(a..=b);
        } else {
            out.push(num(part)?);
        }
    }
    Ok(Values(out))
}

fn load(path: &Path, convention: Option<Convention>) -> Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let scenario = parse_scenario(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(match convention {
        Some(c) => scenario.with_convention(c)?,
        None => scenario,
    })
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => stdout.write_all(bytes).context("writing to stdout"),
    }
}

pub fn cmd_run(args: &RunArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let mut scenario = load(&args.scenario, args.common.convention)?;
    if let Some(seed) = args.seed {
        scenario = scenario.with_seed(seed)?;
    }
    let report = scenario.run()?;
    let text = format!("{}recoverability: {}\n", report.to_text(), scenario.recoverability());
    emit(&args.common.out, stdout, text.as_bytes())?;
    Ok(if report.rounds.iter().all(|r| r.decode_ok) { Outcome::Success } else { Outcome::RecoveryFailure })
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    if args.n.0.is_empty() || args.t.0.is_empty() {
        bail!("--n and --t must name at least one value");
    }
    let usize_all = |v: &[u64]| v.iter().map(|&x| usize::try_from(x)).collect::<Result<Vec<_>, _>>();
    let ns = usize_all(&args.n.0)?;
    let ts = usize_all(&args.t.0)?;
    let qs = args
        .q
        .0
        .iter()
        .map(|&q| u32::try_from(q).map_err(|_| anyhow::anyhow!("q = {q} is too large")))
        .collect::<Result<Vec<_>>>()?;
    let out = harness::verify_grid(&ns, &ts, &qs, args.common.convention.unwrap_or_default())?;
    let mut buf = Vec::new();
    write_verify_csv(&mut buf, &out)?;
    emit(&args.common.out, stdout, &buf)?;
    Ok(Outcome::Success)
}

pub fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let template = load(&args.scenario, args.common.convention)?;
    let nodes: Option<Vec<String>> = args
        .nodes
        .as_ref()
        .map(|s| s.split(',').map(str::trim).filter(|n| !n.is_empty()).map(str::to_owned).collect());
    let seeds: Vec<u64> = (0..args.seeds).map(|k| args.seed.wrapping_add(k)).collect();
    let jobs = sweep_jobs(&template, &seeds, nodes.as_deref())?;
    log::info!("sweep: {} jobs", jobs.len());
    let rows = jobs
        .par_iter()
        .map(|(node, seed)| harness::run_job(&template, node, *seed))
        .collect::<nps_core::Result<Vec<_>>>()?;
    for (status, count) in harness::sweep_tally(&rows) {
        log::info!("recovered_all={status}: {count}");
    }
    let mut buf = Vec::new();
    write_session_csv(&mut buf, &rows)?;
    emit(&args.common.out, stdout, &buf)?;
    Ok(if rows.iter().any(|r| r.is_failure()) { Outcome::RecoveryFailure } else { Outcome::Success })
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<Outcome> {
    match &cli.command {
        Command::Run(a) => cmd_run(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
    }
}

/// Logging is off unless `NPS_LOG` is set (`error`..`trace`, or env_logger
/// filter syntax).
pub fn init_logging() {
    let env = env_logger::Env::new().filter("NPS_LOG").write_style("NPS_LOG_STYLE");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}
