//! Command-line front end.
//!
//! Exit codes: 0 all hard checks passed, 1 an explicit-constant violation,
//! 2 usage or configuration error, 3 numerical failure (including a failed
//! self-test oracle).

pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::funccalc::QuadratureScheme;
use crate::lemmas::{run_suite, SuiteConfig, DEFAULT_EMPIRICAL_CAP};
use crate::matcore::{AlgebraShape, Element};
use crate::mazur::MazurParams;
use crate::par::{cap_threads, Exec};
use crate::record::LemmaId;
use crate::search::{maximize, sweep, Budget, Cone, SearchResult};
use crate::selftest::{run_battery, BatteryConfig};
use report::Format;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const THREADS_ENV: &str = "MAZURLAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "mazurlab", version, about = "Numerical workbench for noncommutative Mazur maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the randomized inequality suite.
    Verify(VerifyArgs),
    /// Search for pairs with a large Hölder ratio.
    Search(SearchArgs),
    /// Run one search per (p, q) cell and tabulate the best ratios.
    Sweep(SweepArgs),
    /// Run the fixed oracle battery.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Comma-separated lemma names, or `all`.
    #[arg(long, default_value = "all")]
    lemma: String,
    /// Integer grid, e.g. `1..6` (inclusive) or `2,4,5`.
    #[arg(long, default_value = "1..6")]
    dims: String,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated θ values.
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Ratio cap for the empirical-constant checks.
    #[arg(long, default_value_t = DEFAULT_EMPIRICAL_CAP)]
    cap: f64,
    #[arg(long)]
    out: PathBuf,
    /// Defaults to the extension of `--out`.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Omit individual records from the report.
    #[arg(long)]
    summary_only: bool,
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConeArg {
    General,
    SelfAdjoint,
    Positive,
}

impl From<ConeArg> for Cone {
    fn from(c: ConeArg) -> Cone {
        match c {
            ConeArg::General => Cone::General,
            ConeArg::SelfAdjoint => Cone::SelfAdjoint,
            ConeArg::Positive => Cone::Positive,
        }
    }
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "general")]
    cone: ConeArg,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Comma-separated p values.
    #[arg(long)]
    p: String,
    /// Comma-separated q values.
    #[arg(long)]
    q: String,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "general")]
    cone: ConeArg,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// Optional JSON report of every oracle.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, hide = true)]
    debug_quadrature_nodes: Option<usize>,
    #[arg(long, hide = true)]
    debug_quadrature_half_width: Option<f64>,
}

/// Failure of a command, already mapped to an exit code.
#[derive(Debug)]
struct Exit {
    code: i32,
    message: String,
}

impl Exit {
    fn usage(message: impl Into<String>) -> Self {
        Exit { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE };
        Exit { code, message: e.to_string() }
    }
}

/// Parses `1..6` (inclusive), `2,4,5` or a mix such as `1..3,6`.
pub fn parse_int_grid(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| format!("bad range start in '{part}'"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad range end in '{part}'"))?;
            if a > b {
                return Err(format!("empty range '{part}'"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("'{part}' is not a nonnegative integer"))?);
        }
    }
    Ok(out)
}

/// Parses a comma-separated list of floats; ranges are not accepted.
pub fn parse_float_grid(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .map(|part| {
            if part.contains("..") {
                return Err(format!("'{part}': float grids must be comma lists"));
            }
            match part.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(format!("'{part}' is not a finite number")),
            }
        })
        .collect()
}

fn parse_lemmas(s: &str) -> Result<Vec<LemmaId>, String> {
    if s.trim() == "all" {
        return Ok(LemmaId::SUITE.to_vec());
    }
    s.split(',')
        .map(str::trim)
        .map(|name| {
            LemmaId::from_name(name)
                .filter(|l| LemmaId::SUITE.contains(l))
                .ok_or_else(|| format!("unknown lemma '{name}'"))
        })
        .collect()
}

fn exec(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn write_out(
    path: &Path,
    result: std::result::Result<(), Box<dyn std::error::Error>>,
) -> Result<(), Exit> {
    result.map_err(|e| Exit::usage(format!("cannot write {}: {e}", path.display())))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v}")).unwrap_or_else(|| "-".into())
}

fn verify(args: VerifyArgs) -> Result<i32, Exit> {
    let defaults = SuiteConfig::default();
    let grid = |s: &Option<String>, d: &Vec<f64>| -> Result<Vec<f64>, Exit> {
        match s {
            Some(s) => parse_float_grid(s).map_err(Exit::usage),
            None => Ok(d.clone()),
        }
    };
    let config = SuiteConfig {
        lemmas: parse_lemmas(&args.lemma).map_err(Exit::usage)?,
        dims: parse_int_grid(&args.dims).map_err(Exit::usage)?,
        trials: args.trials,
        seed: args.seed,
        thetas: grid(&args.theta, &defaults.thetas)?,
        ps: grid(&args.p, &defaults.ps)?,
        qs: grid(&args.q, &defaults.qs)?,
        alphas: grid(&args.alpha, &defaults.alphas)?,
        empirical_cap: args.cap,
        keep_records: !args.summary_only,
        exec: exec(args.sequential),
    };
    config.validate()?;
    let report = run_suite(&config)?;
    for s in &report.summary.cells {
        let prm = &s.cell.params;
        println!(
            "cell {} {} dim={} p={} q={} theta={} alpha={}: trials={} pass={} fail={} skipped={} errors={} max_ratio={}",
            s.cell.index,
            s.cell.lemma,
            s.cell.dim,
            fmt_opt(prm.p),
            fmt_opt(prm.q),
            fmt_opt(prm.theta),
            fmt_opt(prm.alpha),
            s.trials,
            s.passed,
            s.failed,
            s.skipped,
            s.errors,
            fmt_opt(s.max_ratio),
        );
    }
    let format = args.format.unwrap_or_else(|| Format::from_path(&args.out));
    write_out(&args.out, report::write_suite(&args.out, format, &report))?;
    let sum = &report.summary;
    println!(
        "verify: {} cells, {} explicit-constant violations, {} empirical cap exceedances, {} errors; report {}",
        sum.cells.len(),
        sum.failures,
        sum.empirical_exceedances,
        sum.errors,
        args.out.display()
    );
    Ok(if sum.failures > 0 {
        EXIT_VIOLATION
    } else if sum.errors > 0 {
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    })
}

/// Block matrices as `[row][col] = [re, im]`, with block weights.
#[derive(Debug, Serialize)]
pub struct ElementJson {
    pub weights: Vec<f64>,
    pub blocks: Vec<Vec<Vec<[f64; 2]>>>,
}

impl From<&Element> for ElementJson {
    fn from(e: &Element) -> Self {
        let weights = e.shape().blocks().iter().map(|b| b.weight).collect();
        let blocks = e
            .blocks()
            .iter()
            .map(|m| (0..m.dim()).map(|i| (0..m.dim()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect())
            .collect();
        ElementJson { weights, blocks }
    }
}

#[derive(Serialize)]
struct SearchReport<'a> {
    dim: usize,
    result: &'a SearchResult,
    best_pair: [ElementJson; 2],
}

fn search(args: SearchArgs) -> Result<i32, Exit> {
    let params = MazurParams::new(args.p, args.q)?;
    if args.dim == 0 {
        return Err(Exit::usage("--dim must be positive"));
    }
    let budget = Budget::new(args.restarts, args.iters)?;
    let shape = AlgebraShape::matrix(args.dim);
    let res = maximize(params, &shape, budget, args.cone.into(), args.seed, exec(args.sequential))?;
    println!(
        "search p={} q={} dim={}: best_ratio={} iterations={} restarts={} seed={}",
        args.p, args.q, args.dim, res.best_ratio, res.iterations, res.restarts, res.seed
    );
    let format = args.format.unwrap_or_else(|| Format::from_path(&args.out));
    let result = match format {
        Format::Json => {
            let best_pair = [ElementJson::from(&res.best_pair.0), ElementJson::from(&res.best_pair.1)];
            report::write_json(&args.out, &SearchReport { dim: args.dim, result: &res, best_pair })
        }
        Format::Csv => report::write_search(&args.out, format, &res),
    };
    write_out(&args.out, result)?;
    Ok(EXIT_OK)
}

fn sweep_cmd(args: SweepArgs) -> Result<i32, Exit> {
    let ps = parse_float_grid(&args.p).map_err(Exit::usage)?;
    let qs = parse_float_grid(&args.q).map_err(Exit::usage)?;
    if args.dim == 0 {
        return Err(Exit::usage("--dim must be positive"));
    }
    let budget = Budget::new(args.restarts, args.iters)?;
    let shape = AlgebraShape::matrix(args.dim);
    let rows: Vec<_> =
        sweep(&ps, &qs, &shape, budget, args.cone.into(), args.seed, exec(args.sequential))?.into_iter().map(|(r, _)| r).collect();
    for r in &rows {
        println!("sweep p={} q={}: best_ratio={} seed={} iters={}", r.p, r.q, r.best_ratio, r.seed, r.iters);
    }
    let format = args.format.unwrap_or_else(|| Format::from_path(&args.out));
    write_out(&args.out, report::write_sweep(&args.out, format, &rows))?;
    Ok(EXIT_OK)
}

fn selftest(args: SelftestArgs) -> Result<i32, Exit> {
    let mut scheme = QuadratureScheme::default();
    if args.debug_quadrature_nodes.is_some() || args.debug_quadrature_half_width.is_some() {
        scheme = QuadratureScheme::new(
            args.debug_quadrature_half_width.unwrap_or(scheme.half_width),
            args.debug_quadrature_nodes.unwrap_or(scheme.nodes),
        )?;
    }
    if args.instances == 0 {
        return Err(Exit::usage("--instances must be positive"));
    }
    let config = BatteryConfig { scheme, instances: args.instances, ..Default::default() };
    let checks = match run_battery(&config) {
        Ok(c) => c,
        Err(e) => {
            return Err(Exit { code: EXIT_NUMERICAL, message: format!("oracle battery aborted: {e}") });
        }
    };
    for c in &checks {
        let status = if c.passed { "ok  " } else { "FAIL" };
        println!("{status} {}: {:e} (allowed [{:e}, {:e}])", c.name, c.value, c.lo, c.hi);
    }
    if let Some(out) = &args.out {
        write_out(out, report::write_json(out, &checks))?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("selftest: {} oracles, {} failed", checks.len(), failed);
    Ok(if failed == 0 { EXIT_OK } else { EXIT_NUMERICAL })
}

fn apply_thread_cap() -> Result<(), Exit> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                cap_threads(n);
                Ok(())
            }
            _ => Err(Exit::usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(Exit::usage(format!("{THREADS_ENV}: {e}"))),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = apply_thread_cap().and_then(|()| match cli.command {
        Command::Verify(a) => verify(a),
        Command::Search(a) => search(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Selftest(a) => selftest(a),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_grids() {
        assert_eq!(parse_int_grid("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_int_grid("2,5").unwrap(), vec![2, 5]);
        assert_eq!(parse_int_grid("1..2,6").unwrap(), vec![1, 2, 6]);
        assert!(parse_int_grid("3..1").is_err());
        assert!(parse_int_grid("1.5").is_err());
    }

    #[test]
    fn float_grids() {
        assert_eq!(parse_float_grid("1,1.5, 2").unwrap(), vec![1.0, 1.5, 2.0]);
        assert!(parse_float_grid("1..2").is_err());
        assert!(parse_float_grid("inf").is_err());
        assert!(parse_float_grid("").is_err());
    }

    #[test]
    fn lemma_names() {
        assert_eq!(parse_lemmas("all").unwrap().len(), 10);
        assert_eq!(parse_lemmas("jensen_chain").unwrap(), vec![LemmaId::JensenChain]);
        assert!(parse_lemmas("holder_self_test").is_err());
        assert!(parse_lemmas("nope").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["mazurlab", "verify", "--trials", "5"]), EXIT_USAGE);
        assert_eq!(run(["mazurlab", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["mazurlab", "search", "--p", "1", "--q", "2", "--out", "x.json", "--bogus"]), EXIT_USAGE);
    }
}
