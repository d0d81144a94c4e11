//! Command-line front end.
//!
//! `--config FILE` reads `key = value` lines whose keys are the long flag
//! names of the chosen subcommand; flags given on the command line win, and a
//! repeatable flag given on the command line replaces all of its config
//! entries.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::ed_oracle::{compare_with_free_fermion, MAX_SITES};
use crate::error::{Error, Result};
use crate::free_fermion::ChainSpec;
use crate::output::{emit, payload_digest, render, Format};
use crate::repro::{figure, file_stem};
use crate::scan::{parse_grid, run_scan, KappaRule, ModelSpec, Observable, ScanSeries, ScanSpec};

/// Deviation above which `ed-check` reports a numerical failure.
pub const ORACLE_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "chainent",
    version,
    about = "Pair entanglement in boundary-coupled Ising chains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep λ for a chain and report pair observables.
    ChainScan(ChainArgs),
    /// All pair observables at a single λ.
    ChainPoint(ChainArgs),
    /// Compare the free-fermion pipeline against exact diagonalization.
    EdCheck(EdArgs),
    /// Sweep α for the dissipative two-level system.
    TlsScan(TlsArgs),
    /// Regenerate the data behind one figure.
    Repro(ReproArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, default_value = "csv")]
    pub format: String,
    /// Output file (directory for `repro`); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = default_workers())]
    pub workers: usize,
    /// Assert that no random numbers are used (none are).
    #[arg(long)]
    pub seedless: bool,
    /// key = value file with defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long, default_value_t = 101)]
    pub n: usize,
    /// v or a:b:points
    #[arg(long, default_value = "0:2.4:121")]
    pub lambda: String,
    /// v, or <c>x for κ = cλ
    #[arg(long, default_value = "0")]
    pub kappa: String,
    /// i,j (repeatable)
    #[arg(long = "pair")]
    pub pairs: Vec<String>,
    /// c, c_star, total_order, xx, yy, zz (repeatable)
    #[arg(long = "observable")]
    pub observables: Vec<String>,
    /// Append d/dλ columns.
    #[arg(long)]
    pub derivative: bool,
    /// Plain finite differences without the half-step refinement.
    #[arg(long)]
    pub no_richardson: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EdArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value = "0:2:11")]
    pub lambda: String,
    #[arg(long, default_value = "0")]
    pub kappa: String,
    #[arg(long = "pair")]
    pub pairs: Vec<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TlsArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega_c: f64,
    /// v or a:b:points
    #[arg(long, default_value = "0:2:201")]
    pub alpha: String,
    #[arg(long, default_value_t = 1.0)]
    pub c0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
    #[arg(long, default_value_t = 0.05)]
    pub kt_window: f64,
    /// Use the α ~ 1 energy line on [1 − kt_window, 1].
    #[arg(long)]
    pub kt_overlay: bool,
    /// energy, sigma_x, concurrence (repeatable)
    #[arg(long = "observable")]
    pub observables: Vec<String>,
    #[arg(long)]
    pub derivative: bool,
    #[arg(long)]
    pub no_richardson: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    /// fig-boundary, fig-nextnearest, fig-kopplung, fig-kopplung2,
    /// fig-finite-size or fig-tls
    pub figure: String,
    #[arg(long, default_value = "json")]
    pub format: String,
    /// Output directory.
    #[arg(long, default_value = "repro-out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = default_workers())]
    pub workers: usize,
    #[arg(long)]
    pub seedless: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

const SWITCHES: [&str; 4] = ["derivative", "no-richardson", "seedless", "kt-overlay"];

fn parse_config(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut entries = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Format {
            path: path.to_path_buf(),
            message: format!("line {}: expected key = value", k + 1),
        })?;
        let key = key.trim().trim_start_matches("--");
        if key == "config" {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: format!("line {}: nested config files are not supported", k + 1),
            });
        }
        entries.push((key.to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

fn config_path(args: &[String]) -> Option<PathBuf> {
    args.iter().enumerate().find_map(|(k, a)| {
        if a == "--config" {
            args.get(k + 1).map(PathBuf::from)
        } else {
            a.strip_prefix("--config=").map(PathBuf::from)
        }
    })
}

/// Splices config entries in after the subcommand name, skipping keys the
/// command line already sets.
fn merge_config(args: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    let given = |key: &str| {
        let flag = format!("--{key}");
        let prefix = format!("--{key}=");
        args.iter().any(|a| *a == flag || a.starts_with(&prefix))
    };
    let mut extra = Vec::new();
    for (key, value) in parse_config(&text, &path)? {
        if given(&key) {
            continue;
        }
        if SWITCHES.contains(&key.as_str()) {
            match value.as_str() {
                "true" | "yes" | "1" => extra.push(format!("--{key}")),
                "false" | "no" | "0" => {}
                _ => {
                    return Err(Error::Format {
                        path,
                        message: format!("'{key}' expects true or false, got '{value}'"),
                    })
                }
            }
        } else if key == "figure" {
            return Err(Error::Format {
                path,
                message: "the figure name must be given on the command line".into(),
            });
        } else {
            extra.push(format!("--{key}={value}"));
        }
    }
    // args[0] is the program, args[1] the subcommand.
    let at = args.len().min(2);
    let mut merged = args[..at].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[at..]);
    Ok(merged)
}

fn parse_pairs(raw: &[String], default: &[(usize, usize)]) -> Result<Vec<(usize, usize)>> {
    if raw.is_empty() {
        return Ok(default.to_vec());
    }
    raw.iter()
        .map(|s| {
            let bad = || Error::Input(format!("cannot parse pair '{s}', expected i,j"));
            let (i, j) = s.split_once(',').ok_or_else(bad)?;
            Ok((
                i.trim().parse().map_err(|_| bad())?,
                j.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

fn parse_observables(raw: &[String], default: &[Observable]) -> Result<Vec<Observable>> {
    if raw.is_empty() {
        return Ok(default.to_vec());
    }
    raw.iter().map(|s| s.parse()).collect()
}

fn check_workers(workers: usize) -> Result<()> {
    if workers == 0 {
        return Err(Error::Input("--workers must be at least 1".into()));
    }
    Ok(())
}

fn stamp(mut series: ScanSeries) -> ScanSeries {
    series.metadata.timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .ok()
        .map(|d| d.as_secs());
    series
}

fn write_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let io = |source| Error::Io {
                path: path.to_path_buf(),
                source,
            };
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(io)?;
            }
            std::fs::write(path, text).map_err(io)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn deliver(series: ScanSeries, output: &OutputArgs) -> Result<()> {
    let format: Format = output.format.parse()?;
    let series = stamp(series);
    match &output.out {
        Some(path) => emit(&series, format, path),
        None => write_text(&render(&series, format)?, None),
    }
}

fn chain_spec(args: &ChainArgs, point: bool) -> Result<ScanSpec> {
    let grid = parse_grid(&args.lambda)?;
    if point && grid.len() != 1 {
        return Err(Error::Input(
            "chain-point takes a single --lambda value".into(),
        ));
    }
    if point && args.derivative {
        return Err(Error::Input(
            "chain-point has no derivative; use chain-scan".into(),
        ));
    }
    let kappa: KappaRule = args.kappa.parse()?;
    let default_obs: &[Observable] = if point {
        &Observable::CHAIN
    } else {
        &[Observable::C]
    };
    let spec = ScanSpec {
        model: ModelSpec::Chain {
            n_sites: args.n,
            kappa,
        },
        grid,
        pairs: parse_pairs(&args.pairs, &[(1, 2)])?,
        outputs: parse_observables(&args.observables, default_obs)?,
        derivative: args.derivative,
        richardson: !args.no_richardson,
    };
    spec.validate()?;
    Ok(spec)
}

fn tls_spec(args: &TlsArgs) -> Result<ScanSpec> {
    let spec = ScanSpec {
        model: ModelSpec::Tls {
            delta: args.delta,
            omega_c: args.omega_c,
            c0: args.c0,
            c1: args.c1,
            c2: args.c2,
            kt_window: args.kt_window,
            kt_overlay: args.kt_overlay,
        },
        grid: parse_grid(&args.alpha)?,
        pairs: Vec::new(),
        outputs: parse_observables(&args.observables, &[Observable::Concurrence])?,
        derivative: args.derivative,
        richardson: !args.no_richardson,
    };
    spec.validate()?;
    Ok(spec)
}

fn ed_check(args: &EdArgs) -> Result<()> {
    check_workers(args.output.workers)?;
    if args.n > MAX_SITES {
        return Err(Error::Input(format!(
            "ed-check supports N <= {MAX_SITES}, got {}",
            args.n
        )));
    }
    let format: Format = args.output.format.parse()?;
    let kappa: KappaRule = args.kappa.parse()?;
    let grid = parse_grid(&args.lambda)?;
    let default_pairs: Vec<(usize, usize)> = (1..=3)
        .filter(|d| 1 + d <= args.n)
        .map(|d| (1, 1 + d))
        .collect();
    let pairs = parse_pairs(&args.pairs, &default_pairs)?;
    let mut records = Vec::new();
    let mut worst: f64 = 0.0;
    for &lambda in &grid {
        let spec = ChainSpec::new(args.n, lambda, kappa.resolve(lambda))?;
        for row in compare_with_free_fermion(&spec, &pairs)? {
            worst = worst.max(row.deviation());
            records.push((lambda, row));
        }
    }
    let text = match format {
        Format::Csv => {
            let mut s = String::from("lambda,quantity,pair,free_fermion,exact,deviation\n");
            for (lambda, r) in &records {
                let pair = r.pair.map(|(i, j)| format!("{i}-{j}")).unwrap_or_default();
                s.push_str(&format!(
                    "{lambda},{},{pair},{},{},{}\n",
                    r.quantity,
                    r.free_fermion,
                    r.exact,
                    r.deviation()
                ));
            }
            s
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = records
                .iter()
                .map(|(lambda, r)| serde_json::json!({ "lambda": lambda, "row": r }))
                .collect();
            let doc = serde_json::json!({
                "n_sites": args.n,
                "kappa": kappa,
                "tolerance": ORACLE_TOL,
                "max_deviation": worst,
                "rows": rows,
            });
            serde_json::to_string_pretty(&doc).expect("json value serializes") + "\n"
        }
    };
    write_text(&text, args.output.out.as_deref())?;
    if worst > ORACLE_TOL {
        return Err(Error::Consistency(format!(
            "free-fermion and exact results differ by {worst:e} (tolerance {ORACLE_TOL:e})"
        )));
    }
    eprintln!("max deviation {worst:e}");
    Ok(())
}

fn repro(args: &ReproArgs) -> Result<()> {
    check_workers(args.workers)?;
    let format: Format = args.format.parse()?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    for (label, spec) in figure(&args.figure)? {
        let series = stamp(run_scan(&spec, args.workers)?);
        let path = args
            .out
            .join(format!("{}.{ext}", file_stem(&args.figure, &label)));
        emit(&series, format, &path)?;
        println!("{}  {}", payload_digest(&series)?, path.display());
        if !series.metadata.errors.is_empty() {
            eprintln!(
                "{}: {} grid points failed",
                path.display(),
                series.metadata.errors.len()
            );
        }
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::ChainScan(args) | Command::ChainPoint(args) if args.output.workers == 0 => {
            check_workers(0)
        }
        Command::ChainScan(args) => {
            let series = run_scan(&chain_spec(&args, false)?, args.output.workers)?;
            deliver(series, &args.output)
        }
        Command::ChainPoint(args) => {
            let series = run_scan(&chain_spec(&args, true)?, 1)?;
            deliver(series, &args.output)
        }
        Command::EdCheck(args) => ed_check(&args),
        Command::TlsScan(args) => {
            check_workers(args.output.workers)?;
            let series = run_scan(&tls_spec(&args)?, args.output.workers)?;
            deliver(series, &args.output)
        }
        Command::Repro(args) => repro(&args),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run(args: Vec<String>) -> i32 {
    let merged = match merge_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(merged) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
