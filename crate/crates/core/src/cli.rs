//! The `jetcount` command line.
//!
//! Settings resolve as flags, then the `--config` TOML file, then defaults.
//! Whenever an output directory is in effect the resolved settings are
//! written to `config.toml` inside it, and feeding that file back through
//! `--config` reproduces the same artifacts.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::count::{count_points_jetring, count_points_naive, count_points_tree, Method};
use crate::defs::Definitions;
use crate::diagnostics::{diagnose_json, scan_gh, FiberPolicy, ScanSpec, DEFAULT_CAP, DEFAULT_SEED};
use crate::error::Error;
use crate::limits::{Limits, DEFAULT_BUDGET, DEFAULT_PRIME_FLOOR};
use crate::measures::gh_record;
use crate::presburger::{classify_nonneg, eval_constructible, sup_over_domain, ConstructibleFunction, NonNeg, Supremum};
use crate::scheme::{jet_morphism, jet_prolong};

pub const TABLE_FILE: &str = "gh_table.csv";
pub const VERDICT_FILE: &str = "verdicts.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const DEFAULT_OUT: &str = "jetcount-out";

#[derive(Parser, Debug)]
#[command(name = "jetcount", version, about = "Jet schemes, point counts over Z/p^k and g/h diagnostics")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct CommonFlags {
    /// TOML file with default settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Definition file with schemes and morphisms.
    #[arg(long, global = true)]
    pub defs: Option<PathBuf>,
    /// Comma-separated primes.
    #[arg(long, global = true, value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    #[arg(long, global = true)]
    pub kmax: Option<u32>,
    /// Fiber sample size per (p, k).
    #[arg(long, global = true)]
    pub cap: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Work budget per count, in evaluation steps.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[arg(long, global = true)]
    pub prime_floor: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to machine parallelism.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// naive, tree or auto.
    #[arg(long, global = true)]
    pub method: Option<Method>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the equations of J_k of a scheme, or the components of J_k of a morphism.
    Jet {
        #[arg(long, conflicts_with = "morphism")]
        scheme: Option<String>,
        #[arg(long)]
        morphism: Option<String>,
        /// Jet level; defaults to kmax.
        #[arg(short, long)]
        k: Option<u32>,
    },
    /// Count points of a scheme over Z/p^k, or over F_p[t]/(t^k) with --jet-ring.
    Count {
        #[arg(long)]
        scheme: Option<String>,
        #[arg(short, long)]
        k: Option<u32>,
        #[arg(long)]
        jet_ring: bool,
    },
    /// Count one fiber and print g and h.
    Fiber {
        #[arg(long)]
        morphism: Option<String>,
        /// Target point, colon-separated (`0:1`).
        #[arg(long)]
        y: String,
        #[arg(short, long)]
        k: Option<u32>,
    },
    /// Scan g and h over primes, levels and fibers into a CSV table.
    Table(ScanArgs),
    /// Scan and emit all three verdicts as JSON.
    Diagnose(ScanArgs),
    /// Constructible-function queries.
    Presburger {
        #[command(subcommand)]
        query: PresburgerQuery,
    },
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub morphism: Option<String>,
    /// Fixed target point, colon-separated and repeatable; all fibers when absent.
    #[arg(long = "y")]
    pub points: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum PresburgerQuery {
    /// Exact value at (q, s).
    Eval {
        expr: String,
        #[arg(long)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
    },
    /// Supremum over the domain at fixed q.
    Sup {
        expr: String,
        #[arg(long)]
        q: String,
    },
    /// Non-negativity: yes, unknown or a counterexample.
    Classify { expr: String },
}

/// Settings after merging flags, config file and defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defs: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime_floor: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    /// Level for jet, count and fiber.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morphism: Option<String>,
    /// Fixed target points for scans; all fibers when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<u64>>>,
}

impl RunConfig {
    fn overlay(self, top: RunConfig) -> RunConfig {
        RunConfig {
            defs: top.defs.or(self.defs),
            primes: top.primes.or(self.primes),
            kmax: top.kmax.or(self.kmax),
            cap: top.cap.or(self.cap),
            seed: top.seed.or(self.seed),
            budget: top.budget.or(self.budget),
            prime_floor: top.prime_floor.or(self.prime_floor),
            out: top.out.or(self.out),
            jobs: top.jobs.or(self.jobs),
            method: top.method.or(self.method),
            k: top.k.or(self.k),
            scheme: top.scheme.or(self.scheme),
            morphism: top.morphism.or(self.morphism),
            points: top.points.or(self.points),
        }
    }

    fn limits(&self) -> Limits {
        Limits {
            budget: self.budget.unwrap_or(DEFAULT_BUDGET),
            prime_floor: self.prime_floor.unwrap_or(DEFAULT_PRIME_FLOOR),
        }
    }

    fn primes(&self) -> Result<Vec<u64>, CliError> {
        match &self.primes {
            Some(p) if !p.is_empty() => Ok(p.clone()),
            _ => Err(CliError::Config("no primes given (use --primes or `primes` in the config)".into())),
        }
    }

    fn level(&self) -> Result<u32, CliError> {
        self.k
            .or(self.kmax)
            .ok_or_else(|| CliError::Config("no level given (use -k or --kmax)".into()))
    }

    fn definitions(&self) -> Result<Definitions, CliError> {
        let path = self
            .defs
            .as_ref()
            .ok_or_else(|| CliError::Config("no definition file given (use --defs)".into()))?;
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.clone(), e))?;
        Definitions::parse(&text).map_err(|e| CliError::File(path.clone(), e))
    }
}

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    File(PathBuf, Error),
    Io(PathBuf, std::io::Error),
    Config(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::File(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Config(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    /// 1 for a refused budget, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) | CliError::File(_, e) if e.is_budget() => 1,
            _ => 2,
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn parse_point(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(':')
        .map(|c| {
            c.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Config(format!("`{text}` is not a point (use colon-separated naturals)")))
        })
        .collect()
}

fn parse_q(text: &str) -> Result<BigRational, CliError> {
    let bad = || CliError::Config(format!("--q: `{text}` is not a rational"));
    let (n, d) = text.split_once('/').unwrap_or((text, "1"));
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn prepare_out(cfg: &RunConfig) -> Result<Option<PathBuf>, CliError> {
    let Some(dir) = &cfg.out else { return Ok(None) };
    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.clone(), e))?;
    let echo = toml::to_string(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    write_file(&dir.join(CONFIG_FILE), &echo)?;
    Ok(Some(dir.clone()))
}

/// Parses `args` (program name first) and runs the command, writing results
/// to `stdout`. Returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let base = match &cli.common.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    let c = &cli.common;
    let mut flags = RunConfig {
        defs: c.defs.clone(),
        primes: c.primes.clone(),
        kmax: c.kmax,
        cap: c.cap,
        seed: c.seed,
        budget: c.budget,
        prime_floor: c.prime_floor,
        out: c.out.clone(),
        jobs: c.jobs,
        method: c.method,
        ..RunConfig::default()
    };
    match &cli.command {
        Command::Jet { scheme, morphism, k } => {
            flags.scheme = scheme.clone();
            flags.morphism = morphism.clone();
            flags.k = *k;
        }
        Command::Count { scheme, k, .. } => {
            flags.scheme = scheme.clone();
            flags.k = *k;
        }
        Command::Fiber { morphism, k, .. } => {
            flags.morphism = morphism.clone();
            flags.k = *k;
        }
        Command::Table(a) | Command::Diagnose(a) => {
            flags.morphism = a.morphism.clone();
            if !a.points.is_empty() {
                flags.points = Some(a.points.iter().map(|t| parse_point(t)).collect::<Result<_, _>>()?);
            }
        }
        Command::Presburger { .. } => {}
    }
    let mut cfg = base.overlay(flags);
    if matches!(cli.command, Command::Table(_) | Command::Diagnose(_)) && cfg.out.is_none() {
        cfg.out = Some(PathBuf::from(DEFAULT_OUT));
    }
    Ok(cfg)
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve(&cli)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    let text = pool.install(|| dispatch(&cli.command, &cfg))?;
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e))
}

/// Runs the command and returns what goes to stdout.
fn dispatch(command: &Command, cfg: &RunConfig) -> Result<String, CliError> {
    let mut out = String::new();
    let limits = cfg.limits();
    let method = cfg.method.unwrap_or(Method::Auto);
    match command {
        Command::Jet { .. } => {
            let defs = cfg.definitions()?;
            let k = cfg.level()?;
            let lines: Vec<String> = if cfg.morphism.is_some() {
                let sys = jet_morphism(defs.morphism(cfg.morphism.as_deref())?, k);
                let phi = sys.morphism.expect("jet of a morphism");
                phi.components().iter().map(|c| c.to_string()).collect()
            } else {
                let sys = jet_prolong(defs.scheme(cfg.scheme.as_deref())?, k);
                sys.scheme.equations().iter().map(|e| e.to_string()).collect()
            };
            let text: String = lines.iter().map(|l| format!("{l}\n")).collect();
            out.push_str(&text);
            if let Some(dir) = prepare_out(cfg)? {
                write_file(&dir.join("jet.txt"), &text)?;
            }
        }
        Command::Count { jet_ring, .. } => {
            let defs = cfg.definitions()?;
            let x = defs.scheme(cfg.scheme.as_deref())?;
            let k = cfg.level()?;
            let primes = cfg.primes()?;
            let mut text = String::new();
            for &p in &primes {
                let r = if *jet_ring {
                    count_points_jetring(x, p, k, &limits)?
                } else {
                    match method {
                        Method::Naive => count_points_naive(x, p, k, &limits)?,
                        Method::Tree | Method::Auto => count_points_tree(x, p, k, &limits)?,
                    }
                };
                if primes.len() == 1 {
                    text.push_str(&format!("{}\n", r.count));
                } else {
                    text.push_str(&format!("p={p} {}\n", r.count));
                }
            }
            out.push_str(&text);
            if let Some(dir) = prepare_out(cfg)? {
                write_file(&dir.join("count.txt"), &text)?;
            }
        }
        Command::Fiber { y, .. } => {
            let y = parse_point(y)?;
            let defs = cfg.definitions()?;
            let phi = defs.morphism(cfg.morphism.as_deref())?;
            let k = cfg.level()?;
            let mut text = String::new();
            for &p in &cfg.primes()? {
                let rec = gh_record(phi, &y, p, k, method, &limits)?;
                text.push_str(&format!(
                    "p={p} k={k} y={} count={} singular={} g={} h={}\n",
                    rec.y_label(),
                    rec.raw_count,
                    rec.singular_count,
                    rec.g,
                    rec.h
                ));
            }
            out.push_str(&text);
            if let Some(dir) = prepare_out(cfg)? {
                write_file(&dir.join("fiber.txt"), &text)?;
            }
        }
        Command::Table(_) | Command::Diagnose(_) => {
            let defs = cfg.definitions()?;
            let phi = defs.morphism(cfg.morphism.as_deref())?.clone();
            let k_max = cfg.kmax.ok_or_else(|| CliError::Config("no --kmax given".into()))?;
            let mut spec = ScanSpec::new(phi, cfg.primes()?, k_max).with_limits(limits);
            spec.cap = cfg.cap.unwrap_or(DEFAULT_CAP);
            spec.seed = cfg.seed.unwrap_or(DEFAULT_SEED);
            spec.method = method;
            if let Some(points) = &cfg.points {
                spec = spec.with_fibers(FiberPolicy::Points(points.clone()));
            }
            let table = scan_gh(&spec)?;
            if table.records.is_empty() && table.truncated {
                return Err(Error::Budget {
                    required: format!("{} cells", table.skipped.len()),
                    allowed: limits.budget,
                }
                .into());
            }
            let dir = prepare_out(cfg)?.expect("scans always have an output directory");
            write_file(&dir.join(TABLE_FILE), &table.to_csv())?;
            let mut summary = format!(
                "{} rows written to {}\n",
                table.records.len(),
                dir.join(TABLE_FILE).display()
            );
            if matches!(command, Command::Diagnose(_)) {
                let report = diagnose_json(&table)?;
                let body = serde_json::to_string_pretty(&report).expect("json") + "\n";
                write_file(&dir.join(VERDICT_FILE), &body)?;
                for v in report["verdicts"].as_array().expect("verdict list") {
                    summary.push_str(&format!("{}: {}\n", v["kind"].as_str().unwrap_or(""), v["outcome"].as_str().unwrap_or("")));
                }
            }
            if table.truncated {
                summary.push_str(&format!("{} cells skipped by the budget\n", table.skipped.len()));
            }
            out.push_str(&summary);
        }
        Command::Presburger { query } => {
            let (expr, result) = match query {
                PresburgerQuery::Eval { expr, q, s } => {
                    let f = ConstructibleFunction::parse(expr)?;
                    let v = eval_constructible(&f, &parse_q(q)?, *s)?;
                    (expr, json!({ "query": "eval", "q": q, "s": s, "value": v.to_string() }))
                }
                PresburgerQuery::Sup { expr, q } => {
                    let f = ConstructibleFunction::parse(expr)?;
                    let body = match sup_over_domain(&f, &parse_q(q)?)? {
                        Supremum::Bounded { sup, argmax, tail_bound } => json!({
                            "bounded": true, "sup": sup.to_string(), "argmax": argmax, "tail_bound": tail_bound,
                        }),
                        Supremum::Unbounded { term, witness_s, witness_value } => json!({
                            "bounded": false, "term": term, "witness_s": witness_s,
                            "witness_value": witness_value.to_string(),
                        }),
                    };
                    (expr, json!({ "query": "sup", "q": q, "result": body }))
                }
                PresburgerQuery::Classify { expr } => {
                    let f = ConstructibleFunction::parse(expr)?;
                    let body = match classify_nonneg(&f) {
                        NonNeg::Yes => json!({ "answer": "yes" }),
                        NonNeg::Unknown => json!({ "answer": "unknown" }),
                        NonNeg::Counterexample { s, q, value } => json!({
                            "answer": "counterexample", "s": s, "q": q.to_string(), "value": value.to_string(),
                        }),
                    };
                    (expr, body)
                }
            };
            let mut doc = result;
            doc["function"] = json!(ConstructibleFunction::parse(expr)?.to_string());
            let body = serde_json::to_string_pretty(&doc).expect("json") + "\n";
            out.push_str(&body);
            if let Some(dir) = prepare_out(cfg)? {
                write_file(&dir.join("presburger.json"), &body)?;
            }
        }
    }
    Ok(out)
}
