//! Reproducibility surface: one subcommand per experiment, CSV or JSON data
//! rows, and a JSON manifest sidecar next to every output file.
//!
//! Exit codes: 0 success, 2 usage or parameter error, 3 resource limit,
//! 4 internal assertion (oracle mismatch). Identical flag sets produce
//! byte-identical data rows; wall time lives only in the manifest.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::experiments::{
    enumerate_well_constructed, estimate_from_records, oracle_check, run_hitting_trials,
    sample_degree_counts, supercritical_component, threshold_sweep, Model,
};
use crate::model::{Params, RNG_IDENTITY};
use crate::statistics::CnParameterization;
use crate::Error;

const SEED_SCHEME: &str = "trial t uses seed + t; sweep row r uses seed + r*trials + t";

#[derive(Parser)]
#[command(
    name = "hyperlab",
    version,
    about = "Random k-uniform hypergraph laboratory: j-connectivity experiments",
    long_about = "Vertices are 0-based integers 0..n. All randomness is ChaCha12, seeded \
                  from the --seed flag; rerunning a command with identical flags reproduces \
                  its data rows byte for byte."
)]
struct Cli {
    /// Plain key=value file supplying defaults for any flag; command-line
    /// flags win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Worker thread count (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Data format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write data rows here and a `<PATH>.manifest.json` sidecar.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run hitting-time trials along the edge-arrival process.
    Hitting {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sample D_s (j-sets of degree s) against the exact expectation and
    /// the Poisson law.
    DegreeDist {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        s: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sweep c over a grid and report connectivity fractions per row.
    Sweep {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        j: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        c_from: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c_to: Option<f64>,
        #[arg(long)]
        c_step: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// binomial or uniform (uniform uses M = round(p * C(n,k))).
        #[arg(long)]
        model: Option<String>,
    },
    /// Compare the incremental tracker against the walk-definition oracle
    /// on random instances.
    OracleCheck {
        #[arg(long)]
        instances: Option<u64>,
        #[arg(long)]
        max_n: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Count well-constructed hypergraphs per j-size, up to isomorphism.
    EnumerateWc {
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        max_jsize: Option<u64>,
    },
    /// Largest-component diagnostics just above the component threshold.
    Component {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::MemoryCap { .. } | Error::EnumerationBudget(_) | Error::Io(_) => 3,
            Error::Internal(_) => 4,
            _ => 2,
        };
        Failure { code, message: err.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

/// key=value config file; `#` starts a comment line.
fn load_config(path: &Path) -> CliResult<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key=value", lineno + 1)))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Flag resolution: command line beats config file beats default.
struct Resolver {
    cfg: HashMap<String, String>,
}

impl Resolver {
    fn required<T: FromStr>(&self, cli: Option<T>, key: &str) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        match (cli, self.cfg.get(key)) {
            (Some(v), _) => Ok(v),
            (None, Some(raw)) => raw
                .parse()
                .map_err(|e| usage(format!("config value {key}={raw}: {e}"))),
            (None, None) => Err(usage(format!("missing required flag --{key}"))),
        }
    }

    fn optional<T: FromStr>(&self, cli: Option<T>, key: &str, default: T) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        match (cli, self.cfg.get(key)) {
            (Some(v), _) => Ok(v),
            (None, Some(raw)) => raw
                .parse()
                .map_err(|e| usage(format!("config value {key}={raw}: {e}"))),
            (None, None) => Ok(default),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("format must be csv or json, got {other:?}")),
        }
    }
}

#[derive(serde::Serialize)]
struct RunManifest {
    command_line: Vec<String>,
    parameters: serde_json::Value,
    seed_scheme: &'static str,
    generator: &'static str,
    artifact: String,
    wall_time_secs: f64,
}

fn emit(out: &Option<PathBuf>, data: &str, manifest: &RunManifest) -> CliResult<()> {
    match out {
        Some(path) => {
            std::fs::write(path, data).map_err(Error::Io)?;
            let sidecar = PathBuf::from(format!("{}.manifest.json", path.display()));
            let body = serde_json::to_string_pretty(manifest)
                .map_err(|e| Error::Internal(format!("manifest serialization: {e}")))?;
            std::fs::write(&sidecar, body).map_err(Error::Io)?;
        }
        None => print!("{data}"),
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    let started = Instant::now();
    let cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => HashMap::new(),
    };
    let resolver = Resolver { cfg };

    let threads = resolver.optional(cli.threads, "threads", 0)?;
    if threads > 0 {
        // Ignore failure: the global pool may already exist in-process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let format: Format = {
        let raw = resolver.optional(cli.format.clone(), "format", "csv".to_string())?;
        raw.parse().map_err(usage)?
    };
    let out: Option<PathBuf> = cli
        .out
        .clone()
        .or_else(|| resolver.cfg.get("out").map(PathBuf::from));

    let command_line: Vec<String> = std::env::args().collect();
    let manifest = |parameters: serde_json::Value| RunManifest {
        command_line: command_line.clone(),
        parameters,
        seed_scheme: SEED_SCHEME,
        generator: RNG_IDENTITY,
        artifact: format!("hyperlab {}", env!("CARGO_PKG_VERSION")),
        wall_time_secs: started.elapsed().as_secs_f64(),
    };

    match cli.command {
        Command::Hitting { n, k, j, trials, seed } => {
            let n = resolver.required(n, "n")?;
            let k = resolver.required(k, "k")?;
            let j = resolver.required(j, "j")?;
            let trials = resolver.required(trials, "trials")?;
            let seed = resolver.optional(seed, "seed", 0)?;
            if trials == 0 {
                return Err(usage("--trials must be >= 1"));
            }
            let params = Params::new(n, k, j)?;
            let records = run_hitting_trials(params, trials, seed)?;
            let est = estimate_from_records(&records);

            let data = match format {
                Format::Csv => {
                    let mut s = String::from("trial,seed,tau_i,tau_c,equal\n");
                    for (t, r) in records.iter().enumerate() {
                        let _ = writeln!(
                            s,
                            "{t},{},{},{},{}",
                            r.seed,
                            r.tau_i,
                            r.tau_c,
                            u8::from(r.coincided())
                        );
                    }
                    let _ = writeln!(
                        s,
                        "# summary trials={} coincidences={} point={} ci_low={} ci_high={}",
                        est.trials, est.coincidences, est.point, est.ci_low, est.ci_high
                    );
                    s
                }
                Format::Json => {
                    let rows: Vec<serde_json::Value> = records
                        .iter()
                        .enumerate()
                        .map(|(t, r)| {
                            serde_json::json!({
                                "trial": t,
                                "seed": r.seed,
                                "tau_i": r.tau_i,
                                "tau_c": r.tau_c,
                                "equal": r.coincided(),
                            })
                        })
                        .collect();
                    let body = serde_json::json!({ "rows": rows, "summary": est });
                    format!("{}\n", serde_json::to_string_pretty(&body).unwrap())
                }
            };
            emit(
                &out,
                &data,
                &manifest(serde_json::json!({
                    "command": "hitting", "n": n, "k": k, "j": j,
                    "trials": trials, "seed": seed,
                })),
            )?;
            Ok(0)
        }

        Command::DegreeDist { n, k, j, s, c, trials, seed } => {
            let n = resolver.required(n, "n")?;
            let k = resolver.required(k, "k")?;
            let j = resolver.required(j, "j")?;
            let s = resolver.required(s, "s")?;
            let c = resolver.required(c, "c")?;
            let trials = resolver.required(trials, "trials")?;
            let seed = resolver.optional(seed, "seed", 0)?;
            if trials == 0 {
                return Err(usage("--trials must be >= 1"));
            }
            let params = Params::new(n, k, j)?;
            let cp = CnParameterization::new(s, c)?;
            let report = sample_degree_counts(params, cp, trials, seed)?;

            let data = match format {
                Format::Csv => {
                    let mut text = String::from("trial,D_s\n");
                    for (t, d) in report.observations.iter().enumerate() {
                        let _ = writeln!(text, "{t},{d}");
                    }
                    let _ = writeln!(
                        text,
                        "# summary mean={} exact_expectation={} limit_lambda={} tv_to_poisson={}",
                        report.mean,
                        report.exact_expectation,
                        report.limit_lambda,
                        report.tv_to_poisson
                    );
                    text
                }
                Format::Json => {
                    let rows: Vec<serde_json::Value> = report
                        .observations
                        .iter()
                        .enumerate()
                        .map(|(t, d)| serde_json::json!({ "trial": t, "D_s": d }))
                        .collect();
                    let body = serde_json::json!({
                        "rows": rows,
                        "summary": {
                            "mean": report.mean,
                            "exact_expectation": report.exact_expectation,
                            "limit_lambda": report.limit_lambda,
                            "tv_to_poisson": report.tv_to_poisson,
                        },
                    });
                    format!("{}\n", serde_json::to_string_pretty(&body).unwrap())
                }
            };
            emit(
                &out,
                &data,
                &manifest(serde_json::json!({
                    "command": "degree-dist", "n": n, "k": k, "j": j,
                    "s": s, "c": c, "trials": trials, "seed": seed,
                })),
            )?;
            Ok(0)
        }

        Command::Sweep { n, k, j, c_from, c_to, c_step, trials, seed, model } => {
            let n = resolver.required(n, "n")?;
            let k = resolver.required(k, "k")?;
            let j = resolver.required(j, "j")?;
            let c_from = resolver.required(c_from, "c-from")?;
            let c_to = resolver.required(c_to, "c-to")?;
            let c_step = resolver.required(c_step, "c-step")?;
            let trials = resolver.required(trials, "trials")?;
            let seed = resolver.optional(seed, "seed", 0)?;
            let model: Model = {
                let raw = resolver.optional(model, "model", "binomial".to_string())?;
                raw.parse()?
            };
            if trials == 0 {
                return Err(usage("--trials must be >= 1"));
            }
            if !(c_step > 0.0) || !c_step.is_finite() {
                return Err(usage("--c-step must be positive"));
            }
            let mut grid = Vec::new();
            let mut i = 0u32;
            loop {
                let c = c_from + i as f64 * c_step;
                if c > c_to + 1e-9 {
                    break;
                }
                grid.push(c);
                i += 1;
            }
            if grid.is_empty() {
                return Err(usage("empty c grid: --c-from exceeds --c-to"));
            }
            let params = Params::new(n, k, j)?;
            let rows = threshold_sweep(params, &grid, trials, seed, model)?;

            let data = match format {
                Format::Csv => {
                    let mut text = String::from("c,trials,frac_no_isolated,frac_connected\n");
                    for r in &rows {
                        let _ = writeln!(
                            text,
                            "{},{},{},{}",
                            r.c, r.trials, r.frac_no_isolated, r.frac_connected
                        );
                    }
                    text
                }
                Format::Json => {
                    format!("{}\n", serde_json::to_string_pretty(&rows).unwrap())
                }
            };
            emit(
                &out,
                &data,
                &manifest(serde_json::json!({
                    "command": "sweep", "n": n, "k": k, "j": j,
                    "c_from": c_from, "c_to": c_to, "c_step": c_step,
                    "trials": trials, "seed": seed, "model": model,
                })),
            )?;
            Ok(0)
        }

        Command::OracleCheck { instances, max_n, seed } => {
            let instances = resolver.optional(instances, "instances", 1000)?;
            let max_n = resolver.optional(max_n, "max-n", 12)?;
            let seed = resolver.optional(seed, "seed", 0)?;
            match oracle_check(instances, max_n, seed)? {
                None => {
                    println!("oracle-check instances={instances} max_n={max_n} seed={seed}: OK");
                    Ok(0)
                }
                Some(mismatch) => {
                    eprintln!("oracle mismatch at {}", mismatch.description);
                    eprintln!("tracker partition:");
                    eprint!("{}", mismatch.tracker_dump);
                    eprintln!("oracle partition:");
                    eprint!("{}", mismatch.oracle_dump);
                    Ok(4)
                }
            }
        }

        Command::EnumerateWc { k, j, max_jsize } => {
            let k = resolver.required(k, "k")?;
            let j = resolver.required(j, "j")?;
            let max_jsize = resolver.required(max_jsize, "max-jsize")?;
            let rows = enumerate_well_constructed(k, j, max_jsize)?;
            let data = match format {
                Format::Csv => {
                    let mut text = String::from("jsize,count,bound\n");
                    for r in &rows {
                        let _ = writeln!(text, "{},{},{}", r.jsize, r.count, r.bound);
                    }
                    text
                }
                Format::Json => {
                    let rows: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|r| {
                            serde_json::json!({
                                "jsize": r.jsize,
                                "count": r.count,
                                "bound": r.bound.to_string(),
                            })
                        })
                        .collect();
                    format!("{}\n", serde_json::to_string_pretty(&rows).unwrap())
                }
            };
            emit(
                &out,
                &data,
                &manifest(serde_json::json!({
                    "command": "enumerate-wc", "k": k, "j": j, "max_jsize": max_jsize,
                })),
            )?;
            Ok(0)
        }

        Command::Component { n, k, j, epsilon, seed } => {
            let n = resolver.required(n, "n")?;
            let k = resolver.required(k, "k")?;
            let j = resolver.required(j, "j")?;
            let epsilon = resolver.required(epsilon, "epsilon")?;
            let seed = resolver.optional(seed, "seed", 0)?;
            let params = Params::new(n, k, j)?;
            let report = supercritical_component(params, epsilon, seed)?;
            let data = format!("{}\n", serde_json::to_string_pretty(&report).unwrap());
            emit(
                &out,
                &data,
                &manifest(serde_json::json!({
                    "command": "component", "n": n, "k": k, "j": j,
                    "epsilon": epsilon, "seed": seed,
                })),
            )?;
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "# comment\nn = 12\nk=3\n\nc-from=-2\n").unwrap();
        let cfg = load_config(&path).unwrap();
        assert_eq!(cfg.get("n").map(String::as_str), Some("12"));
        assert_eq!(cfg.get("k").map(String::as_str), Some("3"));
        assert_eq!(cfg.get("c-from").map(String::as_str), Some("-2"));

        std::fs::write(&path, "nonsense line\n").unwrap();
        assert!(load_config(&path).is_err());
    }

    #[test]
    fn resolver_precedence() {
        let mut cfg = HashMap::new();
        cfg.insert("n".to_string(), "10".to_string());
        let r = Resolver { cfg };
        assert_eq!(r.required::<u32>(Some(5), "n").unwrap(), 5);
        assert_eq!(r.required::<u32>(None, "n").unwrap(), 10);
        assert!(r.required::<u32>(None, "k").is_err());
        assert_eq!(r.optional::<u64>(None, "seed", 7).unwrap(), 7);
    }

    #[test]
    fn error_to_exit_code() {
        assert_eq!(Failure::from(Error::InvalidProbability(2.0)).code, 2);
        assert_eq!(
            Failure::from(Error::MemoryCap { entries: 1, cap: 0 }).code,
            3
        );
        assert_eq!(Failure::from(Error::Internal("x".into())).code, 4);
    }
}
