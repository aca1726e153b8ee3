//! Argument parsing and dispatch.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rwrs_core::oracle::GridSpec;
use rwrs_core::{Family, SceneryDist};

use crate::commands::{rates_table, run_oracle, simulate, OracleOp, RatesRequest};
use crate::compare::{compare_file, render};
use crate::config::{ExperimentConfig, RawConfig};
use crate::error::{exit, CliError, CliResult};
use crate::experiment;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "RWRS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "rwrs", version, about = "Random walk in random scenery: rates, oracles and rare-event estimates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print scale functions and constants as csv.
    Rates(RatesArgs),
    /// Evaluate an exact reference computation and print JSON.
    Oracle {
        #[command(subcommand)]
        op: OracleCmd,
    },
    /// Run the estimators of a config file, writing results.csv and manifest.json.
    Estimate(EstimateArgs),
    /// Simulate walk paths of a config file and print JSON summaries.
    Simulate(SimulateArgs),
    /// Compare a results.csv against the asymptotic rates.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub q: f64,
    /// Tail constant `c`; defaults to `b^{-q}` with `--b`, else 1.
    #[arg(long, conflicts_with = "b")]
    pub c: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    /// K_d (d <= 2) or f_0 (d >= 3) instead of the simple-walk value.
    #[arg(long)]
    pub walk_constant: Option<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<f64>,
    #[arg(long, value_delimiter = ',', conflicts_with = "r", required_unless_present = "r")]
    pub t: Vec<f64>,
    /// Levels `t = n^{-r}`.
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<f64>,
    /// Admit `q = 1`.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Subcommand)]
pub enum OracleCmd {
    /// P(l_n(0) > a) for the one-dimensional walk.
    FirstReturnTail {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        a: u64,
    },
    /// Law of l_n(0) in d = 1.
    LocalTimePmf {
        #[arg(long)]
        n: u64,
    },
    /// Exact laws of l_n(0), L_n and the range by path enumeration.
    Enumerate {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: u64,
    },
    /// Return probability f_0 of a transient walk.
    ReturnSeries {
        #[arg(long)]
        d: usize,
    },
    /// inf over xy >= s of y^q + I_ell(x).
    Minimize {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        kappa: f64,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        /// Brute-force log-grid scan `lo,hi,points` over y instead.
        #[arg(long, value_delimiter = ',', num_args = 3)]
        scan: Option<Vec<f64>>,
    },
    /// P(sum l_i Y_i > s) by grid convolution.
    GridCdf {
        #[arg(long, default_value = "SymmetricWeibull")]
        family: String,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 0.01)]
        h: f64,
        #[arg(long, default_value_t = 60.0)]
        span: f64,
    },
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Config file, or a manifest.json from an earlier run.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override `mc.shards`.
    #[arg(long)]
    pub shards: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Paths per grid point.
    #[arg(long, default_value_t = 1)]
    pub paths: u64,
    /// Replicas for a weighted-sum tail check of each profile (0 = skip).
    #[arg(long, default_value_t = 0)]
    pub check_replicas: u64,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub results: PathBuf,
    /// Write the verdict table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn load_config(path: &std::path::Path, shards: Option<usize>) -> CliResult<ExperimentConfig> {
    let mut raw = RawConfig::load(path)?;
    if let Some(s) = shards {
        raw.set("mc.shards", &s.to_string())?;
    }
    Ok(ExperimentConfig::from_raw(raw)?)
}

fn to_oracle_op(cmd: OracleCmd) -> CliResult<OracleOp> {
    Ok(match cmd {
        OracleCmd::FirstReturnTail { n, a } => OracleOp::FirstReturnTail { n, a },
        OracleCmd::LocalTimePmf { n } => OracleOp::LocalTimePmf { n },
        OracleCmd::Enumerate { d, n } => OracleOp::Enumerate { d, n },
        OracleCmd::ReturnSeries { d } => OracleOp::ReturnSeries { d },
        OracleCmd::Minimize { d, q, kappa, s, scan } => OracleOp::Minimize {
            d,
            q,
            kappa,
            s,
            scan: match scan.as_deref() {
                None => None,
                Some([lo, hi, points]) if *points >= 2.0 && points.fract() == 0.0 => Some((*lo, *hi, *points as usize)),
                Some(_) => return Err(CliError::Usage("--scan takes lo,hi,points with an integer points >= 2".into())),
            },
        },
        OracleCmd::GridCdf {
            family,
            q,
            b,
            weights,
            s,
            h,
            span,
        } => OracleOp::GridCdf {
            dist: SceneryDist::new(family.parse::<Family>()?, q, b)?,
            weights,
            s,
            grid: GridSpec { h, span },
        },
    })
}

fn write_stdout(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io("<stdout>", e))
}

/// Runs a parsed command and returns the exit code.
pub fn execute(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Rates(a) => {
            let c = a.c.unwrap_or_else(|| a.b.map_or(1.0, |b| b.powf(-a.q)));
            let t = if a.r.is_empty() {
                a.t.clone()
            } else {
                if a.n.len() != 1 {
                    return Err(CliError::Usage("--r needs exactly one --n value".into()));
                }
                a.r.iter().map(|r| a.n[0].powf(-r)).collect()
            };
            let req = RatesRequest {
                d: a.d,
                q: a.q,
                c,
                walk_constant: a.walk_constant,
                n: a.n,
                t,
                oracle_mode: a.oracle,
            };
            write_stdout(&rates_table(&req)?)?;
            Ok(exit::OK)
        }
        Command::Oracle { op } => {
            let report = run_oracle(&to_oracle_op(op)?)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            write_stdout(&(text + "\n"))?;
            Ok(exit::OK)
        }
        Command::Estimate(a) => {
            let cfg = load_config(&a.config, a.shards)?;
            let out = a.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
            let summary = experiment::run(&cfg, &out)?;
            let failures = summary.failures();
            eprintln!(
                "wrote {} rows to {} ({} failed)",
                summary.rows.len(),
                summary.results_path.display(),
                failures
            );
            Ok(if failures > 0 { exit::PARTIAL } else { exit::OK })
        }
        Command::Simulate(a) => {
            let cfg = load_config(&a.config, None)?;
            let reports = simulate(&cfg, a.paths, a.check_replicas)?;
            let text = serde_json::to_string_pretty(&reports).expect("reports serialize");
            write_stdout(&(text + "\n"))?;
            Ok(exit::OK)
        }
        Command::Compare(a) => {
            let rows = compare_file(&a.results)?;
            let table = render(&rows);
            match &a.out {
                Some(p) => std::fs::write(p, table).map_err(|e| CliError::io(p, e))?,
                None => write_stdout(&table)?,
            }
            Ok(exit::OK)
        }
    }
}

/// Sizes the global worker pool from [`THREADS_ENV`].
pub fn init_threads() -> CliResult<usize> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => return Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    // A pool built earlier in the process wins; results do not depend on it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(rayon::current_num_threads())
}

/// Parses `args`, runs the command and maps every failure to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    let result = init_threads().and_then(|_| execute(cli));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit::USAGE
        }
    }
}
