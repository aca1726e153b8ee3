//! The `estimate` run: grid points times methods into `results.csv`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rwrs_core::estimators::{single_site_surrogate, single_site_tail, zn_tail};
use rwrs_core::oracle::return_prob_series;
use rwrs_core::rates::{alpha_n, beta_n, theorem_constant};
use rwrs_core::{McConfig, Method, RateParams, TailEstimate};
use serde::Serialize;

use crate::config::{ExperimentConfig, GridPoint};
use crate::error::{CliError, CliResult};

/// Column order of `results.csv`.
pub const COLUMNS: [&str; 20] = [
    "d",
    "q",
    "b",
    "family",
    "n",
    "t",
    "r",
    "method",
    "replicas",
    "seed",
    "shards",
    "p_hat",
    "log_p",
    "stderr",
    "rel_err",
    "alpha_n",
    "beta_n",
    "paper_constant",
    "minimized_constant",
    "status",
];

pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Round-trip float formatting, scientific outside `[1e-4, 1e15)`.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// One line of `results.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub point: GridPoint,
    pub method: Method,
    pub estimate: Option<TailEstimate>,
    pub alpha_n: Option<f64>,
    pub beta_n: Option<f64>,
    pub paper_constant: Option<f64>,
    pub minimized_constant: Option<f64>,
    pub status: Vec<String>,
    pub failed: bool,
}

impl ResultRow {
    pub fn status_string(&self) -> String {
        if self.status.is_empty() {
            "ok".to_string()
        } else {
            self.status.join(";")
        }
    }

    fn record(&self, cfg: &ExperimentConfig) -> Vec<String> {
        let e = self.estimate.as_ref();
        vec![
            cfg.walk.d().to_string(),
            fmt_num(cfg.dist.q()),
            fmt_num(cfg.dist.b()),
            cfg.dist.family().to_string(),
            self.point.n.to_string(),
            fmt_num(self.point.t),
            fmt_num(self.point.r),
            self.method.name().to_string(),
            e.map(|e| e.replicas.to_string()).unwrap_or_default(),
            cfg.seed.to_string(),
            cfg.shards.to_string(),
            fmt_opt(e.map(|e| e.p_hat)),
            fmt_opt(e.map(|e| e.log_p)),
            fmt_opt(e.map(|e| e.stderr)),
            fmt_opt(e.map(|e| e.rel_err)),
            fmt_opt(self.alpha_n),
            fmt_opt(self.beta_n),
            fmt_opt(self.paper_constant),
            fmt_opt(self.minimized_constant),
            self.status_string(),
        ]
    }
}

/// `K_d` for recurrent walks, the series value of `f_0` otherwise.
pub fn walk_constant(d: usize) -> rwrs_core::Result<f64> {
    let spec = rwrs_core::WalkSpec::simple(d)?;
    match spec.walk_constant() {
        Some(k) => Ok(k),
        None => Ok(return_prob_series(d)?.f0),
    }
}

fn resolved_constant(cfg: &ExperimentConfig) -> rwrs_core::Result<f64> {
    match cfg.walk_constant {
        Some(k) => Ok(k),
        None => walk_constant(cfg.walk.d()),
    }
}

fn estimate_point(cfg: &ExperimentConfig, p: &GridPoint, method: Method) -> rwrs_core::Result<TailEstimate> {
    let mc = McConfig::new(cfg.replicas, cfg.seed).with_shards(cfg.shards);
    match method {
        Method::SingleSite => single_site_tail(&cfg.walk, &cfg.dist, p.n, p.t, &mc),
        Method::ExactOracle => single_site_surrogate(&cfg.dist, resolved_constant(cfg)?, p.n as f64 * p.t),
        m => zn_tail(m, &cfg.walk, &cfg.dist, p.n, p.t, &mc),
    }
}

/// Evaluates one grid point and method; failures are recorded in the row.
pub fn compute_row(cfg: &ExperimentConfig, p: &GridPoint, method: Method) -> ResultRow {
    let mut row = ResultRow {
        point: *p,
        method,
        estimate: None,
        alpha_n: None,
        beta_n: None,
        paper_constant: None,
        minimized_constant: None,
        status: Vec::new(),
        failed: false,
    };
    let rates = resolved_constant(cfg)
        .and_then(|k| RateParams::for_scenery(cfg.walk.d(), &cfg.dist, k, p.n as f64, p.t));
    match rates {
        Ok(params) => {
            if !params.window_warnings().is_empty() {
                row.status.push("below_window".to_string());
            }
            match alpha_n(&params) {
                Ok(a) => row.alpha_n = Some(a.alpha),
                Err(e) => row.status.push(format!("alpha_n: {e}")),
            }
            match beta_n(&params) {
                Ok(b) => row.beta_n = Some(b),
                Err(e) => row.status.push(format!("beta_n: {e}")),
            }
            match theorem_constant(&params) {
                Ok(c) => {
                    row.paper_constant = Some(c.paper_value);
                    row.minimized_constant = Some(c.minimized_value);
                    if c.discrepant {
                        row.status.push("constants_discrepant".to_string());
                    }
                }
                Err(e) => row.status.push(format!("constant: {e}")),
            }
        }
        Err(e) => row.status.push(format!("rates: {e}")),
    }
    match estimate_point(cfg, p, method) {
        Ok(e) => {
            if e.is_censored() {
                row.status.push("censored".to_string());
            }
            if e.surrogate {
                row.status.push("surrogate".to_string());
            }
            row.estimate = Some(e);
        }
        Err(e) => {
            row.status.push(format!("error: {e}"));
            row.failed = true;
        }
    }
    row
}

pub fn write_results(path: &Path, cfg: &ExperimentConfig, rows: &[ResultRow]) -> CliResult<()> {
    let mut buf = Vec::new();
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut buf);
        let to_err = |e: csv::Error| CliError::Input {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        w.write_record(COLUMNS).map_err(to_err)?;
        for row in rows {
            w.write_record(row.record(cfg)).map_err(to_err)?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    std::fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Serialize)]
struct RowTiming {
    n: u64,
    t: String,
    method: &'static str,
    seconds: f64,
    status: String,
}

#[derive(Debug, Serialize)]
struct Manifest {
    config: BTreeMap<String, String>,
    config_source: String,
    versions: BTreeMap<&'static str, &'static str>,
    threads: usize,
    started_unix_seconds: u64,
    wall_seconds: f64,
    rows: Vec<RowTiming>,
    failures: usize,
    results: &'static str,
}

/// What a run produced.
#[derive(Debug)]
pub struct RunSummary {
    pub rows: Vec<ResultRow>,
    pub results_path: PathBuf,
    pub manifest_path: PathBuf,
}

impl RunSummary {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.failed).count()
    }
}

/// Every grid point and method, in deterministic emission order.
pub fn compute_rows(cfg: &ExperimentConfig) -> Vec<(ResultRow, f64)> {
    let mut out = Vec::new();
    for p in cfg.points() {
        for &m in &cfg.methods {
            let start = Instant::now();
            let row = compute_row(cfg, &p, m);
            log::info!("n = {} t = {} {}: {}", p.n, fmt_num(p.t), m, row.status_string());
            out.push((row, start.elapsed().as_secs_f64()));
        }
    }
    out
}

/// Runs the experiment and writes `results.csv` and `manifest.json` into
/// `out_dir`.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> CliResult<RunSummary> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let timed = compute_rows(cfg);
    let results_path = out_dir.join(RESULTS_FILE);
    let rows: Vec<ResultRow> = timed.iter().map(|(r, _)| r.clone()).collect();
    write_results(&results_path, cfg, &rows)?;

    let manifest = Manifest {
        config: cfg.echo(),
        config_source: cfg.source_name().to_string(),
        versions: BTreeMap::from([
            ("rwrs-cli", env!("CARGO_PKG_VERSION")),
            ("rwrs-core", rwrs_core::VERSION),
        ]),
        threads: rayon::current_num_threads(),
        started_unix_seconds: started,
        wall_seconds: clock.elapsed().as_secs_f64(),
        rows: timed
            .iter()
            .map(|(r, s)| RowTiming {
                n: r.point.n,
                t: fmt_num(r.point.t),
                method: r.method.name(),
                seconds: *s,
                status: r.status_string(),
            })
            .collect(),
        failures: rows.iter().filter(|r| r.failed).count(),
        results: RESULTS_FILE,
    };
    let manifest_path = out_dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Input {
        path: manifest_path.clone(),
        message: e.to_string(),
    })?;
    std::fs::write(&manifest_path, json + "\n").map_err(|e| CliError::io(&manifest_path, e))?;
    Ok(RunSummary {
        rows,
        results_path,
        manifest_path,
    })
}
