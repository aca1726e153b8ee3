//! The `rates`, `oracle` and `simulate` subcommands.

use rand::Rng;
use rwrs_core::estimators::{weighted_sum_tail, WeightedSumBound};
use rwrs_core::mc::block_rng;
use rwrs_core::oracle::{
    enumerate_paths, grid_scan_i_tilde, local_time_pmf_first_return, local_time_tail_first_return, minimize_i_tilde,
    return_prob_series, weighted_sum_cdf_grid, GridSpec, Pmf,
};
use rwrs_core::rates::{alpha_n, beta_n, theorem_constant};
use rwrs_core::walk::simulate_path;
use rwrs_core::{McConfig, RateParams, SceneryDist, WalkSpec};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::experiment::{fmt_num, walk_constant};

pub const RATES_COLUMNS: [&str; 11] = [
    "d",
    "q",
    "c",
    "K_or_f0",
    "n",
    "t",
    "alpha_n",
    "beta_n",
    "paper_constant",
    "minimized_constant",
    "discrepant",
];

/// Inputs of the `rates` table.
#[derive(Debug, Clone, PartialEq)]
pub struct RatesRequest {
    pub d: usize,
    pub q: f64,
    pub c: f64,
    /// Overrides the natural `K_d` / `f_0` of the simple walk.
    pub walk_constant: Option<f64>,
    pub n: Vec<f64>,
    pub t: Vec<f64>,
    /// Admit `q = 1`.
    pub oracle_mode: bool,
}

/// One csv line per `(n, t)` pair.
pub fn rates_table(req: &RatesRequest) -> CliResult<String> {
    let k = match req.walk_constant {
        Some(k) => k,
        None => walk_constant(req.d)?,
    };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(RATES_COLUMNS).expect("in-memory write");
    for &n in &req.n {
        for &t in &req.t {
            let p = if req.oracle_mode {
                RateParams::oracle(req.d, req.q, req.c, k, n, t)?
            } else {
                RateParams::new(req.d, req.q, req.c, k, n, t)?
            };
            let a = alpha_n(&p)?;
            let b = beta_n(&p)?;
            let c = theorem_constant(&p)?;
            w.write_record([
                req.d.to_string(),
                fmt_num(req.q),
                fmt_num(req.c),
                fmt_num(k),
                fmt_num(n),
                fmt_num(t),
                fmt_num(a.alpha),
                fmt_num(b),
                fmt_num(c.paper_value),
                fmt_num(c.minimized_value),
                c.discrepant.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8"))
}

/// The JSON document printed by `oracle`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub operation: &'static str,
    pub inputs: Value,
    pub value: Value,
    pub error_bound: f64,
}

/// Numbers go out as JSON numbers when finite, as strings otherwise.
fn jnum(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(fmt_num(x))
    }
}

fn pmf_json<K: Serialize + Copy>(pmf: &Pmf<K>) -> Value {
    Value::Array(pmf.atoms.iter().map(|(k, p)| json!([k, jnum(*p)])).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOp {
    /// `P(l_n(0) > a)` for the one-dimensional walk.
    FirstReturnTail { n: u64, a: u64 },
    /// Law of `l_n(0)` in `d = 1` by first-return decomposition.
    LocalTimePmf { n: u64 },
    /// Exact laws of `l_n(0)`, `L_n` and `|R_n|` by path enumeration.
    Enumerate { d: usize, n: u64 },
    /// `f_0` and the Green's function at the origin.
    ReturnSeries { d: usize },
    /// `inf_{xy >= s} y^q + I_ell(x)`.
    Minimize {
        d: usize,
        q: f64,
        kappa: f64,
        s: f64,
        scan: Option<(f64, f64, usize)>,
    },
    /// `P(sum l_i Y_i > s)` by grid convolution.
    GridCdf {
        dist: SceneryDist,
        weights: Vec<f64>,
        s: f64,
        grid: GridSpec,
    },
}

pub fn run_oracle(op: &OracleOp) -> CliResult<OracleReport> {
    Ok(match op {
        OracleOp::FirstReturnTail { n, a } => {
            let v = local_time_tail_first_return(*n, *a)?;
            OracleReport {
                operation: "first_return_tail",
                inputs: json!({ "n": n, "a": a }),
                value: jnum(v.value),
                error_bound: v.error_bound,
            }
        }
        OracleOp::LocalTimePmf { n } => {
            let pmf = local_time_pmf_first_return(&WalkSpec::simple(1)?, *n)?;
            OracleReport {
                operation: "local_time_pmf",
                inputs: json!({ "d": 1, "n": n }),
                value: pmf_json(&pmf),
                error_bound: pmf.mass_error,
            }
        }
        OracleOp::Enumerate { d, n } => {
            let stats = enumerate_paths(&WalkSpec::simple(*d)?, *n)?;
            let (ell0, lmax, range) = (stats.ell0(), stats.lmax(), stats.range());
            OracleReport {
                operation: "enumerate_paths",
                inputs: json!({ "d": d, "n": n }),
                value: json!({
                    "ell0": pmf_json(&ell0),
                    "lmax": pmf_json(&lmax),
                    "range": pmf_json(&range),
                }),
                error_bound: stats.joint.mass_error,
            }
        }
        OracleOp::ReturnSeries { d } => {
            let s = return_prob_series(*d)?;
            OracleReport {
                operation: "return_prob_series",
                inputs: json!({ "d": d }),
                value: json!({ "f0": s.f0, "green": s.green, "green_error": s.green_error, "terms": s.terms }),
                error_bound: s.f0_error,
            }
        }
        OracleOp::Minimize { d, q, kappa, s, scan } => {
            let m = match scan {
                Some((lo, hi, points)) => grid_scan_i_tilde(*d, *q, *kappa, *s, *lo, *hi, *points)?,
                None => minimize_i_tilde(*d, *q, *kappa, *s)?,
            };
            OracleReport {
                operation: if scan.is_some() { "grid_scan_i_tilde" } else { "minimize_i_tilde" },
                inputs: json!({ "d": d, "q": q, "kappa": kappa, "s": s }),
                value: json!({ "minimum": m.value, "argmin_y": m.argmin_y }),
                error_bound: m.error_bound,
            }
        }
        OracleOp::GridCdf { dist, weights, s, grid } => {
            let v = weighted_sum_cdf_grid(dist, weights, *s, grid)?;
            OracleReport {
                operation: "weighted_sum_cdf_grid",
                inputs: json!({
                    "family": dist.family().to_string(),
                    "q": dist.q(),
                    "b": dist.b(),
                    "weights": weights,
                    "s": s,
                    "h": grid.h,
                    "span": grid.span,
                }),
                value: jnum(v.value),
                error_bound: v.error_bound,
            }
        }
    })
}

/// Summary of one simulated path and its weight profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathReport {
    pub n: u64,
    pub t: f64,
    pub path: u64,
    pub ell0: u32,
    pub lmax: u32,
    pub range: usize,
    pub argmax: Vec<i32>,
    /// `sum_z Y_z l_n(z)` for an independent scenery draw.
    pub z_n: f64,
    pub exceeds: bool,
    pub bound_log: f64,
    pub precondition_ok: bool,
    /// Present when the weighted-sum tail was estimated.
    pub log_p: Option<f64>,
    pub violated: Option<bool>,
}

const TAG_SIMULATE: u64 = 0x5349_4D55;

/// Simulates `paths` walks at every grid point of `cfg`. With
/// `check_replicas > 0` the weighted-sum tail of each profile is estimated
/// and compared with its bound.
pub fn simulate(cfg: &ExperimentConfig, paths: u64, check_replicas: u64) -> CliResult<Vec<PathReport>> {
    if paths == 0 {
        return Err(CliError::Usage("--paths must be at least 1".to_string()));
    }
    let d = cfg.walk.d();
    let mut out = Vec::new();
    for (gi, p) in cfg.points().into_iter().enumerate() {
        for k in 0..paths {
            let mut rng = block_rng(cfg.seed, TAG_SIMULATE ^ ((gi as u64) << 32), k);
            let field = simulate_path(&cfg.walk, p.n, &mut rng)?;
            let mut z = 0.0;
            let mut weights = Vec::with_capacity(field.range_size());
            for (_, l) in field.iter() {
                z += l as f64 * cfg.dist.sample(&mut rng);
                weights.push(l as f64);
            }
            let (site, _) = field.argmax_site();
            let mut report = PathReport {
                n: p.n,
                t: p.t,
                path: k,
                ell0: field.ell0(),
                lmax: field.lmax(),
                range: field.range_size(),
                argmax: site[..d].to_vec(),
                z_n: z,
                exceeds: z > p.n as f64 * p.t,
                bound_log: f64::NAN,
                precondition_ok: false,
                log_p: None,
                violated: None,
            };
            if cfg.dist.q() < 1.0 {
                let bound = WeightedSumBound::new(weights, p.t, &cfg.dist, cfg.eps, cfg.eta)?;
                report.bound_log = bound.bound_log;
                report.precondition_ok = bound.precondition_ok;
                if check_replicas > 0 {
                    let seed = cfg.seed ^ rng.random::<u64>();
                    let r = weighted_sum_tail(&cfg.dist, &bound, &McConfig::new(check_replicas, seed).with_shards(cfg.shards))?;
                    report.log_p = Some(r.est.log_p);
                    report.violated = Some(r.violated);
                }
            }
            out.push(report);
        }
    }
    Ok(out)
}
