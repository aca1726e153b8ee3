//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines are always printed. Errors while
//! evaluating a criterion count as FAIL. The process exits nonzero only
//! when `RWRS_ACCEPTANCE_STRICT=1` and some criterion failed.

use std::collections::HashMap;
use std::time::Instant;

use rand::Rng;
use rwrs_cli::compare::{compare_text, Ratio, Trend};
use rwrs_cli::config::{ExperimentConfig, RawConfig};
use rwrs_cli::experiment::{compute_rows, write_results, COLUMNS};
use rwrs_core::estimators::{
    clt_regime_experiment, local_time_tail_profile, single_site_surrogate, single_site_tail, weighted_sum_tail,
    zn_tail_conditional, zn_tail_naive, WeightedSumBound,
};
use rwrs_core::mc::block_rng;
use rwrs_core::oracle::{
    enumerate_paths, grid_scan_i_tilde, local_time_pmf_first_return, local_time_tail_first_return, minimize_i_tilde,
    return_prob_series, weighted_sum_cdf_grid, GridSpec,
};
use rwrs_core::rates::{beta_n, theorem_constant};
use rwrs_core::walk::simulate_path;
use rwrs_core::{Family, McConfig, RateParams, SceneryDist, WalkSpec};

type Check = Result<(bool, String), String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit_s: f64,
    run: fn() -> Check,
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn sym(q: f64) -> SceneryDist {
    SceneryDist::symmetric_weibull(q, 1.0).expect("valid scenery")
}

fn config(text: &str) -> Result<ExperimentConfig, String> {
    let raw = RawConfig::parse_text("acceptance", text).map_err(err)?;
    ExperimentConfig::from_raw(raw).map_err(err)
}

fn results_csv(cfg: &ExperimentConfig, dir: &std::path::Path, name: &str) -> Result<String, String> {
    let rows: Vec<_> = compute_rows(cfg).into_iter().map(|(r, _)| r).collect();
    let path = dir.join(name);
    write_results(&path, cfg, &rows).map_err(err)?;
    std::fs::read_to_string(&path).map_err(err)
}

// 1. Closed-form constants against the numerical minimizer.
const C1_DRAWS: usize = 100;
const C1_TOL: f64 = 1e-9;

fn c1_constants() -> Check {
    let mut rng = block_rng(2024, 1, 0);
    let k2 = 1.0 / std::f64::consts::PI;
    let mut worst: f64 = 0.0;
    for i in 0..C1_DRAWS {
        let d = 2 + i % 2;
        let q = rng.random_range(0.05..0.95);
        let kappa = rng.random_range(0.1..10.0) * k2;
        let walk_constant = if d == 2 { kappa } else { (-kappa).exp() };
        let p = RateParams::new(d, q, 1.0, walk_constant, 1e6, 1.0).map_err(err)?;
        let c = theorem_constant(&p).map_err(err)?;
        let m = minimize_i_tilde(d, q, p.kappa(), 1.0).map_err(err)?;
        worst = worst.max((c.paper_value - m.value).abs());
    }
    Ok((worst <= C1_TOL, format!("max |closed - minimized| = {worst:.2e} over {C1_DRAWS} draws (tol {C1_TOL:e})")))
}

// 2. Single-site surrogate ratios through estimate + compare.
const C2_LEVELS: [u64; 3] = [100, 10_000, 1_000_000];
const C2_FINAL: (f64, f64) = (0.8, 1.0);

fn c2_surrogate_trend() -> Check {
    let cfg = config("scenery.q = 0.5\nwalk.d = 3\ngrid.n = 100, 10000, 1000000\ngrid.t = 1\nestimate.methods = exact_oracle\n")?;
    let dir = tempfile::tempdir().map_err(err)?;
    let text = results_csv(&cfg, dir.path(), "c2.csv")?;
    let rows = compare_text(&dir.path().join("c2.csv"), &text).map_err(err)?;
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio_paper.value()).collect();
    if ratios.len() != C2_LEVELS.len() {
        return Err(format!("expected {} ratios, got {ratios:?}", C2_LEVELS.len()));
    }
    // Independent of the pipeline: the surrogate evaluated directly.
    let f0 = return_prob_series(3).map_err(err)?.f0;
    for (&s, &r) in C2_LEVELS.iter().zip(&ratios) {
        let est = single_site_surrogate(&sym(0.5), f0, s as f64).map_err(err)?;
        let p = RateParams::new(3, 0.5, 1.0, f0, s as f64, 1.0).map_err(err)?;
        let direct = est.log_p / -(beta_n(&p).map_err(err)? * theorem_constant(&p).map_err(err)?.paper_value);
        if (direct - r).abs() > 1e-12 {
            return Err(format!("pipeline ratio {r} differs from direct {direct} at s = {s}"));
        }
    }
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]) && ratios.iter().all(|&r| r <= 1.0);
    let last = *ratios.last().unwrap();
    let ok = increasing && (C2_FINAL.0..=C2_FINAL.1).contains(&last) && rows[0].trend_paper == Trend::TowardOne;
    Ok((ok, format!("ratios at s = 1e2, 1e4, 1e6: {ratios:.4?}")))
}

// 3. One-dimensional local-time deviations from the first-return oracle.
const C3_EXPONENTS: [u32; 3] = [12, 14, 16];
const C3_BAND: (f64, f64) = (0.7, 1.3);

fn c3_local_time_d1() -> Check {
    let k1 = WalkSpec::simple(1).map_err(err)?.walk_constant().expect("recurrent");
    let mut ratios = Vec::new();
    for e in C3_EXPONENTS {
        let n = 1u64 << e;
        let alpha = (n as f64).powf(0.7);
        let v = local_time_tail_first_return(n, alpha.floor() as u64).map_err(err)?;
        if v.value <= 0.0 || v.error_bound > 1e-3 * v.value {
            return Err(format!("oracle value {v:?} at n = {n} is not resolved"));
        }
        ratios.push(-v.value.ln() / (k1 * k1 * alpha * alpha / n as f64));
    }
    let in_band = ratios.iter().all(|r| (C3_BAND.0..=C3_BAND.1).contains(r));
    let trend = Trend::of(&ratios);
    Ok((
        in_band && trend == Trend::TowardOne,
        format!("ratios at n = 2^12, 2^14, 2^16: {ratios:.4?}; in band: {in_band}; trend: {}", trend.name()),
    ))
}

// 4. Local-time sandwich for the transient walk.
const C4_N: u64 = 1_000_000;
const C4_REPLICAS: u64 = 1_000_000;
const C4_Z: f64 = 3.0;
const C4_F0_TOL: f64 = 5e-4;

fn c4_sandwich_d3() -> Check {
    let spec = WalkSpec::simple(3).map_err(err)?;
    // a = 1 carries the estimate of f_0 as its upper edge.
    let levels = [1, 2, 3, 4, 5, 6];
    let prof = local_time_tail_profile(&spec, C4_N, &levels, &McConfig::new(C4_REPLICAS, 4)).map_err(err)?;
    let series = return_prob_series(3).map_err(err)?;
    let f0_hat = prof[0].upper;
    let f0_ok = (f0_hat.p_hat - series.f0).abs() <= C4_F0_TOL;
    let mut detail = format!("f0 {:.5} vs series {:.5};", f0_hat.p_hat, series.f0);
    let mut all = f0_ok;
    for s in &prof[1..] {
        let ok = s.is_consistent(C4_Z);
        all &= ok;
        detail += &format!(
            " a={}: {:.3e} <= {:.3e} <= {:.3e}{}",
            s.a,
            s.lower.p_hat,
            s.point.p_hat,
            s.upper.p_hat,
            if ok { "" } else { " (violated)" }
        );
    }
    Ok((all, detail))
}

// 5. One big jump for i.i.d. sums.
const C5_N: [usize; 2] = [32, 128];
const C5_T: f64 = 4.0;
const C5_BAND: (f64, f64) = (0.85, 1.15);
const C5_REL_ERR: f64 = 0.1;
const C5_REPLICAS: u64 = 100_000;

fn c5_one_big_jump() -> Check {
    let dist = sym(0.5);
    let mut ok = true;
    let mut detail = String::new();
    for n in C5_N {
        let bound = WeightedSumBound::with_defaults(vec![1.0; n], C5_T, &dist).map_err(err)?;
        let r = weighted_sum_tail(&dist, &bound, &McConfig::new(C5_REPLICAS, 5)).map_err(err)?;
        let ratio = r.est.log_p / dist.log_tail(n as f64 * C5_T);
        ok &= (C5_BAND.0..=C5_BAND.1).contains(&ratio) && r.est.rel_err < C5_REL_ERR;
        detail += &format!("n={n}: ratio {ratio:.4} (rel_err {:.3}); ", r.est.rel_err);
    }
    Ok((ok, detail.trim_end_matches("; ").to_string()))
}

// 6. Weighted-sum bound on walk-generated weight profiles.
const C6_PROFILES: usize = 100;
const C6_REPLICAS: u64 = 4000;

fn c6_weighted_bound() -> Check {
    let mut rng = block_rng(1, 66, 0);
    let (mut count, mut violations, mut skipped) = (0usize, Vec::new(), 0usize);
    let mut min_margin = f64::INFINITY;
    while count < C6_PROFILES {
        let d = rng.random_range(1..=3usize);
        let n = rng.random_range(100..3000u64);
        let t = rng.random_range(1.0..4.0);
        let q = rng.random_range(0.55..0.9);
        let dist = sym(q);
        let field = simulate_path(&WalkSpec::simple(d).map_err(err)?, n, &mut rng).map_err(err)?;
        let w: Vec<f64> = field.local_times().into_iter().map(f64::from).collect();
        let bound = WeightedSumBound::with_defaults(w, t, &dist).map_err(err)?;
        if !bound.precondition_ok {
            skipped += 1;
            continue;
        }
        count += 1;
        let r = weighted_sum_tail(&dist, &bound, &McConfig::new(C6_REPLICAS, count as u64)).map_err(err)?;
        min_margin = min_margin.min(r.margin);
        if r.violated {
            violations.push(format!("d={d} n={n} t={t:.3} q={q:.3} L={} margin {:.3}", bound.l_max, r.margin));
        }
    }
    Ok((
        violations.is_empty(),
        format!(
            "{} violations in {C6_PROFILES} profiles ({skipped} skipped), min margin {min_margin:.3}{}",
            violations.len(),
            if violations.is_empty() { String::new() } else { format!(": {}", violations.join(", ")) }
        ),
    ))
}

// 7. Finite-n sandwich of the walk tail between single-site tails.
const C7_N: [u64; 2] = [1000, 10_000];
const C7_T_LADDER: [f64; 9] = [0.2, 0.25, 0.35, 0.5, 0.7, 1.0, 1.4, 2.0, 3.0];
const C7_P_RANGE: (f64, f64) = (1e-8, 1e-3);
const C7_TUNE_TARGET: (f64, f64) = (1e-7, 1e-4);
const C7_TUNE_REPLICAS: u64 = 2000;
const C7_REPLICAS: u64 = 20_000;
const C7_DELTA: f64 = 0.2;
const C7_Z: f64 = 3.0;

fn c7_sandwich_zn() -> Check {
    let spec = WalkSpec::simple(3).map_err(err)?;
    let dist = sym(0.5);
    let mut ok = true;
    let mut detail = String::new();
    for n in C7_N {
        let mut chosen = None;
        for &t in &C7_T_LADDER {
            let coarse = zn_tail_conditional(&spec, &dist, n, t, &McConfig::new(C7_TUNE_REPLICAS, 70)).map_err(err)?;
            if coarse.p_hat <= C7_TUNE_TARGET.1 {
                chosen = (coarse.p_hat >= C7_TUNE_TARGET.0).then_some(t);
                break;
            }
        }
        let Some(t) = chosen else {
            ok = false;
            detail += &format!("n={n}: no ladder level hits the target range; ");
            continue;
        };
        let cfg = McConfig::new(C7_REPLICAS, 7);
        let z = zn_tail_conditional(&spec, &dist, n, t, &cfg).map_err(err)?;
        let lo = single_site_tail(&spec, &dist, n, t * (1.0 + C7_DELTA), &cfg).map_err(err)?;
        let hi = single_site_tail(&spec, &dist, n, t * (1.0 - C7_DELTA), &cfg).map_err(err)?;
        let in_range = (C7_P_RANGE.0..=C7_P_RANGE.1).contains(&z.p_hat);
        let se_lo = z.log_stderr().hypot(lo.log_stderr());
        let se_hi = z.log_stderr().hypot(hi.log_stderr());
        let lower_ok = z.log_p >= lo.log_p - C7_Z * se_lo;
        let upper_ok = z.log_p <= hi.log_p + C7_Z * se_hi;
        ok &= in_range && lower_ok && upper_ok;
        detail += &format!(
            "n={n} t={t}: log p {:.3} in [{:.3}, {:.3}] (lower {}, upper {}); ",
            z.log_p,
            lo.log_p,
            hi.log_p,
            if lower_ok { "ok" } else { "violated" },
            if upper_ok { "ok" } else { "violated" }
        );
    }
    Ok((ok, detail.trim_end_matches("; ").to_string()))
}

// 8. Oracle agreement.
const C8_PMF_TOL: f64 = 1e-12;
const C8_Z: f64 = 4.0;
const C8_REPLICAS: u64 = 20_000;
const C8_H: f64 = 0.02;

/// Exact law of the sorted local-time profile by enumerating all paths.
fn profiles(d: usize, n: u64) -> Vec<(Vec<f64>, f64)> {
    fn walk(d: usize, left: u64, pos: [i32; 3], visits: &mut HashMap<[i32; 3], u32>, p: f64, out: &mut HashMap<Vec<u32>, f64>) {
        *visits.entry(pos).or_default() += 1;
        if left == 0 {
            let mut prof: Vec<u32> = visits.values().copied().collect();
            prof.sort_unstable_by(|a, b| b.cmp(a));
            *out.entry(prof).or_default() += p;
        } else {
            for axis in 0..d {
                for step in [-1, 1] {
                    let mut next = pos;
                    next[axis] += step;
                    walk(d, left - 1, next, visits, p / (2 * d) as f64, out);
                }
            }
        }
        let c = visits.get_mut(&pos).expect("visited");
        *c -= 1;
        if *c == 0 {
            visits.remove(&pos);
        }
    }
    let mut out = HashMap::new();
    walk(d, n - 1, [0; 3], &mut HashMap::new(), 1.0, &mut out);
    let mut v: Vec<(Vec<f64>, f64)> = out.into_iter().map(|(k, p)| (k.into_iter().map(f64::from).collect(), p)).collect();
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    v
}

fn c8_oracles() -> Check {
    let spec1 = WalkSpec::simple(1).map_err(err)?;
    let mut worst: f64 = 0.0;
    for n in 1..=20 {
        let a = enumerate_paths(&spec1, n).map_err(err)?.ell0();
        let b = local_time_pmf_first_return(&spec1, n).map_err(err)?;
        let keys: Vec<u64> = a.atoms.iter().map(|(k, _)| *k as u64).chain(b.atoms.iter().map(|(k, _)| *k)).collect();
        for k in keys {
            worst = worst.max((a.prob(k as u32) - b.prob(k)).abs());
        }
    }
    let pmf_ok = worst <= C8_PMF_TOL;

    let mut instances = Vec::new();
    for (fam, q, cases) in [
        (Family::SymmetricWeibull, 1.0, &[(1, 2), (1, 3), (1, 4), (1, 5), (2, 2), (2, 3), (2, 4), (3, 3), (3, 4)][..]),
        (Family::CenteredWeibull, 1.0, &[(1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (3, 2), (3, 4)][..]),
        (Family::SymmetricWeibull, 0.7, &[(1, 2), (1, 3), (2, 3), (3, 3)][..]),
    ] {
        for &(d, n) in cases {
            instances.push((SceneryDist::new(fam, q, 1.0).map_err(err)?, d, n as u64));
        }
    }
    let t = 0.5;
    let mut misses = Vec::new();
    let mut max_bound: f64 = 0.0;
    for (i, (dist, d, n)) in instances.iter().enumerate() {
        let s = *n as f64 * t;
        let mut exact = 0.0;
        let mut bound = 0.0;
        for (w, p) in profiles(*d, *n) {
            let lmax = w[0];
            let span = if dist.q() < 1.0 { 40.0 * lmax } else { 25.0 * lmax + 10.0 };
            let v = weighted_sum_cdf_grid(dist, &w, s, &GridSpec { h: C8_H, span }).map_err(err)?;
            exact += p * v.value;
            bound += p * v.error_bound;
        }
        max_bound = max_bound.max(bound);
        let spec = WalkSpec::simple(*d).map_err(err)?;
        let cfg = McConfig::new(C8_REPLICAS, 800 + i as u64);
        for est in [zn_tail_naive(&spec, dist, *n, t, &cfg), zn_tail_conditional(&spec, dist, *n, t, &cfg)] {
            let est = est.map_err(err)?;
            if (est.p_hat - exact).abs() > C8_Z * est.stderr + bound {
                misses.push(format!("{} d={d} n={n} {}: {:.5} vs {exact:.5} +- {bound:.1e}", dist.family(), est.method, est.p_hat));
            }
        }
    }
    Ok((
        pmf_ok && misses.is_empty(),
        format!(
            "pmf max |diff| {worst:.1e} for n <= 20; {} of {} MC estimates outside {C8_Z} stderr + grid bound (max {max_bound:.1e}){}",
            misses.len(),
            2 * instances.len(),
            if misses.is_empty() { String::new() } else { format!(": {}", misses.join(", ")) }
        ),
    ))
}

// 9. Moderate deviations of Gaussian type.
const C9_N: u64 = 100_000;
const C9_BAND: (f64, f64) = (0.6, 1.4);
const C9_CONTROL: (f64, f64) = (0.95, 1.05);
const C9_REPLICAS: u64 = 2048;

fn c9_clt_regime() -> Check {
    let dist = SceneryDist::unit_variance(Family::SymmetricWeibull, 0.5).map_err(err)?;
    let t = (C9_N as f64).powf(-0.45);
    let r = clt_regime_experiment(&dist, C9_N, t, &McConfig::new(C9_REPLICAS, 9)).map_err(err)?;
    let ok = (C9_BAND.0..=C9_BAND.1).contains(&r.ratio) && (C9_CONTROL.0..=C9_CONTROL.1).contains(&r.gaussian_ratio);
    Ok((
        ok,
        format!("ratio {:.4} (rel_err {:.3}); Gaussian control {:.4}", r.ratio, r.estimate.rel_err, r.gaussian_ratio),
    ))
}

// 10. Reproducibility across reruns and shard counts.
fn c10_determinism() -> Check {
    let base = "scenery.q = 0.5\nwalk.d = 2\ngrid.n = 200, 400\ngrid.t = 1\n\
                estimate.methods = naive, conditional, mixture_is, single_site\nmc.replicas = 20000\nmc.seed = 10\n";
    let dir = tempfile::tempdir().map_err(err)?;
    let a = results_csv(&config(base)?, dir.path(), "a.csv")?;
    let b = results_csv(&config(base)?, dir.path(), "b.csv")?;
    let c = results_csv(&config(&format!("{base}mc.shards = 5\n"))?, dir.path(), "c.csv")?;
    let shards = COLUMNS.iter().position(|c| *c == "shards").expect("schema has shards");
    let strip = |s: &str| -> Vec<Vec<String>> {
        s.lines()
            .map(|l| l.split(',').enumerate().filter(|(i, _)| *i != shards).map(|(_, f)| f.to_string()).collect())
            .collect()
    };
    let rerun = a == b;
    let sharded = strip(&a) == strip(&c);
    Ok((
        rerun && sharded,
        format!("rerun byte-identical: {rerun}; shards 1 vs 5 identical apart from the shards column: {sharded}"),
    ))
}

// 11. Both one-dimensional constants, reported and carried by compare.
const C11_PAPER: f64 = 5.7435;
const C11_MINIMIZED: f64 = 1.64938;

fn c11_discrepancy() -> Check {
    let p = RateParams::new(1, 0.5, 1.0, 1.0, 1e4, 1.0).map_err(err)?;
    let c = theorem_constant(&p).map_err(err)?;
    let literal = (2.0f64 + 0.5) * (4.0f64 / 0.5).powf(2.0 * 0.5 / 2.5);
    let min = minimize_i_tilde(1, 0.5, 1.0, 1.0).map_err(err)?;
    let scan = grid_scan_i_tilde(1, 0.5, 1.0, 1.0, 1e-3, 1e3, 200_001).map_err(err)?;
    let numbers_ok = c.discrepant
        && (c.paper_value - C11_PAPER).abs() < 5e-5
        && (c.paper_value - literal).abs() < 1e-12
        && (c.minimized_value - C11_MINIMIZED).abs() < 5e-6
        && (c.minimized_value - min.value).abs() < 1e-9
        && (scan.value - c.minimized_value).abs() < 1e-6;

    let cfg = config("scenery.q = 0.5\nwalk.d = 1\nwalk.constant = 1\ngrid.n = 1000\ngrid.t = 1\nestimate.methods = naive\nmc.replicas = 20000\n")?;
    let dir = tempfile::tempdir().map_err(err)?;
    let text = results_csv(&cfg, dir.path(), "c11.csv")?;
    let rows = compare_text(&dir.path().join("c11.csv"), &text).map_err(err)?;
    let row = rows.first().ok_or("no compare rows")?;
    let carried = match (&row.ratio_paper, &row.ratio_minimized) {
        (Ratio::Value { ratio: a, .. }, Ratio::Value { ratio: b, .. }) => (a / b - c.minimized_value / c.paper_value).abs() < 1e-12,
        _ => false,
    };
    let csv_ok = text.contains(&format!(",{},{},", c.paper_value, c.minimized_value)) && text.contains("constants_discrepant");
    Ok((
        numbers_ok && carried && csv_ok,
        format!(
            "paper {:.5} (literal {:.5}), minimized {:.6} (minimizer {:.6}, scan {:.6}), discrepant {}; compare ratios {:?} / {:?}",
            c.paper_value,
            literal,
            c.minimized_value,
            min.value,
            scan.value,
            c.discrepant,
            row.ratio_paper.value(),
            row.ratio_minimized.value()
        ),
    ))
}

const CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, name: "constant verification (d = 2, 3)", limit_s: 1.0, run: c1_constants },
    Criterion { id: 2, name: "d >= 3 surrogate trend", limit_s: 10.0, run: c2_surrogate_trend },
    Criterion { id: 3, name: "d = 1 local-time deviations", limit_s: 120.0, run: c3_local_time_d1 },
    Criterion { id: 4, name: "d = 3 local-time sandwich", limit_s: 120.0, run: c4_sandwich_d3 },
    Criterion { id: 5, name: "one big jump", limit_s: 60.0, run: c5_one_big_jump },
    Criterion { id: 6, name: "weighted-sum bound", limit_s: 300.0, run: c6_weighted_bound },
    Criterion { id: 7, name: "finite-n single-site sandwich", limit_s: 300.0, run: c7_sandwich_zn },
    Criterion { id: 8, name: "oracle equivalence", limit_s: 60.0, run: c8_oracles },
    Criterion { id: 9, name: "CLT-regime heuristic", limit_s: 120.0, run: c9_clt_regime },
    Criterion { id: 10, name: "determinism", limit_s: 60.0, run: c10_determinism },
    Criterion { id: 11, name: "d = 1 discrepancy report", limit_s: f64::INFINITY, run: c11_discrepancy },
];

fn main() {
    let only: Option<Vec<u32>> = std::env::var("RWRS_ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    let mut ran = 0;
    for c in CRITERIA.iter().filter(|c| only.as_ref().is_none_or(|o| o.contains(&c.id))) {
        ran += 1;
        let start = Instant::now();
        let outcome = (c.run)();
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs < c.limit_s;
        let (pass, detail) = match outcome {
            Ok((ok, d)) => (ok && in_time, d),
            Err(e) => (false, format!("error: {e}")),
        };
        let limit = if c.limit_s.is_finite() { format!("limit {} s", c.limit_s) } else { "no limit".to_string() };
        println!(
            "{} criterion {:>2} {}: {detail} [{secs:.2} s, {limit}{}]",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            if in_time { "" } else { ", over time" }
        );
        if !pass {
            failed.push(c.id);
        }
    }
    println!("acceptance: {}/{ran} passed; failing: {failed:?}", ran - failed.len());
    if !failed.is_empty() && std::env::var("RWRS_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
