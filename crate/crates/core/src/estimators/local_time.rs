use super::{Method, TailEstimate};
use crate::error::{invalid, Result};
use crate::mc::{run_blocks, McConfig, SampleStats};
use crate::oracle::{first_return_pmf, local_time_tail_first_return};
use crate::walk::{sample_weighted_returns, F0Estimate, Roulette, WalkSpec};

const TAG_LOCAL: u64 = 0x4C54;

/// Bracket `lower <= P(l_n(0) > a) <= upper` with a direct estimate.
///
/// `upper` is `f_0^a` (one in `d <= 2`) and `lower` is
/// `P(T_1 <= floor((n - 1) / a))^a`: `a` returns each within that many
/// steps force `T_a <= n - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalTimeSandwich {
    pub a: u64,
    pub lower: TailEstimate,
    pub upper: TailEstimate,
    pub point: TailEstimate,
}

impl LocalTimeSandwich {
    /// Whether `lower <= point <= upper` holds within `z` combined standard
    /// errors on both sides.
    pub fn is_consistent(&self, z: f64) -> bool {
        let se_lo = self.lower.stderr.hypot(self.point.stderr);
        let se_hi = self.upper.stderr.hypot(self.point.stderr);
        self.point.p_hat >= self.lower.p_hat - z * se_lo && self.point.p_hat <= self.upper.p_hat + z * se_hi
    }
}

/// Sandwich for a single level `a`.
pub fn local_time_tail(spec: &WalkSpec, n: u64, a: u64, cfg: &McConfig) -> Result<LocalTimeSandwich> {
    Ok(local_time_tail_profile(spec, n, &[a], cfg)?.remove(0))
}

fn check(n: u64, levels: &[u64]) -> Result<()> {
    if n == 0 {
        return Err(invalid("n", "horizon must be at least 1"));
    }
    if levels.is_empty() {
        return Err(invalid("a", "need at least one level"));
    }
    for &a in levels {
        if a == 0 || a > n {
            return Err(invalid("a", format!("level must lie in 1..=n = {n}, got {a}")));
        }
    }
    Ok(())
}

fn power(base: &TailEstimate, a: u64, method: Method) -> TailEstimate {
    let af = a as f64;
    if base.p_hat == 0.0 {
        return base.map(f64::NEG_INFINITY, 0.0, method);
    }
    base.map(af * base.log_p, af * base.p_hat.powf(af - 1.0), method)
}

/// Sandwiches for several levels from one set of replicas.
///
/// In `d = 1` the direct value comes from the first-return oracle and the
/// bracket is exact as well. Otherwise every replica records its returns up
/// to time `n - 1`; for `d >= 3` the return probability is estimated from
/// the same replicas with the local-CLT correction for returns after
/// `n - 1`.
pub fn local_time_tail_profile(spec: &WalkSpec, n: u64, levels: &[u64], cfg: &McConfig) -> Result<Vec<LocalTimeSandwich>> {
    check(n, levels)?;
    if spec.d() == 1 {
        return exact_profile(n, levels);
    }
    cfg.validate()?;
    let horizon = n - 1;
    let max_a = *levels.iter().max().expect("nonempty") as usize;
    let roulette = Roulette::default_for(spec.d(), horizon.max(1));
    let first_horizons: Vec<u64> = levels.iter().map(|&a| (n - 1) / a).collect();
    // Per block: point stats per level, first-return stats per level, and
    // first return within the horizon.
    let blocks = run_blocks(cfg, TAG_LOCAL, |rng, count| {
        let mut point = vec![SampleStats::new(); levels.len()];
        let mut first = vec![SampleStats::new(); levels.len()];
        let mut any = SampleStats::new();
        for _ in 0..count {
            let rec = if horizon == 0 {
                Default::default()
            } else {
                sample_weighted_returns(spec, horizon, max_a, roulette, rng).expect("horizon checked")
            };
            for (i, &a) in levels.iter().enumerate() {
                point[i].push(if horizon == 0 { 0.0 } else { rec.at_least_before(a as usize, n) });
                let m = first_horizons[i];
                first[i].push(if m == 0 || rec.times.is_empty() { 0.0 } else { rec.kth_return_by(1, m) });
            }
            any.push(if horizon == 0 || rec.times.is_empty() { 0.0 } else { rec.kth_return_by(1, horizon) });
        }
        (point, first, any)
    });
    let mut point = vec![SampleStats::new(); levels.len()];
    let mut first = vec![SampleStats::new(); levels.len()];
    let mut any = SampleStats::new();
    for (p, f, a) in &blocks {
        for i in 0..levels.len() {
            point[i].merge(&p[i]);
            first[i].merge(&f[i]);
        }
        any.merge(a);
    }
    let f0 = (spec.d() >= 3).then(|| F0Estimate::from_moments(spec.d(), horizon.max(2), any.mean(), any.stderr()));
    Ok(levels
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let point_est = TailEstimate::from_stats(&point[i], Method::Naive, cfg);
            let first_est = TailEstimate::from_stats(&first[i], Method::ReturnSandwich, cfg);
            let lower = power(&first_est, a, Method::ReturnSandwich);
            let upper = match f0 {
                Some(f) => {
                    let base = TailEstimate {
                        p_hat: f.point,
                        log_p: f.point.ln(),
                        stderr: (f.upper - f.lower) / 6.0,
                        rel_err: (f.upper - f.lower) / (6.0 * f.point),
                        ..first_est
                    };
                    power(&base, a, Method::ReturnSandwich)
                }
                None => TailEstimate {
                    replicas: cfg.replicas,
                    seed: cfg.seed,
                    shards: cfg.shards,
                    ..TailEstimate::exact(0.0, 0.0, Method::ReturnSandwich)
                },
            };
            LocalTimeSandwich {
                a,
                lower,
                upper,
                point: point_est,
            }
        })
        .collect())
}

fn exact_profile(n: u64, levels: &[u64]) -> Result<Vec<LocalTimeSandwich>> {
    let g = first_return_pmf(n - 1);
    let upper = TailEstimate::exact(0.0, 0.0, Method::ExactOracle);
    levels
        .iter()
        .map(|&a| {
            let point = local_time_tail_first_return(n, a)?;
            let m = ((n - 1) / a) as usize;
            let first: f64 = g.iter().take(m / 2 + 1).sum();
            let lower = if first > 0.0 {
                TailEstimate::exact(a as f64 * first.ln(), 0.0, Method::ExactOracle)
            } else {
                TailEstimate::exact(f64::NEG_INFINITY, 0.0, Method::ExactOracle)
            };
            Ok(LocalTimeSandwich {
                a,
                lower,
                upper,
                point: TailEstimate::exact(point.value.ln(), point.error_bound, Method::ExactOracle),
            })
        })
        .collect()
}
