use rand::Rng;

use super::{Method, TailEstimate};
use crate::error::{invalid, Result};
use crate::mc::{reduce_stats, run_blocks, McConfig, SampleStats};
use crate::scenery::SceneryDist;
use crate::special::LogSumExp;
use crate::walk::{simulate_path, LocalTimeField, WalkSpec};

const TAG_NAIVE: u64 = 0x5A4E;
const TAG_COND: u64 = 0x5A43;
const TAG_MIX: u64 = 0x5A4D;

/// Defensive weight of the nominal law in the mixture proposal.
const MIXTURE_NOMINAL_WEIGHT: f64 = 0.5;

fn check(n: u64, t: f64, cfg: &McConfig) -> Result<()> {
    cfg.validate()?;
    if n == 0 {
        return Err(invalid("n", "horizon must be at least 1"));
    }
    if !t.is_finite() {
        return Err(invalid("t", format!("level must be finite, got {t}")));
    }
    Ok(())
}

pub(crate) fn run<F>(cfg: &McConfig, tag: u64, method: Method, log_value: F) -> TailEstimate
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync,
{
    let blocks = run_blocks(cfg, tag, |rng, count| {
        let mut s = SampleStats::new();
        for _ in 0..count {
            s.push_log(log_value(rng));
        }
        s
    });
    TailEstimate::from_stats(&reduce_stats(&blocks), method, cfg)
}

/// `sum_z Y_z l_n(z)` with a fresh scenery on the range.
fn scenery_sum<R: Rng + ?Sized>(field: &LocalTimeField, dist: &SceneryDist, rng: &mut R) -> f64 {
    field.iter().map(|(_, l)| dist.sample(rng) * l as f64).sum()
}

/// Indicator mean of `1{Z_n > n t}`.
pub fn zn_tail_naive(spec: &WalkSpec, dist: &SceneryDist, n: u64, t: f64, cfg: &McConfig) -> Result<TailEstimate> {
    check(n, t, cfg)?;
    let level = n as f64 * t;
    Ok(run(cfg, TAG_NAIVE, Method::Naive, |rng| {
        let field = simulate_path(spec, n, rng).expect("n checked");
        if scenery_sum(&field, dist, rng) > level {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    }))
}

/// Conditional Monte Carlo given the walk and the scenery off the most
/// visited site `z*`: averages `P(Y > (n t - sum_{z != z*} Y_z l(z)) / l(z*))`.
pub fn zn_tail_conditional(spec: &WalkSpec, dist: &SceneryDist, n: u64, t: f64, cfg: &McConfig) -> Result<TailEstimate> {
    check(n, t, cfg)?;
    let level = n as f64 * t;
    Ok(run(cfg, TAG_COND, Method::ConditionalLastSite, |rng| {
        let field = simulate_path(spec, n, rng).expect("n checked");
        let (star, l_star) = field.argmax_site();
        let mut rest = 0.0;
        for (site, l) in field.iter() {
            if site != star {
                rest += dist.sample(rng) * l as f64;
            }
        }
        dist.log_tail((level - rest) / l_star as f64)
    }))
}

/// Importance sampling from a defensive mixture: with probability 1/2 the
/// nominal scenery, otherwise a site `z` chosen with probability
/// proportional to `P(Y > n t / l(z))` whose value is drawn beyond that
/// threshold. The likelihood ratio is
/// `1 / (w + (1 - w) N / T)`, with `N` the number of sites exceeding their
/// thresholds and `T` the sum of the threshold tails.
pub fn zn_tail_mixture_is(spec: &WalkSpec, dist: &SceneryDist, n: u64, t: f64, cfg: &McConfig) -> Result<TailEstimate> {
    check(n, t, cfg)?;
    if t <= 0.0 {
        return Err(invalid("t", "the mixture proposal needs a positive level"));
    }
    let level = n as f64 * t;
    let w0 = MIXTURE_NOMINAL_WEIGHT;
    Ok(run(cfg, TAG_MIX, Method::MixtureIS, |rng| {
        let field = simulate_path(spec, n, rng).expect("n checked");
        let sites: Vec<f64> = field.local_times().into_iter().map(|l| l as f64).collect();
        let log_tails: Vec<f64> = sites.iter().map(|&l| dist.log_tail(level / l)).collect();
        let mut lse = LogSumExp::new();
        for &lt in &log_tails {
            lse.add(lt);
        }
        let log_total = lse.value();
        let mut values: Vec<f64> = sites.iter().map(|_| dist.sample(rng)).collect();
        if log_total > f64::NEG_INFINITY && rng.random::<f64>() >= w0 {
            // Pick a site proportionally to its threshold tail.
            let target = rng.random::<f64>();
            let mut acc = 0.0;
            let mut pick = sites.len() - 1;
            for (i, &lt) in log_tails.iter().enumerate() {
                acc += (lt - log_total).exp();
                if target < acc {
                    pick = i;
                    break;
                }
            }
            values[pick] = dist
                .sample_tail(level / sites[pick], rng)
                .expect("threshold tail is positive");
        }
        let z: f64 = values.iter().zip(&sites).map(|(y, l)| y * l).sum();
        if z <= level {
            return f64::NEG_INFINITY;
        }
        let exceed = values.iter().zip(&sites).filter(|(y, l)| **y > level / **l).count();
        if exceed == 0 || log_total == f64::NEG_INFINITY {
            return -w0.ln();
        }
        // ln(w0 + (1-w0) N / T) evaluated without overflow.
        let log_ratio = ((1.0 - w0) * exceed as f64).ln() - log_total;
        -crate::special::log_add_exp(w0.ln(), log_ratio)
    }))
}

/// Dispatches on the method.
pub fn zn_tail(method: Method, spec: &WalkSpec, dist: &SceneryDist, n: u64, t: f64, cfg: &McConfig) -> Result<TailEstimate> {
    match method {
        Method::Naive => zn_tail_naive(spec, dist, n, t, cfg),
        Method::ConditionalLastSite => zn_tail_conditional(spec, dist, n, t, cfg),
        Method::MixtureIS => zn_tail_mixture_is(spec, dist, n, t, cfg),
        other => Err(invalid("method", format!("{other} does not estimate P(Z_n > n t)"))),
    }
}
