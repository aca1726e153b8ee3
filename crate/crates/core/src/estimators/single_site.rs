use super::zn::run;
use super::{Method, TailEstimate};
use crate::error::{invalid, Result};
use crate::mc::McConfig;
use crate::scenery::SceneryDist;
use crate::special::LogSumExp;
use crate::walk::{sample_ell0, WalkSpec};

const TAG_SINGLE: u64 = 0x5353;

/// Relative truncation error of the geometric series.
const SERIES_REL_TOL: f64 = 1e-12;

/// `P(Y_0 l_n(0) > n t) = E[P(Y > n t / l_n(0))]`, averaging the exact tail
/// over simulated local times at the origin.
pub fn single_site_tail(spec: &WalkSpec, dist: &SceneryDist, n: u64, t: f64, cfg: &McConfig) -> Result<TailEstimate> {
    cfg.validate()?;
    if n == 0 {
        return Err(invalid("n", "horizon must be at least 1"));
    }
    let level = n as f64 * t;
    Ok(run(cfg, TAG_SINGLE, Method::SingleSite, |rng| {
        let ell = sample_ell0(spec, n, rng) as f64;
        dist.log_tail(level / ell)
    }))
}

/// `sum_{k >= 1} (1 - f_0) f_0^{k-1} P(Y > s / k)`: the single-site tail
/// under the geometric law of the total local time of a transient walk.
/// The reported standard error is the truncation bound.
pub fn single_site_surrogate(dist: &SceneryDist, f0: f64, s: f64) -> Result<TailEstimate> {
    if !(f0 > 0.0 && f0 < 1.0) {
        return Err(invalid("f0", format!("must lie in (0, 1), got {f0}")));
    }
    if !s.is_finite() {
        return Err(invalid("s", "level must be finite"));
    }
    let ln_f0 = f0.ln();
    let ln_head = (1.0 - f0).ln();
    let mut sum = LogSumExp::new();
    let mut k = 1u64;
    loop {
        let kf = k as f64;
        sum.add(ln_head + (kf - 1.0) * ln_f0 + dist.log_tail(s / kf));
        // Remaining terms are at most f_0^k in total.
        let log_rest = kf * ln_f0;
        if log_rest < sum.value() + SERIES_REL_TOL.ln() {
            let log_p = sum.value();
            let mut e = TailEstimate::exact(log_p, log_rest.exp(), Method::ExactOracle);
            e.surrogate = true;
            return Ok(e);
        }
        k += 1;
    }
}
