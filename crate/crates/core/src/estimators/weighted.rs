use super::zn::run;
use super::{Method, TailEstimate};
use crate::error::{invalid, Result};
use crate::mc::McConfig;
use crate::scenery::SceneryDist;
use crate::special::LogSumExp;

const TAG_WEIGHTED: u64 = 0x5753;

/// Inputs and closed-form outputs of the weighted-sum tail bound
/// `P(sum_i l_i Y_i > n t) <= exp(-(n t / L)^q c (1 - 4 eps))`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSumBound {
    pub weights: Vec<f64>,
    /// `n = sum_i l_i`.
    pub n: f64,
    /// `L = max_i l_i`.
    pub l_max: f64,
    pub t: f64,
    pub q: f64,
    pub c: f64,
    pub eps: f64,
    pub eta: f64,
    /// `m_n = n t^{(2-q)/(1-q)}`.
    pub m_n: f64,
    /// `(n t)^{-1} (n t / L)^q c (1 - 2 eps)`.
    pub lambda_n: f64,
    pub bound_log: f64,
    /// `L <= min(n t, m_n)^{1 - eta}`.
    pub precondition_ok: bool,
}

pub const DEFAULT_EPS: f64 = 0.1;
pub const DEFAULT_ETA: f64 = 0.1;

impl WeightedSumBound {
    pub fn new(weights: Vec<f64>, t: f64, dist: &SceneryDist, eps: f64, eta: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("weights", "need at least one weight (r >= 1)"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(invalid("weights", format!("weights must be positive, got {w}")));
        }
        let q = dist.q();
        if !(q < 1.0) {
            return Err(invalid("q", "the bound needs q < 1"));
        }
        if !(eps > 0.0 && eps < 0.25) {
            return Err(invalid("eps", format!("must lie in (0, 1/4), got {eps}")));
        }
        if eps >= q / 5.0 {
            log::warn!("eps = {eps} is not below q/5 = {}", q / 5.0);
        }
        if !(eta > 0.0) {
            return Err(invalid("eta", format!("must be positive, got {eta}")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid("t", format!("must be positive, got {t}")));
        }
        let c = dist.c();
        let n: f64 = weights.iter().sum();
        let l_max = weights.iter().copied().fold(0.0, f64::max);
        let nt = n * t;
        let m_n = n * t.powf((2.0 - q) / (1.0 - q));
        let speed = (nt / l_max).powf(q) * c;
        Ok(Self {
            n,
            l_max,
            t,
            q,
            c,
            eps,
            eta,
            m_n,
            lambda_n: speed * (1.0 - 2.0 * eps) / nt,
            bound_log: -speed * (1.0 - 4.0 * eps),
            precondition_ok: l_max <= nt.min(m_n).powf(1.0 - eta),
            weights,
        })
    }

    pub fn with_defaults(weights: Vec<f64>, t: f64, dist: &SceneryDist) -> Result<Self> {
        Self::new(weights, t, dist, DEFAULT_EPS, DEFAULT_ETA)
    }

    pub fn r(&self) -> usize {
        self.weights.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSumResult {
    pub est: TailEstimate,
    pub bound_log: f64,
    /// `bound_log - ln(upper CI edge)`; negative when the estimate exceeds
    /// the bound.
    pub margin: f64,
    pub violated: bool,
}

/// Tail of `sum_i l_i Y_i` by the largest-term estimator.
pub fn weighted_sum_tail(dist: &SceneryDist, bound: &WeightedSumBound, cfg: &McConfig) -> Result<WeightedSumResult> {
    weighted_sum_tail_with(Method::LargestTerm, dist, bound, cfg)
}

/// `Method::LargestTerm` sums, over summands `i`, the exact probability that
/// `l_i Y_i` exceeds both the other summands' maximum and the remaining gap
/// to `n t`, given all other summands:
/// `P(S > x) = sum_i E[P(l_i Y_i > max(M_{-i}, x - S_{-i}) | Y_{-i})]`.
///
/// `Method::ConditionalLastSite` conditions on all summands but the one of
/// largest weight.
pub fn weighted_sum_tail_with(method: Method, dist: &SceneryDist, bound: &WeightedSumBound, cfg: &McConfig) -> Result<WeightedSumResult> {
    cfg.validate()?;
    let level = bound.n * bound.t;
    let w = &bound.weights;
    let est = match method {
        Method::LargestTerm => run(cfg, TAG_WEIGHTED, method, |rng| {
            let xs: Vec<f64> = w.iter().map(|&l| l * dist.sample(rng)).collect();
            let total: f64 = xs.iter().sum();
            let (mut top, mut second, mut top_i) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0);
            for (i, &x) in xs.iter().enumerate() {
                if x > top {
                    second = top;
                    top = x;
                    top_i = i;
                } else if x > second {
                    second = x;
                }
            }
            let mut lse = LogSumExp::new();
            for (i, (&x, &l)) in xs.iter().zip(w).enumerate() {
                let others_max = if i == top_i { second } else { top };
                let gap = level - (total - x);
                lse.add(dist.log_tail(others_max.max(gap) / l));
            }
            lse.value()
        }),
        Method::ConditionalLastSite => {
            let star = w
                .iter()
                .enumerate()
                .fold(0, |best, (i, &l)| if l > w[best] { i } else { best });
            run(cfg, TAG_WEIGHTED, method, |rng| {
                let rest: f64 = w
                    .iter()
                    .enumerate()
                    .map(|(i, &l)| if i == star { 0.0 } else { l * dist.sample(rng) })
                    .sum();
                dist.log_tail((level - rest) / w[star])
            })
        }
        other => return Err(invalid("method", format!("{other} does not apply to weighted sums"))),
    };
    let log_upper = est.upper_ci.ln();
    let margin = bound.bound_log - log_upper;
    Ok(WeightedSumResult {
        est,
        bound_log: bound.bound_log,
        margin,
        violated: bound.precondition_ok && log_upper > bound.bound_log,
    })
}
