use super::weighted::{weighted_sum_tail_with, WeightedSumBound};
use super::{Method, TailEstimate};
use crate::error::{invalid, Result};
use crate::mc::McConfig;
use crate::scenery::SceneryDist;
use crate::special::normal_log_tail;

#[derive(Debug, Clone, PartialEq)]
pub struct CltResult {
    /// `log p / (-n t^2 / 2)`.
    pub ratio: f64,
    pub estimate: TailEstimate,
    /// The same ratio with the exact normal tail `P(N > sqrt(n) t)`.
    pub gaussian_ratio: f64,
    pub warnings: Vec<String>,
}

/// `ln P(N(0, n) > n t) / (-n t^2 / 2)`.
pub fn gaussian_control_ratio(n: u64, t: f64) -> f64 {
    let n = n as f64;
    normal_log_tail(n.sqrt() * t) / (-0.5 * n * t * t)
}

/// Moderate-deviation check for i.i.d. scenery sums with the scenery
/// rescaled to unit variance: compares `log P(sum_{i<n} Y_i / sigma > n t)`
/// with `-n t^2 / 2`. Levels outside `n^{-1/2} << t << n^{-(1-q)/(2-q)}`
/// only produce warnings.
pub fn clt_regime_experiment(dist: &SceneryDist, n: u64, t: f64, cfg: &McConfig) -> Result<CltResult> {
    if n < 2 {
        return Err(invalid("n", "need at least two summands"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    let nf = n as f64;
    let q = dist.q();
    let mut warnings = Vec::new();
    let lo = nf.powf(-0.5);
    let hi = nf.powf(-(1.0 - q) / (2.0 - q));
    if !(t > lo && t < hi) {
        let w = format!("t = {t} lies outside the window ({lo:.4e}, {hi:.4e}) for n = {n}, q = {q}");
        log::warn!("{w}");
        warnings.push(w);
    }
    let sigma = dist.variance().sqrt();
    let bound = WeightedSumBound::new(vec![1.0; n as usize], t * sigma, dist, (q / 10.0).min(0.1), 0.1)?;
    let estimate = weighted_sum_tail_with(Method::LargestTerm, dist, &bound, cfg)?.est;
    Ok(CltResult {
        ratio: estimate.log_p / (-0.5 * nf * t * t),
        estimate,
        gaussian_ratio: gaussian_control_ratio(n, t),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_control_tends_to_one_deep_in_the_tail() {
        // sqrt(n) t = 40.
        let r = gaussian_control_ratio(1600, 1.0);
        assert!((r - 1.0).abs() < 0.01, "{r}");
    }

    #[test]
    fn out_of_window_level_warns() {
        let d = SceneryDist::unit_variance(crate::scenery::Family::SymmetricWeibull, 0.5).unwrap();
        let res = clt_regime_experiment(&d, 100, 1.0, &McConfig::new(256, 1)).unwrap();
        assert_eq!(res.warnings.len(), 1);
        assert!(res.ratio.is_finite());
    }

    #[test]
    fn unit_variance_normalization() {
        // Scaling the scenery does not change the normalized ratio.
        let a = SceneryDist::symmetric_weibull(0.5, 1.0).unwrap();
        let b = SceneryDist::symmetric_weibull(0.5, 3.0).unwrap();
        let cfg = McConfig::new(2048, 4);
        let ra = clt_regime_experiment(&a, 400, 0.1, &cfg).unwrap();
        let rb = clt_regime_experiment(&b, 400, 0.1, &cfg).unwrap();
        assert!((ra.ratio - rb.ratio).abs() < 1e-9 * ra.ratio.abs());
    }
}
