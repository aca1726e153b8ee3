//! Rare-event estimators for `P(Z_n > n t)` and related single-site,
//! weighted-sum and local-time tails.

mod clt;
mod local_time;
mod single_site;
mod weighted;
mod zn;

use std::fmt;
use std::str::FromStr;

pub use clt::{clt_regime_experiment, gaussian_control_ratio, CltResult};
pub use local_time::{local_time_tail, local_time_tail_profile, LocalTimeSandwich};
pub use single_site::{single_site_surrogate, single_site_tail};
pub use weighted::{weighted_sum_tail, weighted_sum_tail_with, WeightedSumBound, WeightedSumResult};
pub use zn::{zn_tail, zn_tail_conditional, zn_tail_mixture_is, zn_tail_naive};

use crate::error::{Error, Result};
use crate::mc::{McConfig, SampleStats};

/// Width, in standard errors, of the reported confidence edges.
pub const CI_Z: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Indicator mean.
    Naive,
    /// Exact tail of the scenery value at the most visited site, given
    /// everything else.
    ConditionalLastSite,
    /// Defensive mixture of the nominal law and single-site exceedances.
    MixtureIS,
    /// Deterministic computation.
    ExactOracle,
    /// Exact tail of `Y_0` averaged over the simulated `l_n(0)`.
    SingleSite,
    /// Exact tail of each summand on the event that it is the largest.
    LargestTerm,
    /// Powers of return-time probabilities bracketing a local-time tail.
    ReturnSandwich,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Naive,
        Method::ConditionalLastSite,
        Method::MixtureIS,
        Method::ExactOracle,
        Method::SingleSite,
        Method::LargestTerm,
        Method::ReturnSandwich,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::ConditionalLastSite => "conditional",
            Method::MixtureIS => "mixture_is",
            Method::ExactOracle => "exact_oracle",
            Method::SingleSite => "single_site",
            Method::LargestTerm => "largest_term",
            Method::ReturnSandwich => "return_sandwich",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| crate::error::invalid("method", format!("unknown method {s:?}")))
    }
}

/// A probability estimate with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub p_hat: f64,
    pub log_p: f64,
    pub stderr: f64,
    pub rel_err: f64,
    pub replicas: u64,
    pub method: Method,
    pub seed: u64,
    pub shards: usize,
    /// One-sided upper confidence edge: `p_hat + CI_Z * stderr`, or the
    /// 95% Clopper-Pearson bound `1 - 0.05^{1/N}` when nothing was observed.
    pub upper_ci: f64,
    /// True for the `n -> infinity` geometric surrogate.
    pub surrogate: bool,
}

impl TailEstimate {
    pub(crate) fn from_stats(stats: &SampleStats, method: Method, cfg: &McConfig) -> Self {
        let replicas = stats.count();
        if stats.is_all_zero() {
            return Self {
                p_hat: 0.0,
                log_p: f64::NEG_INFINITY,
                stderr: 0.0,
                rel_err: f64::INFINITY,
                replicas,
                method,
                seed: cfg.seed,
                shards: cfg.shards,
                upper_ci: clopper_pearson_zero(replicas),
                surrogate: false,
            };
        }
        let log_p = stats.log_mean();
        let rel_err = stats.rel_err();
        let p_hat = log_p.exp();
        let stderr = rel_err * p_hat;
        Self {
            p_hat,
            log_p,
            stderr,
            rel_err,
            replicas,
            method,
            seed: cfg.seed,
            shards: cfg.shards,
            upper_ci: (p_hat + CI_Z * stderr).min(1.0),
            surrogate: false,
        }
    }

    /// Deterministic value; `error` is an absolute error bound reported as
    /// the standard error.
    pub fn exact(log_p: f64, error: f64, method: Method) -> Self {
        let p_hat = log_p.exp();
        let rel_err = if p_hat > 0.0 { error / p_hat } else { f64::INFINITY };
        Self {
            p_hat,
            log_p,
            stderr: error,
            rel_err,
            replicas: 0,
            method,
            seed: 0,
            shards: 0,
            upper_ci: (p_hat + error).min(1.0),
            surrogate: false,
        }
    }

    /// Estimate of `g(p)` by the delta method, e.g. powers of a probability.
    pub(crate) fn map(&self, log_value: f64, derivative: f64, method: Method) -> Self {
        let p_hat = log_value.exp();
        let stderr = derivative.abs() * self.stderr;
        Self {
            p_hat,
            log_p: log_value,
            stderr,
            rel_err: if p_hat > 0.0 { stderr / p_hat } else { f64::INFINITY },
            method,
            upper_ci: (p_hat + CI_Z * stderr).min(1.0),
            ..*self
        }
    }

    /// True when no replica produced a positive value.
    pub fn is_censored(&self) -> bool {
        self.p_hat == 0.0
    }

    /// Standard error of `log_p` (first order).
    pub fn log_stderr(&self) -> f64 {
        self.rel_err
    }
}

/// `1 - 0.05^{1/N}`: 95% upper bound for a probability after `N` misses.
pub fn clopper_pearson_zero(replicas: u64) -> f64 {
    if replicas == 0 {
        return 1.0;
    }
    -(0.05f64.ln() / replicas as f64).exp_m1()
}
