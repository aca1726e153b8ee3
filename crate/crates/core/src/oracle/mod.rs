//! Exact and high-precision reference computations at small scale.
//!
//! Every result carries an explicit error bound.

mod first_return;
mod grid;
mod minimize;
mod paths;
mod series;

pub use first_return::{
    first_return_pmf, first_return_pmf_closed, local_time_pmf_first_return, local_time_tail_first_return,
    return_probabilities_1d,
};
pub use grid::{weighted_sum_cdf_grid, GridSpec, MAX_GRID_WORK};
pub use minimize::{grid_scan_i_tilde, minimize_i_tilde, Minimum};
pub use paths::{enumerate_paths, max_enumerable_n, PathStats};
pub use series::{return_prob_series, return_probabilities, ReturnSeries};

/// A numeric reference value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    pub error_bound: f64,
}

impl OracleValue {
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        (x - self.value).abs() <= self.error_bound + slack
    }
}

/// A probability mass function on an ordered support.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf<K> {
    /// Atoms in increasing support order.
    pub atoms: Vec<(K, f64)>,
    /// Bound on the absolute error of the total mass.
    pub mass_error: f64,
}

impl<K: Copy + PartialEq + PartialOrd> Pmf<K> {
    pub fn prob(&self, k: K) -> f64 {
        self.atoms.iter().find(|(x, _)| *x == k).map_or(0.0, |(_, p)| *p)
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|(_, p)| p).sum()
    }

    /// `P(X > k)`.
    pub fn tail(&self, k: K) -> f64 {
        self.atoms.iter().filter(|(x, _)| *x > k).map(|(_, p)| p).sum()
    }
}
