//! Seeded, shard-independent Monte Carlo plumbing.
//!
//! Replicas are grouped into fixed-size blocks. Block `i` of a computation
//! tagged `tag` always draws from the same ChaCha stream derived from
//! `(seed, tag, i)`, whichever worker runs it. Per-block partial results are
//! reduced in block order, so the shard count only affects wall time.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::special::{CompensatedSum, LogSumExp};

/// Replicas per rng block.
pub const BLOCK_SIZE: u64 = 1024;

/// Replica count, base seed and shard count of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub replicas: u64,
    pub seed: u64,
    pub shards: usize,
}

impl McConfig {
    pub fn new(replicas: u64, seed: u64) -> Self {
        Self {
            replicas,
            seed,
            shards: 1,
        }
    }

    pub fn with_shards(mut self, shards: usize) -> Self {
        self.shards = shards;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(invalid("replicas", "must be at least 1"));
        }
        if self.shards == 0 {
            return Err(invalid("shards", "must be at least 1"));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The rng stream of block `block` in the computation `(seed, tag)`.
pub fn block_rng(seed: u64, tag: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(tag)));
    rng.set_stream(block);
    rng
}

/// Runs `work(rng, replicas_in_block)` over all blocks of `cfg` and returns
/// the per-block results in block order.
pub fn run_blocks<T, F>(cfg: &McConfig, tag: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let blocks = cfg.replicas.div_ceil(BLOCK_SIZE);
    let shards = (cfg.shards.max(1) as u64).min(blocks.max(1));
    let per_shard = blocks.div_ceil(shards);
    let run_block = |b: u64| {
        let mut rng = block_rng(cfg.seed, tag, b);
        let count = BLOCK_SIZE.min(cfg.replicas - b * BLOCK_SIZE);
        work(&mut rng, count)
    };
    let per_shard_results: Vec<Vec<T>> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let start = s * per_shard;
            let end = ((s + 1) * per_shard).min(blocks);
            (start..end).map(run_block).collect()
        })
        .collect();
    per_shard_results.into_iter().flatten().collect()
}

/// Sample moments of nonnegative replica values, accumulated in log space.
///
/// `push` takes `ln(value)` so that values far below `1e-300` keep their
/// relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    count: u64,
    sum: LogSumExp,
    sum_sq: LogSumExp,
    min_log: f64,
    max_log: f64,
}

impl Default for SampleStats {
    fn default() -> Self {
        Self {
            count: 0,
            sum: LogSumExp::new(),
            sum_sq: LogSumExp::new(),
            min_log: f64::INFINITY,
            max_log: f64::NEG_INFINITY,
        }
    }
}

impl SampleStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_log(&mut self, log_value: f64) {
        self.count += 1;
        self.sum.add(log_value);
        self.sum_sq.add(2.0 * log_value);
        self.min_log = self.min_log.min(log_value);
        self.max_log = self.max_log.max(log_value);
    }

    pub fn push(&mut self, value: f64) {
        debug_assert!(value >= 0.0);
        self.push_log(value.ln());
    }

    pub fn push_indicator(&mut self, hit: bool) {
        self.push_log(if hit { 0.0 } else { f64::NEG_INFINITY });
    }

    pub fn merge(&mut self, other: &SampleStats) {
        self.count += other.count;
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
        self.min_log = self.min_log.min(other.min_log);
        self.max_log = self.max_log.max(other.max_log);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Number of strictly positive values (only tracked through the sum).
    pub fn is_all_zero(&self) -> bool {
        self.max_log == f64::NEG_INFINITY
    }

    /// `ln` of the sample mean.
    pub fn log_mean(&self) -> f64 {
        self.sum.value() - (self.count as f64).ln()
    }

    pub fn mean(&self) -> f64 {
        self.log_mean().exp()
    }

    /// Squared relative standard error of the mean, `Var(mean) / mean^2`.
    pub fn rel_var_of_mean(&self) -> f64 {
        if self.count < 2 || self.is_all_zero() || self.min_log == self.max_log {
            return 0.0;
        }
        let n = self.count as f64;
        // E[X^2]/E[X]^2 - 1, computed from the log sums.
        let ratio = (self.sum_sq.value() - (n).ln() - 2.0 * self.log_mean()).exp();
        ((ratio - 1.0).max(0.0)) * n / (n - 1.0) / n
    }

    pub fn rel_err(&self) -> f64 {
        self.rel_var_of_mean().sqrt()
    }

    pub fn stderr(&self) -> f64 {
        self.rel_err() * self.mean()
    }

    /// Sample variance of the values themselves.
    pub fn variance(&self) -> f64 {
        self.rel_var_of_mean() * self.count as f64 * self.mean().powi(2)
    }
}

/// Reduces per-block statistics in block order.
pub fn reduce_stats<'a, I: IntoIterator<Item = &'a SampleStats>>(blocks: I) -> SampleStats {
    let mut total = SampleStats::new();
    for b in blocks {
        total.merge(b);
    }
    total
}

/// Sample moments of signed replica values of moderate magnitude.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LinearStats {
    count: u64,
    sum: CompensatedSum,
    sum_sq: CompensatedSum,
}

impl LinearStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }

    pub fn merge(&mut self, other: &LinearStats) {
        self.count += other.count;
        self.sum.add(other.sum.value());
        self.sum_sq.add(other.sum_sq.value());
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.sum.value() / self.count as f64
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let m = self.mean();
        ((self.sum_sq.value() / n - m * m) * n / (n - 1.0)).max(0.0)
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}
