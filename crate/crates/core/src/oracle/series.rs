use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};
use crate::special::{zeta_tail, CompensatedSum};

/// Exact terms are summed for `2k <= 2 * SERIES_TERMS`.
const SERIES_TERMS: usize = 5000;

/// `f_0 = 1 - 1/G` from the Green's function `G = sum_k P(S_{2k} = 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnSeries {
    pub d: usize,
    pub f0: f64,
    pub f0_error: f64,
    pub green: f64,
    pub green_error: f64,
    /// Number of exactly summed terms.
    pub terms: usize,
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = CompensatedSum::new();
    out.push(0.0);
    for i in 1..=n {
        acc.add((i as f64).ln());
        out.push(acc.value());
    }
    out
}

/// `P(S_{2k} = 0)` for `k = 0..=max_k` in dimension `d`.
///
/// `d = 2` uses the rotated-coordinate factorization into two independent
/// walks on `Z`; `d = 3` splits the steps between the third axis and the
/// plane with binomial weights, and `d = 4` splits them between two planes.
pub fn return_probabilities(d: usize, max_k: usize) -> Result<Vec<f64>> {
    if !(1..=4).contains(&d) {
        return Err(invalid("d", format!("dimension must be in 1..=4, got {d}")));
    }
    let lf = ln_factorials(2 * max_k);
    // p1[m] = P(1d walk at 0 after m steps), m even.
    let ln2 = std::f64::consts::LN_2;
    let p1 = |m: usize| -> f64 {
        if m % 2 == 1 {
            0.0
        } else {
            (lf[m] - 2.0 * lf[m / 2] - m as f64 * ln2).exp()
        }
    };
    let p2 = |m: usize| p1(m) * p1(m);
    let ln_binom = |n: usize, k: usize| lf[n] - lf[k] - lf[n - k];
    let (ln_third, ln_two_thirds) = ((1.0f64 / 3.0).ln(), (2.0f64 / 3.0).ln());
    let mut u = Vec::with_capacity(max_k + 1);
    for k in 0..=max_k {
        let steps = 2 * k;
        let v = match d {
            1 => p1(steps),
            2 => p2(steps),
            3 => {
                let mut acc = CompensatedSum::new();
                for j in 0..=k {
                    let m = 2 * j;
                    let w = (ln_binom(steps, m) + m as f64 * ln_third + (steps - m) as f64 * ln_two_thirds).exp();
                    acc.add(w * p1(m) * p2(steps - m));
                }
                acc.value()
            }
            _ => {
                let mut acc = CompensatedSum::new();
                for j in 0..=k {
                    let m = 2 * j;
                    let w = (ln_binom(steps, m) - steps as f64 * ln2).exp();
                    acc.add(w * p2(m) * p2(steps - m));
                }
                acc.value()
            }
        };
        u.push(v);
    }
    Ok(u)
}

fn compute(d: usize) -> ReturnSeries {
    let big_k = SERIES_TERMS;
    let u = return_probabilities(d, big_k).expect("d validated");
    let h = d as f64 / 2.0;
    let green_head: CompensatedSum = u.iter().copied().collect();
    // Fit u_{2k} ~ C k^{-h} (1 + a/k) at k = K and K/2.
    let kf = big_k as f64;
    let r1 = u[big_k] * kf.powf(h);
    let r2 = u[big_k / 2] * (kf / 2.0).powf(h);
    let c = 2.0 * r1 - r2;
    let a = kf * (r2 - r1) / c;
    let start = kf + 1.0;
    let main = c * zeta_tail(h, start);
    let correction = c * a * zeta_tail(h + 1.0, start);
    let green = green_head.value() + main + correction;
    let green_error = correction.abs() + 1e-13 * green;
    ReturnSeries {
        d,
        f0: 1.0 - 1.0 / green,
        f0_error: green_error / (green * green),
        green,
        green_error,
        terms: big_k,
    }
}

/// Return probability of the simple walk in `d = 3, 4`. Cached per process.
pub fn return_prob_series(d: usize) -> Result<ReturnSeries> {
    static CACHE: [OnceLock<ReturnSeries>; 2] = [OnceLock::new(), OnceLock::new()];
    match d {
        1 | 2 => Err(Error::Recurrent(format!(
            "divergent series (recurrent walk) in d = {d}"
        ))),
        3 | 4 => Ok(*CACHE[d - 3].get_or_init(|| compute(d))),
        _ => Err(invalid("d", format!("dimension must be 3 or 4, got {d}"))),
    }
}
