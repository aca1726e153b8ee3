use super::OracleValue;
use crate::error::{invalid, Error, Result};
use crate::scenery::SceneryDist;
use crate::special::CompensatedSum;

/// Work limit: multiply-adds of the full convolution.
pub const MAX_GRID_WORK: f64 = 2e9;

/// Uniform lattice `h Z` restricted to `[-span, span]` for every weighted
/// summand `l_i Y_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub h: f64,
    pub span: f64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(invalid("h", format!("grid step must be positive, got {}", self.h)));
        }
        if !(self.span >= self.h) {
            return Err(invalid("span", format!("must be at least h = {}, got {}", self.h, self.span)));
        }
        Ok(())
    }
}

/// Cell masses of `l Y` on `[(k - 1/2) h, (k + 1/2) h)`, `k = -K..=K`,
/// and the mass outside those cells.
fn cell_masses(dist: &SceneryDist, l: f64, grid: &GridSpec) -> (Vec<f64>, f64) {
    let k_max = (grid.span / grid.h).floor() as i64;
    let tail_at = |x: f64| dist.tail(x / l);
    let masses: Vec<f64> = (-k_max..=k_max)
        .map(|k| {
            let lo = (k as f64 - 0.5) * grid.h;
            let hi = (k as f64 + 0.5) * grid.h;
            (tail_at(lo) - tail_at(hi)).max(0.0)
        })
        .collect();
    let lo = (-k_max as f64 - 0.5) * grid.h;
    let hi = (k_max as f64 + 0.5) * grid.h;
    let outside = (1.0 - tail_at(lo)) + tail_at(hi);
    (masses, outside)
}

/// `P(sum_i l_i Y_i > s)` by direct convolution of discretized summands.
///
/// Rounding each summand to its nearest cell centre moves the sum by at
/// most `r h / 2`, so with `S'` the discretized sum and `tau` the mass left
/// outside the grid,
/// `P(S' > s + r h/2) - tau <= P(S > s) <= P(S' >= s - r h/2) + tau`.
/// The returned value is `P(S' > s)` and the bound covers that bracket.
pub fn weighted_sum_cdf_grid(dist: &SceneryDist, weights: &[f64], s: f64, grid: &GridSpec) -> Result<OracleValue> {
    grid.validate()?;
    if weights.is_empty() {
        return Err(invalid("weights", "need at least one summand"));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(invalid("weights", format!("weights must be positive, got {w}")));
    }
    let r = weights.len() as f64;
    let k_max = (grid.span / grid.h).floor() as i64;
    let cells = 2.0 * k_max as f64 + 1.0;
    // Step j convolves ((j - 1) (cells - 1) + 1) cells against `cells`.
    let work = cells * (r + (cells - 1.0) * r * (r - 1.0) / 2.0);
    if work > MAX_GRID_WORK {
        return Err(Error::SizeGuard(format!(
            "grid convolution work {work:.3e} exceeds {MAX_GRID_WORK:.0e}; coarsen h or shrink span"
        )));
    }
    // acc[i] holds the mass at lattice point (i - offset) h.
    let mut acc = vec![1.0];
    let mut offset = 0i64;
    let mut outside = 0.0;
    for &l in weights {
        let (m, out) = cell_masses(dist, l, grid);
        outside += out;
        let mut next = vec![0.0; acc.len() + m.len() - 1];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (dst, &b) in next[i..i + m.len()].iter_mut().zip(&m) {
                *dst += a * b;
            }
        }
        acc = next;
        offset += k_max;
    }
    let tail_above = |x: f64, strict: bool| {
        let mut sum = CompensatedSum::new();
        for (i, &p) in acc.iter().enumerate() {
            let v = (i as i64 - offset) as f64 * grid.h;
            if v > x || (!strict && v >= x) {
                sum.add(p);
            }
        }
        sum.value()
    };
    let half_width = r * grid.h / 2.0;
    let value = tail_above(s, true);
    let upper = tail_above(s - half_width, false) + outside;
    let lower = tail_above(s + half_width, true) - outside;
    let rounding = acc.len() as f64 * r * f64::EPSILON;
    let error_bound = (upper - value).max(value - lower).max(0.0) + rounding;
    Ok(OracleValue { value, error_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(h: f64, span: f64) -> GridSpec {
        GridSpec { h, span }
    }

    #[test]
    fn single_summand_is_the_tail() {
        let d = SceneryDist::symmetric_weibull(0.5, 1.0).unwrap();
        for s in [-3.0, 0.0, 2.0, 10.0] {
            let v = weighted_sum_cdf_grid(&d, &[1.0], s, &g(1e-4, 400.0)).unwrap();
            assert!(v.contains(d.tail(s), 0.0), "{s}: {v:?} vs {}", d.tail(s));
            assert!(v.error_bound < 0.02);
        }
    }

    #[test]
    fn symmetric_pair_at_zero() {
        let d = SceneryDist::symmetric_weibull(1.0, 1.0).unwrap();
        let v = weighted_sum_cdf_grid(&d, &[1.0, 1.0], 0.0, &g(0.01, 40.0)).unwrap();
        assert!(v.contains(0.5, 0.0), "{v:?}");
    }

    #[test]
    fn exponential_pair_closed_form() {
        // Centered Exp(1): Y + 1 ~ Exp(1), so P(Y_1 + Y_2 > s) = e^{-(s+2)} (1 + s + 2).
        let d = SceneryDist::centered_weibull(1.0, 1.0).unwrap();
        let s = 1.5;
        let exact = (-(s + 2.0f64)).exp() * (1.0 + s + 2.0);
        let v = weighted_sum_cdf_grid(&d, &[1.0, 1.0], s, &g(0.002, 30.0)).unwrap();
        assert!(v.contains(exact, 0.0), "{v:?} vs {exact}");
        assert!((v.value - exact).abs() < 1e-3);
    }

    #[test]
    fn bound_is_honest_under_refinement() {
        let d = SceneryDist::symmetric_weibull(1.0, 1.0).unwrap();
        for (i, s) in [0.5, 2.0, 4.0, 7.0].iter().enumerate() {
            let w = [3.0, 1.0 + i as f64 * 0.5];
            let coarse = weighted_sum_cdf_grid(&d, &w, *s, &g(0.02, 60.0)).unwrap();
            let fine = weighted_sum_cdf_grid(&d, &w, *s, &g(0.01, 60.0)).unwrap();
            assert!((coarse.value - fine.value).abs() <= coarse.error_bound);
        }
    }

    #[test]
    fn guards() {
        let d = SceneryDist::symmetric_weibull(0.5, 1.0).unwrap();
        assert!(matches!(weighted_sum_cdf_grid(&d, &[1.0; 10], 0.0, &g(1e-6, 100.0)), Err(Error::SizeGuard(_))));
        assert!(weighted_sum_cdf_grid(&d, &[], 0.0, &g(0.1, 1.0)).is_err());
        assert!(weighted_sum_cdf_grid(&d, &[1.0, -1.0], 0.0, &g(0.1, 1.0)).is_err());
        assert!(weighted_sum_cdf_grid(&d, &[1.0], 0.0, &g(0.0, 1.0)).is_err());
    }
}
