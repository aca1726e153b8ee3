//! Scale functions, rate functions and asymptotic constants for
//! `log P(Z_n > n t) ~ -beta_n(t) * constant`.
//!
//! Scenery tails are `log P(Y > t) ~ -c t^q` with constant `c`, so the
//! slowly varying correction `gamma` is identically one. It is still carried
//! as an explicit factor.

use crate::error::{invalid, Error, Result};
use crate::scenery::SceneryDist;

/// Inputs of the rate evaluations.
///
/// `walk_constant` is `K_d` for `d <= 2` and the return probability `f_0`
/// for `d >= 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams {
    pub d: usize,
    pub q: f64,
    pub c: f64,
    pub gamma: f64,
    pub walk_constant: f64,
    pub n: f64,
    pub t: f64,
    oracle_mode: bool,
}

impl RateParams {
    /// Parameters in the stretched-exponential regime `q in (0, 1)`.
    pub fn new(d: usize, q: f64, c: f64, walk_constant: f64, n: f64, t: f64) -> Result<Self> {
        Self::build(d, q, c, walk_constant, n, t, false)
    }

    /// Like [`RateParams::new`] but also admits `q = 1`, for checks against
    /// closed forms.
    pub fn oracle(d: usize, q: f64, c: f64, walk_constant: f64, n: f64, t: f64) -> Result<Self> {
        Self::build(d, q, c, walk_constant, n, t, true)
    }

    pub fn for_scenery(d: usize, dist: &SceneryDist, walk_constant: f64, n: f64, t: f64) -> Result<Self> {
        let p = Self::build(d, dist.q(), dist.c(), walk_constant, n, t, dist.q() >= 1.0)?;
        Ok(Self {
            gamma: dist.gamma_factor(0.5),
            ..p
        })
    }

    fn build(d: usize, q: f64, c: f64, walk_constant: f64, n: f64, t: f64, oracle_mode: bool) -> Result<Self> {
        if !(1..=4).contains(&d) {
            return Err(invalid("d", format!("dimension must be in 1..=4, got {d}")));
        }
        let q_ok = if oracle_mode { q > 0.0 && q <= 1.0 } else { q > 0.0 && q < 1.0 };
        if !q_ok {
            let range = if oracle_mode { "(0, 1]" } else { "(0, 1)" };
            return Err(invalid("q", format!("must lie in {range}, got {q}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid("c", format!("must be positive, got {c}")));
        }
        if d <= 2 {
            if !(walk_constant > 0.0 && walk_constant.is_finite()) {
                return Err(invalid("K_d", format!("must be positive, got {walk_constant}")));
            }
        } else if !(walk_constant > 0.0 && walk_constant < 1.0) {
            return Err(invalid("f0", format!("must lie in (0, 1), got {walk_constant}")));
        }
        if !(n >= 1.0 && n.is_finite()) {
            return Err(invalid("n", format!("must be at least 1, got {n}")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid("t", format!("must be positive, got {t}")));
        }
        let p = Self {
            d,
            q,
            c,
            gamma: 1.0,
            walk_constant,
            n,
            t,
            oracle_mode,
        };
        for w in p.window_warnings() {
            log::warn!("{w}");
        }
        Ok(p)
    }

    pub fn is_oracle_mode(&self) -> bool {
        self.oracle_mode
    }

    pub fn kd(&self) -> Option<f64> {
        (self.d <= 2).then_some(self.walk_constant)
    }

    pub fn f0(&self) -> Option<f64> {
        (self.d >= 3).then_some(self.walk_constant)
    }

    /// Coefficient of the local-time rate: `K_1`, `K_2` or `-log f_0`.
    pub fn kappa(&self) -> f64 {
        if self.d >= 3 {
            -self.walk_constant.ln()
        } else {
            self.walk_constant
        }
    }

    pub fn with_level(&self, n: f64, t: f64) -> Result<Self> {
        Self::build(self.d, self.q, self.c, self.walk_constant, n, t, self.oracle_mode).map(|p| Self {
            gamma: self.gamma,
            ..p
        })
    }

    /// Largest admissible exponent `r` in `t >= n^{-r}` (exclusive).
    pub fn window_exponent(&self) -> f64 {
        if self.d == 1 {
            (1.0 - self.q) / (4.0 - self.q)
        } else {
            (1.0 - self.q) / 2.0
        }
    }

    /// The exponent `r` with `t = n^{-r}`.
    pub fn effective_r(&self) -> f64 {
        if self.n <= 1.0 {
            return 0.0;
        }
        -self.t.ln() / self.n.ln()
    }

    /// Human-readable warnings when `t` lies below the admissible window.
    pub fn window_warnings(&self) -> Vec<String> {
        let r = self.effective_r();
        let r_max = self.window_exponent();
        if self.t < 1.0 && r >= r_max {
            vec![format!(
                "t = {} = n^-{r:.4} is below the admissible window t >= n^-r, r < {r_max:.4} (d = {}, q = {})",
                self.t, self.d, self.q
            )]
        } else {
            Vec::new()
        }
    }

    fn log_arg_d2(&self) -> Result<f64> {
        let arg = self.n / self.t.powf(self.q);
        if arg <= 1.0 {
            return Err(Error::Domain(format!(
                "d = 2 needs n / t^q > 1, got {arg} (n = {}, t = {})",
                self.n, self.t
            )));
        }
        Ok(arg.ln())
    }
}

/// The speed `beta_n(t)`.
pub fn beta_n(p: &RateParams) -> Result<f64> {
    let q = p.q;
    let cg = p.c * p.gamma;
    Ok(match p.d {
        1 => p.n.powf(q / (q + 2.0)) * p.t.powf(2.0 * q / (q + 2.0)) * cg.powf(1.0 / (q + 2.0)),
        2 => {
            let l = p.log_arg_d2()?;
            ((q + 1.0) * p.n * p.t).powf(q / (q + 1.0)) * l.powf(-q / (q + 1.0)) * cg.powf(1.0 / (q + 1.0))
        }
        _ => (p.n * p.t).powf(q / (q + 1.0)) * cg.powf(1.0 / (q + 1.0)),
    })
}

/// `alpha_n` with the relative speed-matching residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaN {
    pub alpha: f64,
    /// `|scenery speed / local-time speed - 1|` at `alpha`.
    pub residual: f64,
}

pub fn alpha_n(p: &RateParams) -> Result<AlphaN> {
    let q = p.q;
    let cg = p.c * p.gamma;
    let nt = p.n * p.t;
    let alpha = match p.d {
        1 => p.n.powf((q + 1.0) / (q + 2.0)) * p.t.powf(q / (q + 2.0)) * cg.powf(1.0 / (q + 2.0)),
        2 => {
            let l = p.log_arg_d2()?;
            nt.powf(q / (q + 1.0)) * (cg * l / (q + 1.0)).powf(1.0 / (q + 1.0))
        }
        _ => nt.powf(q / (q + 1.0)) * cg.powf(1.0 / (q + 1.0)),
    };
    let lhs = (nt / alpha).powf(q) * cg;
    let rhs = match p.d {
        1 => alpha * alpha / p.n,
        2 => {
            let l = (p.n / alpha).ln();
            if l <= 0.0 {
                return Err(Error::Domain(format!("alpha_n = {alpha} exceeds n = {}", p.n)));
            }
            alpha / l
        }
        _ => alpha,
    };
    Ok(AlphaN {
        alpha,
        residual: (lhs / rhs - 1.0).abs(),
    })
}

/// Rate of the local time at the origin on scale `alpha_n`.
///
/// In `d = 1` this is `K_1^2 x^2`, the form forced by the speed
/// `K_1^2 alpha^2 / n` of the single-site local-time deviations.
pub fn i_ell(p: &RateParams, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid("x", format!("must be positive, got {x}")));
    }
    let k = p.kappa();
    Ok(match p.d {
        1 => k * k * x * x,
        _ => k * x,
    })
}

/// The alternative `d = 1` form `K_1 x^2`, kept for discrepancy reports.
pub fn i_ell_unsquared(p: &RateParams, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid("x", format!("must be positive, got {x}")));
    }
    Ok(p.kappa() * x * x)
}

/// Closed form of `inf_{xy >= s} y^q + I_ell(x)`.
pub fn i_tilde_closed(p: &RateParams, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(invalid("s", format!("must be positive, got {s}")));
    }
    let q = p.q;
    let k = p.kappa();
    Ok(match p.d {
        1 => (1.0 + q / 2.0) * (2.0 * k * k / q).powf(q / (q + 2.0)) * s.powf(2.0 * q / (q + 2.0)),
        _ => (1.0 + q) * (k / q).powf(q / (q + 1.0)) * s.powf(q / (q + 1.0)),
    })
}

/// Relative tolerance beyond which the two constants are reported as
/// discrepant.
pub const DISCREPANCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremConstant {
    /// The prefactor in its literal closed form.
    pub paper_value: f64,
    /// `I_tilde(1)`.
    pub minimized_value: f64,
    pub discrepant: bool,
}

pub fn theorem_constant(p: &RateParams) -> Result<TheoremConstant> {
    let q = p.q;
    let k = p.kappa();
    let paper_value = match p.d {
        1 => (4.0 * k * k / q).powf(2.0 * q / (q + 2.0)) * (2.0 + q),
        _ => (k / q).powf(q / (q + 1.0)) * (1.0 + q),
    };
    let minimized_value = i_tilde_closed(p, 1.0)?;
    let discrepant = (paper_value - minimized_value).abs() > DISCREPANCY_TOL * paper_value.abs().max(minimized_value.abs());
    Ok(TheoremConstant {
        paper_value,
        minimized_value,
        discrepant,
    })
}

/// Scenery deviation speed `(n t / alpha)^q c` at scale `alpha`.
pub fn scenery_ldp_speed(p: &RateParams, alpha: f64) -> Result<f64> {
    let nt = p.n * p.t;
    if !(alpha > 0.0) || alpha >= nt {
        return Err(invalid("alpha", format!("must lie in (0, n t) = (0, {nt}), got {alpha}")));
    }
    Ok((nt / alpha).powf(p.q) * p.c * p.gamma)
}

/// Fluctuation scale of `Z_n`: `n^{3/4}`, `(n log n)^{1/2}` or `n^{1/2}`.
pub fn a_n(d: usize, n: f64) -> f64 {
    match d {
        1 => n.powf(0.75),
        2 => (n * n.max(std::f64::consts::E).ln()).sqrt(),
        _ => n.sqrt(),
    }
}
