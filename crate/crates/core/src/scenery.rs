//! Scenery laws with Weibull-type upper tails.
//!
//! Both families satisfy `E[Y] = 0`, `E[Y^2] < inf` and
//! `log P(Y > t) ~ -c t^q` with the constant `c = b^{-q}`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::special::gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `Y = +-W` with a fair sign and `W ~ Weibull(q, b)`.
    SymmetricWeibull,
    /// `Y = W - E[W]` with `W ~ Weibull(q, b)`.
    CenteredWeibull,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::SymmetricWeibull => "SymmetricWeibull",
            Family::CenteredWeibull => "CenteredWeibull",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SymmetricWeibull" => Ok(Family::SymmetricWeibull),
            "CenteredWeibull" => Ok(Family::CenteredWeibull),
            other => Err(invalid(
                "family",
                format!("unknown scenery family `{other}` (expected SymmetricWeibull or CenteredWeibull)"),
            )),
        }
    }
}

/// An exact scenery law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneryDist {
    family: Family,
    q: f64,
    b: f64,
    /// `E[W] = b Gamma(1 + 1/q)`; the shift of the centered family.
    weibull_mean: f64,
}

impl SceneryDist {
    /// `q` must lie in `(0, 1]`; `q = 1` is admitted for oracle work only and
    /// rejected by [`SceneryDist::validate_theorem_regime`].
    pub fn new(family: Family, q: f64, b: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(invalid("q", format!("tail exponent must lie in (0, 1], got {q}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(invalid("b", format!("scale must be positive and finite, got {b}")));
        }
        Ok(Self {
            family,
            q,
            b,
            weibull_mean: b * gamma(1.0 + 1.0 / q),
        })
    }

    pub fn symmetric_weibull(q: f64, b: f64) -> Result<Self> {
        Self::new(Family::SymmetricWeibull, q, b)
    }

    pub fn centered_weibull(q: f64, b: f64) -> Result<Self> {
        Self::new(Family::CenteredWeibull, q, b)
    }

    /// The member of `family` with tail exponent `q` and unit variance.
    pub fn unit_variance(family: Family, q: f64) -> Result<Self> {
        let probe = Self::new(family, q, 1.0)?;
        Self::new(family, q, 1.0 / probe.variance().sqrt())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// The constant value of the slowly varying factor, `c = b^{-q}`.
    pub fn c(&self) -> f64 {
        self.b.powf(-self.q)
    }

    /// `gamma(a) = lim D(t^a)/D(t)`, identically 1 for constant `D`.
    pub fn gamma_factor(&self, _a: f64) -> f64 {
        1.0
    }

    pub fn validate_theorem_regime(&self) -> Result<()> {
        if self.q >= 1.0 {
            return Err(invalid("q", "theorem-facing computations require q < 1"));
        }
        Ok(())
    }

    pub fn variance(&self) -> f64 {
        let g2 = gamma(1.0 + 2.0 / self.q);
        match self.family {
            Family::SymmetricWeibull => self.b * self.b * g2,
            Family::CenteredWeibull => {
                let g1 = gamma(1.0 + 1.0 / self.q);
                self.b * self.b * (g2 - g1 * g1)
            }
        }
    }

    /// `(mean, variance)`; the mean is exactly zero for both families.
    pub fn moments(&self) -> (f64, f64) {
        (0.0, self.variance())
    }

    /// `(w/b)^q`, the Weibull cumulative hazard.
    fn hazard(&self, w: f64) -> f64 {
        (w / self.b).powf(self.q)
    }

    /// `ln P(Y > t)`.
    pub fn log_tail(&self, t: f64) -> f64 {
        match self.family {
            Family::SymmetricWeibull => {
                if t >= 0.0 {
                    -std::f64::consts::LN_2 - self.hazard(t)
                } else {
                    (-0.5 * (-self.hazard(-t)).exp()).ln_1p()
                }
            }
            Family::CenteredWeibull => {
                let w = t + self.weibull_mean;
                if w <= 0.0 {
                    0.0
                } else {
                    -self.hazard(w)
                }
            }
        }
    }

    /// `P(Y > t)`.
    pub fn tail(&self, t: f64) -> f64 {
        match self.family {
            Family::SymmetricWeibull if t < 0.0 => 1.0 - 0.5 * (-self.hazard(-t)).exp(),
            _ => self.log_tail(t).exp(),
        }
    }

    /// Inverse-transform map from a sign bit and `u` in `(0, 1]`.
    ///
    /// For the centered family the sign bit is ignored.
    pub fn transform(&self, positive: bool, u: f64) -> f64 {
        let w = self.b * (-u.ln()).powf(1.0 / self.q);
        match self.family {
            Family::SymmetricWeibull => {
                if positive {
                    w
                } else {
                    -w
                }
            }
            Family::CenteredWeibull => w - self.weibull_mean,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let positive = match self.family {
            Family::SymmetricWeibull => rng.random::<bool>(),
            Family::CenteredWeibull => true,
        };
        let u = 1.0 - rng.random::<f64>();
        self.transform(positive, u)
    }

    /// A draw from the law of `Y` conditioned on `Y > u`.
    ///
    /// The likelihood ratio of the unconditional law against this one is
    /// `tail(u)` on `(u, inf)`, see [`SceneryDist::tail_weight`].
    pub fn sample_tail<R: Rng + ?Sized>(&self, u: f64, rng: &mut R) -> Result<f64> {
        let p = self.tail(u);
        if p <= 0.0 {
            return Err(Error::TailUnderflow { level: u });
        }
        let y = match self.family {
            Family::SymmetricWeibull => {
                if u >= 0.0 {
                    self.weibull_beyond(u, rng)
                } else {
                    let a = -u;
                    // Positive half has mass 1/2 out of p.
                    if rng.random::<f64>() * p < 0.5 {
                        self.transform(true, 1.0 - rng.random::<f64>())
                    } else {
                        // W restricted to [0, a), placed on the negative side.
                        let below = -(-self.hazard(a)).exp_m1();
                        let v: f64 = rng.random();
                        -self.b * (-(-v * below).ln_1p()).powf(1.0 / self.q)
                    }
                }
            }
            Family::CenteredWeibull => {
                let v = u + self.weibull_mean;
                if v <= 0.0 {
                    self.sample(rng)
                } else {
                    self.weibull_beyond(v, rng) - self.weibull_mean
                }
            }
        };
        Ok(if y > u { y } else { u.next_up() })
    }

    /// `W | W > w0` for the unsigned Weibull variable.
    fn weibull_beyond<R: Rng + ?Sized>(&self, w0: f64, rng: &mut R) -> f64 {
        let e = -(1.0 - rng.random::<f64>()).ln();
        self.b * (self.hazard(w0) + e).powf(1.0 / self.q)
    }

    /// Importance weight `f/g` of a draw from [`SceneryDist::sample_tail`].
    pub fn tail_weight(&self, u: f64) -> f64 {
        self.tail(u)
    }
}

impl fmt::Display for SceneryDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(q={}, b={})", self.family, self.q, self.b)
    }
}
