use crate::error::{invalid, Result};

/// Minimum of `y^q + I_ell(s / y)` over `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub value: f64,
    pub argmin_y: f64,
    pub error_bound: f64,
}

/// `I_ell(x) = kappa^p x^p` with `p = 2` in `d = 1` and `p = 1` otherwise.
fn power(d: usize) -> f64 {
    if d == 1 {
        2.0
    } else {
        1.0
    }
}

fn check(d: usize, q: f64, kappa: f64, s: f64) -> Result<()> {
    if d == 0 {
        return Err(invalid("d", "dimension must be positive"));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(invalid("q", format!("must lie in (0, 1], got {q}")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(invalid("kappa", format!("must be positive, got {kappa}")));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(invalid("s", format!("must be positive, got {s}")));
    }
    Ok(())
}

/// Objective on `u = ln y`, where it is strictly convex.
struct Objective {
    q: f64,
    p: f64,
    /// `ln(kappa^p s^p)`.
    log_coef: f64,
}

impl Objective {
    fn value(&self, u: f64) -> f64 {
        (self.q * u).exp() + (self.log_coef - self.p * u).exp()
    }

    fn slope(&self, u: f64) -> f64 {
        self.q * (self.q * u).exp() - self.p * (self.log_coef - self.p * u).exp()
    }

    fn curvature(&self, u: f64) -> f64 {
        self.q * self.q * (self.q * u).exp() + self.p * self.p * (self.log_coef - self.p * u).exp()
    }
}

/// `inf_{x y >= s} y^q + I_ell(x)`.
///
/// `I_ell` is increasing, so the constraint binds and the problem reduces
/// to one variable. On `u = ln y` the objective is convex; the minimum is
/// bracketed by a coarse scan, narrowed by golden section and finished with
/// Newton steps on the derivative.
pub fn minimize_i_tilde(d: usize, q: f64, kappa: f64, s: f64) -> Result<Minimum> {
    check(d, q, kappa, s)?;
    let p = power(d);
    let f = Objective {
        q,
        p,
        log_coef: p * (kappa.ln() + s.ln()),
    };
    // The stationary point solves q e^{q u} = p e^{log_coef - p u}.
    let centre = ((p / q).ln() + f.log_coef) / (q + p);
    let (mut lo, mut hi) = (centre - 50.0, centre + 50.0);
    let scan = 200;
    let mut best = (lo, f.value(lo));
    for i in 0..=scan {
        let u = lo + (hi - lo) * i as f64 / scan as f64;
        let v = f.value(u);
        if v < best.1 {
            best = (u, v);
        }
    }
    let step = (hi - lo) / scan as f64;
    lo = best.0 - step;
    hi = best.0 + step;

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f.value(a), f.value(b));
    while hi - lo > 1e-6 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f.value(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f.value(b);
        }
    }
    let mut u = 0.5 * (lo + hi);
    let mut last_step = f64::INFINITY;
    for _ in 0..50 {
        let du = f.slope(u) / f.curvature(u);
        u -= du;
        last_step = du.abs();
        if last_step < 1e-15 * u.abs().max(1.0) {
            break;
        }
    }
    let value = f.value(u);
    // Second-order bound from the last Newton step plus rounding.
    let error_bound = 0.5 * f.curvature(u) * last_step * last_step + 8.0 * f64::EPSILON * value;
    Ok(Minimum {
        value,
        argmin_y: u.exp(),
        error_bound,
    })
}

/// Secondary check: best value of the objective on a geometric grid of
/// `points` values of `y` spanning `[y_lo, y_hi]`.
pub fn grid_scan_i_tilde(d: usize, q: f64, kappa: f64, s: f64, y_lo: f64, y_hi: f64, points: usize) -> Result<Minimum> {
    check(d, q, kappa, s)?;
    if !(y_lo > 0.0 && y_hi > y_lo) || points < 2 {
        return Err(invalid("grid", "need 0 < y_lo < y_hi and at least two points"));
    }
    let p = power(d);
    let f = Objective {
        q,
        p,
        log_coef: p * (kappa.ln() + s.ln()),
    };
    let (ulo, uhi) = (y_lo.ln(), y_hi.ln());
    let du = (uhi - ulo) / (points - 1) as f64;
    let (mut bu, mut bv) = (ulo, f.value(ulo));
    for i in 1..points {
        let u = ulo + du * i as f64;
        let v = f.value(u);
        if v < bv {
            bu = u;
            bv = v;
        }
    }
    // A convex function on a grid overshoots its minimum by at most the
    // objective's variation over one cell.
    let error_bound = (f.value(bu - du) - bv).max(f.value(bu + du) - bv).max(0.0);
    Ok(Minimum {
        value: bv,
        argmin_y: bu.exp(),
        error_bound,
    })
}
