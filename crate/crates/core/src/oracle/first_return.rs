use super::{OracleValue, Pmf};
use crate::error::{invalid, Result};
use crate::special::CompensatedSum;
use crate::walk::WalkSpec;

/// `u[k] = P(S_{2k} = 0)` for the walk on `Z`, `k = 0..=max_k`.
pub fn return_probabilities_1d(max_k: usize) -> Vec<f64> {
    let mut u = Vec::with_capacity(max_k + 1);
    let mut v = 1.0;
    u.push(v);
    for k in 1..=max_k {
        v *= (2 * k - 1) as f64 / (2 * k) as f64;
        u.push(v);
    }
    u
}

/// `g[j] = P(T_1 = 2j)` for `2j <= m`, from the renewal identity
/// `u = delta_0 + f * u`.
pub fn first_return_pmf(m: u64) -> Vec<f64> {
    let jmax = (m / 2) as usize;
    let u = return_probabilities_1d(jmax);
    let mut g = vec![0.0; jmax + 1];
    for j in 1..=jmax {
        let mut acc = CompensatedSum::new();
        acc.add(u[j]);
        for i in 1..j {
            acc.add(-g[i] * u[j - i]);
        }
        g[j] = acc.value();
    }
    g
}

/// Same law from the closed form `P(T_1 = 2j) = u_{2j} / (2j - 1)`.
pub fn first_return_pmf_closed(m: u64) -> Vec<f64> {
    let jmax = (m / 2) as usize;
    let u = return_probabilities_1d(jmax);
    (0..=jmax)
        .map(|j| if j == 0 { 0.0 } else { u[j] / (2 * j - 1) as f64 })
        .collect()
}

/// `c = a * b` truncated to `len` entries; all inputs nonnegative.
fn convolve_truncated(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut c = vec![0.0; len];
    let a_start = a.iter().position(|&x| x != 0.0).unwrap_or(a.len());
    let b_start = b.iter().position(|&x| x != 0.0).unwrap_or(b.len());
    for j in a_start..a.len().min(len) {
        let aj = a[j];
        if aj == 0.0 {
            continue;
        }
        let hi = (len - j).min(b.len());
        if b_start >= hi {
            continue;
        }
        let dst = &mut c[j + b_start..j + hi];
        for (ci, &bi) in dst.iter_mut().zip(&b[b_start..hi]) {
            *ci += aj * bi;
        }
    }
    c
}

/// `P(l_n(0) > a) = P(T_a <= n - 1)` for the walk on `Z`.
///
/// The `a`-fold convolution of the first-return law is formed by binary
/// powering on `{0, 2, ..., n - 1}`.
pub fn local_time_tail_first_return(n: u64, a: u64) -> Result<OracleValue> {
    if n == 0 {
        return Err(invalid("n", "horizon must be at least 1"));
    }
    if a == 0 {
        return Ok(OracleValue {
            value: 1.0,
            error_bound: 0.0,
        });
    }
    let g = first_return_pmf(n - 1);
    let len = g.len();
    if a as usize >= len {
        return Ok(OracleValue {
            value: 0.0,
            error_bound: 0.0,
        });
    }
    let mut result: Option<Vec<f64>> = None;
    let mut base = g;
    let mut e = a;
    let mut convolutions = 0u32;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => {
                    convolutions += 1;
                    convolve_truncated(&r, &base, len)
                }
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = convolve_truncated(&base, &base, len);
        convolutions += 1;
    }
    let value: f64 = result.expect("a >= 1").iter().sum();
    // Sums of nonnegative terms: relative rounding below len * eps per pass.
    let error_bound = value * (convolutions as f64 + 2.0) * len as f64 * f64::EPSILON;
    Ok(OracleValue { value, error_bound })
}

/// Exact law of `l_n(0)` in `d = 1` from iterated convolution of the
/// first-return law.
pub fn local_time_pmf_first_return(spec: &WalkSpec, n: u64) -> Result<Pmf<u64>> {
    if spec.d() != 1 {
        return Err(invalid("d", "the first-return oracle needs d = 1"));
    }
    if n == 0 {
        return Err(invalid("n", "horizon must be at least 1"));
    }
    let g = first_return_pmf(n - 1);
    let len = g.len();
    // survival[m] = P(T_1 > m) on integer times m = 0..n-1.
    let mut survival = Vec::with_capacity(n as usize);
    let mut cum = CompensatedSum::new();
    for m in 0..n as usize {
        if m % 2 == 0 {
            cum.add(g[m / 2]);
        }
        survival.push(1.0 - cum.value());
    }
    const NEGLIGIBLE: f64 = 1e-18;
    let mut atoms = Vec::new();
    let mut f_prev = vec![0.0; len];
    f_prev[0] = 1.0;
    let mut rounding = 0.0;
    let mut k = 1u64;
    loop {
        let mut atom = CompensatedSum::new();
        for (j, &p) in f_prev.iter().enumerate() {
            if p != 0.0 {
                atom.add(p * survival[n as usize - 1 - 2 * j]);
            }
        }
        atoms.push((k, atom.value()));
        let f_next = convolve_truncated(&f_prev, &g, len);
        let remaining: f64 = f_next.iter().sum();
        rounding += remaining * len as f64 * f64::EPSILON;
        if remaining < NEGLIGIBLE {
            return Ok(Pmf {
                atoms,
                mass_error: remaining + rounding + 1e-15,
            });
        }
        f_prev = f_next;
        k += 1;
    }
}
