use std::collections::BTreeMap;

use super::Pmf;
use crate::error::{Error, Result};
use crate::walk::WalkSpec;

/// Largest horizon accepted by [`enumerate_paths`] in dimension `d`.
pub fn max_enumerable_n(d: usize) -> u64 {
    match d {
        1 => 20,
        2 | 3 => 10,
        _ => 8,
    }
}

/// Joint law of `(l_n(0), L_n, |R_n|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathStats {
    pub n: u64,
    pub joint: Pmf<(u32, u32, u32)>,
}

impl PathStats {
    pub fn ell0(&self) -> Pmf<u32> {
        marginal(&self.joint, |k| k.0)
    }

    pub fn lmax(&self) -> Pmf<u32> {
        marginal(&self.joint, |k| k.1)
    }

    pub fn range(&self) -> Pmf<u32> {
        marginal(&self.joint, |k| k.2)
    }
}

fn marginal(joint: &Pmf<(u32, u32, u32)>, key: impl Fn(&(u32, u32, u32)) -> u32) -> Pmf<u32> {
    let mut m: BTreeMap<u32, f64> = BTreeMap::new();
    for (k, p) in &joint.atoms {
        *m.entry(key(k)).or_insert(0.0) += p;
    }
    Pmf {
        atoms: m.into_iter().collect(),
        mass_error: joint.mass_error,
    }
}

struct Enumerator {
    d: usize,
    side: usize,
    strides: [usize; 4],
    counts: Vec<u32>,
    origin: usize,
    tally: BTreeMap<(u32, u32, u32), u64>,
}

impl Enumerator {
    fn visit(&mut self, idx: usize, steps_left: u64, lmax: u32, range: u32) {
        if steps_left == 0 {
            *self.tally.entry((self.counts[self.origin], lmax, range)).or_insert(0) += 1;
            return;
        }
        for axis in 0..self.d {
            for next in [idx + self.strides[axis], idx - self.strides[axis]] {
                let c = self.counts[next] + 1;
                self.counts[next] = c;
                self.visit(next, steps_left - 1, lmax.max(c), range + (c == 1) as u32);
                self.counts[next] = c - 1;
            }
        }
    }
}

/// Exact joint law of `(l_n(0), L_n, |R_n|)` by visiting all `(2d)^{n-1}`
/// step sequences.
pub fn enumerate_paths(spec: &WalkSpec, n: u64) -> Result<PathStats> {
    let d = spec.d();
    if n == 0 {
        return Err(crate::error::invalid("n", "horizon must be at least 1"));
    }
    if n > max_enumerable_n(d) {
        return Err(Error::SizeGuard(format!(
            "enumeration of (2d)^(n-1) paths is limited to n <= {} in d = {d}, got n = {n}",
            max_enumerable_n(d)
        )));
    }
    let steps = n - 1;
    // One cell of margin on each side keeps neighbour indices in range.
    let side = 2 * steps as usize + 3;
    let mut strides = [0usize; 4];
    let mut stride = 1;
    for s in strides.iter_mut().take(d) {
        *s = stride;
        stride *= side;
    }
    let centre = (side / 2) * strides.iter().take(d).sum::<usize>();
    let mut e = Enumerator {
        d,
        side,
        strides,
        counts: vec![0; stride],
        origin: centre,
        tally: BTreeMap::new(),
    };
    debug_assert!(e.side >= 3);
    e.counts[centre] = 1;
    e.visit(centre, steps, 1, 1);
    let total = (2.0 * d as f64).powi(steps as i32);
    let atoms = e.tally.into_iter().map(|(k, c)| (k, c as f64 / total)).collect();
    Ok(PathStats {
        n,
        joint: Pmf {
            atoms,
            mass_error: 1e-15,
        },
    })
}
