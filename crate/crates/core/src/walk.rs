//! Simple symmetric lattice walks on `Z^d` with local-time tracking.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rustc_hash::FxHashMap;

use crate::error::{invalid, Error, Result};
use crate::mc::{reduce_stats, run_blocks, LinearStats, McConfig, SampleStats};

/// Lattice site; coordinates beyond the walk's dimension are zero.
pub type Site = [i32; 4];

pub const MAX_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalkKind {
    SimpleSymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WalkSpec {
    d: usize,
    kind: WalkKind,
}

impl WalkSpec {
    pub fn simple(d: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&d) {
            return Err(invalid("d", format!("dimension must be in 1..=4, got {d}")));
        }
        Ok(Self {
            d,
            kind: WalkKind::SimpleSymmetric,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> WalkKind {
        self.kind
    }

    pub fn is_recurrent(&self) -> bool {
        self.d <= 2
    }

    /// `K_1 = lim n^{-1/2} E[l_n(0)]` and `K_2 = lim E[l_n(0)] / log n`.
    ///
    /// For the simple walk `E[l_n(0)] = sum_{2k<n} P(S_{2k}=0)`, which gives
    /// `K_1 = (2/pi)^{1/2}` and `K_2 = 1/pi`.
    pub fn walk_constant(&self) -> Option<f64> {
        match self.d {
            1 => Some((2.0 / PI).sqrt()),
            2 => Some(1.0 / PI),
            _ => None,
        }
    }

    /// Direction index in `0..2d` from one rng word.
    #[inline]
    fn direction(&self, word: u64) -> usize {
        ((word as u128 * (2 * self.d) as u128) >> 64) as usize
    }
}

enum Storage {
    /// `counts[x + offset]` for `x` in `[-offset, offset]`.
    Line { offset: usize, counts: Vec<u32> },
    Sparse(FxHashMap<u128, u32>),
}

fn pack(site: &Site) -> u128 {
    site.iter()
        .enumerate()
        .fold(0u128, |acc, (i, &c)| acc | ((c as u32 as u128) << (32 * i)))
}

fn unpack(key: u128) -> Site {
    let mut site = [0i32; 4];
    for (i, c) in site.iter_mut().enumerate() {
        *c = (key >> (32 * i)) as u32 as i32;
    }
    site
}

/// Occupation measure `l_n(z) = #{0 <= k < n : S_k = z}` of one path.
pub struct LocalTimeField {
    n: u64,
    d: usize,
    storage: Storage,
    ell0: u32,
    lmax: u32,
    range_size: usize,
}

impl std::fmt::Debug for LocalTimeField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LocalTimeField")
            .field("n", &self.n)
            .field("d", &self.d)
            .field("ell0", &self.ell0)
            .field("lmax", &self.lmax)
            .field("range_size", &self.range_size)
            .finish()
    }
}

impl LocalTimeField {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `l_n(0)`.
    pub fn ell0(&self) -> u32 {
        self.ell0
    }

    /// `L_n = max_z l_n(z)`.
    pub fn lmax(&self) -> u32 {
        self.lmax
    }

    /// `|R_n|`.
    pub fn range_size(&self) -> usize {
        self.range_size
    }

    pub fn local_time(&self, site: &Site) -> u32 {
        match &self.storage {
            Storage::Line { offset, counts } => {
                let idx = site[0] as i64 + *offset as i64;
                if idx < 0 || idx as usize >= counts.len() {
                    0
                } else {
                    counts[idx as usize]
                }
            }
            Storage::Sparse(map) => map.get(&pack(site)).copied().unwrap_or(0),
        }
    }

    /// Visited sites with their local times, in a deterministic order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = (Site, u32)> + '_> {
        match &self.storage {
            Storage::Line { offset, counts } => {
                let offset = *offset as i64;
                Box::new(counts.iter().enumerate().filter(|(_, &c)| c > 0).map(move |(i, &c)| {
                    ([(i as i64 - offset) as i32, 0, 0, 0], c)
                }))
            }
            Storage::Sparse(map) => Box::new(map.iter().map(|(&k, &c)| (unpack(k), c))),
        }
    }

    /// Local times in the same order as [`LocalTimeField::iter`].
    pub fn local_times(&self) -> Vec<u32> {
        self.iter().map(|(_, c)| c).collect()
    }

    /// Site of maximal local time; ties go to the lexicographically smallest.
    pub fn argmax_site(&self) -> (Site, u32) {
        let mut best: Option<(Site, u32)> = None;
        for (site, c) in self.iter() {
            best = match best {
                None => Some((site, c)),
                Some((bs, bc)) if c > bc || (c == bc && site < bs) => Some((site, c)),
                keep => keep,
            };
        }
        best.expect("a local time field always contains the origin")
    }

    pub fn total(&self) -> u64 {
        self.iter().map(|(_, c)| c as u64).sum()
    }
}

/// Simulates the occupation statistics of the first `n` positions
/// `S_0, ..., S_{n-1}` (so `n - 1` steps, one rng word per step).
pub fn simulate_path<R: Rng + ?Sized>(spec: &WalkSpec, n: u64, rng: &mut R) -> Result<LocalTimeField> {
    if n == 0 {
        return Err(invalid("n", "horizon must be at least 1"));
    }
    let d = spec.d;
    let steps = n - 1;
    let mut ell0 = 1u32;
    let mut lmax = 1u32;
    let mut range_size = 1usize;

    let storage = if d == 1 {
        let offset = steps as usize;
        let mut counts = vec![0u32; 2 * offset + 1];
        let mut x = offset;
        counts[x] = 1;
        for _ in 0..steps {
            if rng.next_u64() >> 63 == 0 {
                x -= 1;
            } else {
                x += 1;
            }
            let c = &mut counts[x];
            if *c == 0 {
                range_size += 1;
            }
            *c += 1;
            lmax = lmax.max(*c);
        }
        ell0 = counts[offset];
        Storage::Line { offset, counts }
    } else {
        let mut map: FxHashMap<u128, u32> = FxHashMap::default();
        map.reserve((steps as usize).min(1 << 20) + 1);
        let mut pos: Site = [0; 4];
        map.insert(pack(&pos), 1);
        for _ in 0..steps {
            let dir = spec.direction(rng.next_u64());
            pos[dir / 2] += if dir % 2 == 0 { 1 } else { -1 };
            let c = map.entry(pack(&pos)).or_insert(0);
            if *c == 0 {
                range_size += 1;
            }
            *c += 1;
            lmax = lmax.max(*c);
            if pos == [0; 4] {
                ell0 = *c;
            }
        }
        Storage::Sparse(map)
    };

    let field = LocalTimeField {
        n,
        d,
        storage,
        ell0,
        lmax,
        range_size,
    };
    debug_assert_eq!(field.total(), n);
    Ok(field)
}

/// L1 distance below which the walker takes single steps.
const JUMP_MIN: i64 = 8;

/// A walker that only tracks visits to the origin.
///
/// From a site at L1 distance `r` the origin cannot be reached in fewer
/// than `r` steps, so the walker moves `r - 1` steps at once by sampling the
/// exact `(r-1)`-step displacement. Return times keep their exact law.
#[derive(Debug, Clone)]
pub struct ReturnWalker {
    d: usize,
    pos: [i64; 4],
    time: u64,
    roulette: Option<Roulette>,
    next_level: i64,
    weight: f64,
    killed: bool,
    events: Vec<RouletteEvent>,
}

/// Russian roulette on distance doublings.
///
/// Each time an excursion first reaches L1 distance `start * 2^k` the walker
/// survives with probability `survival` and its weight is divided by it;
/// otherwise it is killed. Weighted indicators of future returns stay
/// unbiased.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Roulette {
    pub start: i64,
    pub survival: f64,
}

impl Roulette {
    /// The setting used by the estimators: long transient horizons only.
    pub fn default_for(d: usize, horizon: u64) -> Option<Self> {
        (d >= 3 && horizon >= 1 << 14).then_some(Self {
            start: 32,
            survival: 0.5,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.start < 2 {
            return Err(invalid("roulette.start", "must be at least 2"));
        }
        if !(self.survival > 0.0 && self.survival <= 1.0) {
            return Err(invalid("roulette.survival", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// A roulette decision; `weight_after` is zero when the walker was killed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouletteEvent {
    pub time: u64,
    pub pos: [i64; 4],
    pub weight_before: f64,
    pub weight_after: f64,
}

impl RouletteEvent {
    /// Euclidean distance to the origin.
    pub fn distance(&self) -> f64 {
        self.pos.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt()
    }
}

/// Above this many steps a fair-coin count uses the BTPE sampler.
const POPCOUNT_MAX_STEPS: u64 = 1 << 14;

/// Number of heads in `steps` fair coin flips.
fn fair_binomial<R: Rng + ?Sized>(steps: u64, rng: &mut R) -> u64 {
    if steps > POPCOUNT_MAX_STEPS {
        return Binomial::new(steps, 0.5).expect("valid binomial").sample(rng);
    }
    let mut heads = 0u64;
    let mut left = steps;
    while left >= 64 {
        heads += rng.next_u64().count_ones() as u64;
        left -= 64;
    }
    if left > 0 {
        heads += (rng.next_u64() >> (64 - left)).count_ones() as u64;
    }
    heads
}

fn signed_binomial_steps<R: Rng + ?Sized>(steps: u64, rng: &mut R) -> i64 {
    2 * fair_binomial(steps, rng) as i64 - steps as i64
}

impl ReturnWalker {
    pub fn new(spec: &WalkSpec) -> Self {
        Self {
            d: spec.d,
            pos: [0; 4],
            time: 0,
            roulette: None,
            next_level: i64::MAX,
            weight: 1.0,
            killed: false,
            events: Vec::new(),
        }
    }

    pub fn with_roulette(spec: &WalkSpec, roulette: Roulette) -> Result<Self> {
        roulette.validate()?;
        let mut w = Self::new(spec);
        w.next_level = roulette.start;
        w.roulette = Some(roulette);
        Ok(w)
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    /// Importance weight carried by the walker (1 without roulette).
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn is_killed(&self) -> bool {
        self.killed
    }

    /// Roulette decisions since the last call.
    pub fn drain_events(&mut self) -> std::vec::Drain<'_, RouletteEvent> {
        self.events.drain(..)
    }

    fn play_roulette<R: Rng + ?Sized>(&mut self, r: i64, rng: &mut R) {
        let Some(rl) = self.roulette else { return };
        while !self.killed && r >= self.next_level {
            let before = self.weight;
            if rl.survival >= 1.0 || rng.random::<f64>() < rl.survival {
                self.weight /= rl.survival;
            } else {
                self.weight = 0.0;
                self.killed = true;
            }
            self.events.push(RouletteEvent {
                time: self.time,
                pos: self.pos,
                weight_before: before,
                weight_after: self.weight,
            });
            self.next_level = self.next_level.saturating_mul(2);
        }
    }

    fn l1(&self) -> i64 {
        self.pos.iter().map(|c| c.abs()).sum()
    }

    fn single_step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let word = rng.next_u64();
        let dir = ((word as u128 * (2 * self.d) as u128) >> 64) as usize;
        self.pos[dir / 2] += if dir % 2 == 0 { 1 } else { -1 };
        self.time += 1;
    }

    fn planar_jump<R: Rng + ?Sized>(&mut self, axis: usize, steps: u64, rng: &mut R) {
        // In rotated coordinates u = x + y, v = x - y the planar walk is a
        // pair of independent +-1 walks.
        let du = signed_binomial_steps(steps, rng);
        let dv = signed_binomial_steps(steps, rng);
        self.pos[axis] += (du + dv) / 2;
        self.pos[axis + 1] += (du - dv) / 2;
    }

    fn jump<R: Rng + ?Sized>(&mut self, steps: u64, rng: &mut R) {
        match self.d {
            1 => self.pos[0] += signed_binomial_steps(steps, rng),
            2 => self.planar_jump(0, steps, rng),
            3 => {
                let on_z = Binomial::new(steps, 1.0 / 3.0).expect("valid binomial").sample(rng);
                self.pos[2] += signed_binomial_steps(on_z, rng);
                self.planar_jump(0, steps - on_z, rng);
            }
            _ => {
                let first = fair_binomial(steps, rng);
                self.planar_jump(0, first, rng);
                self.planar_jump(2, steps - first, rng);
            }
        }
        self.time += steps;
    }

    /// Advances to the next visit of the origin at a time `<= horizon` and
    /// returns that time; returns `None` with the clock at `horizon` if there
    /// is none.
    /// A killed walker never returns.
    pub fn next_return<R: Rng + ?Sized>(&mut self, horizon: u64, rng: &mut R) -> Option<u64> {
        while self.time < horizon && !self.killed {
            let r = self.l1();
            if r >= JUMP_MIN {
                let steps = ((r - 1) as u64).min(horizon - self.time);
                self.jump(steps, rng);
                self.play_roulette(self.l1(), rng);
            } else {
                self.single_step(rng);
                if self.pos == [0; 4] {
                    if let Some(rl) = self.roulette {
                        self.next_level = rl.start;
                    }
                    return Some(self.time);
                }
                self.play_roulette(self.l1(), rng);
            }
        }
        None
    }
}

/// Return times `T_1 < T_2 < ...` observed up to a horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnTimes {
    pub horizon: u64,
    pub times: Vec<u64>,
    /// True when the walk was stopped by the horizon before `max_returns`
    /// returns; the next return time is then only known to exceed `horizon`.
    pub censored: bool,
}

/// One return-time record; a censored entry carries `time = horizon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReturnTime {
    pub time: u64,
    pub censored: bool,
}

impl ReturnTimes {
    pub fn entries(&self) -> impl Iterator<Item = ReturnTime> + '_ {
        let tail = self.censored.then_some(ReturnTime {
            time: self.horizon,
            censored: true,
        });
        self.times
            .iter()
            .map(|&time| ReturnTime { time, censored: false })
            .chain(tail)
    }

    /// Uncensored increments `T_i - T_{i-1}` (with `T_0 = 0`).
    pub fn increments(&self) -> Vec<u64> {
        let mut prev = 0;
        self.times
            .iter()
            .map(|&t| {
                let inc = t - prev;
                prev = t;
                inc
            })
            .collect()
    }

    /// `l_{n}(0)` for `n <= horizon + 1`.
    pub fn local_time_at_origin(&self, n: u64) -> u64 {
        1 + self.times.iter().filter(|&&t| t < n).count() as u64
    }
}

pub fn sample_return_times<R: Rng + ?Sized>(
    spec: &WalkSpec,
    horizon: u64,
    max_returns: usize,
    rng: &mut R,
) -> Result<ReturnTimes> {
    if horizon == 0 {
        return Err(invalid("horizon", "must be at least 1"));
    }
    let mut walker = ReturnWalker::new(spec);
    let mut times = Vec::with_capacity(max_returns.min(64));
    while times.len() < max_returns {
        match walker.next_return(horizon, rng) {
            Some(t) => times.push(t),
            None => break,
        }
    }
    let censored = times.len() < max_returns;
    Ok(ReturnTimes {
        horizon,
        times,
        censored,
    })
}

/// `l_n(0)` of a fresh walk, without tracking any other site.
pub fn sample_ell0<R: Rng + ?Sized>(spec: &WalkSpec, n: u64, rng: &mut R) -> u64 {
    let mut walker = ReturnWalker::new(spec);
    let mut ell = 1;
    while walker.next_return(n - 1, rng).is_some() {
        ell += 1;
    }
    ell
}

/// Returns of one replica, with roulette weights and decisions.
#[derive(Debug, Clone, Default)]
pub struct WeightedReturns {
    pub horizon: u64,
    pub times: Vec<u64>,
    /// Walker weight at each return.
    pub weights: Vec<f64>,
}

pub fn sample_weighted_returns<R: Rng + ?Sized>(
    spec: &WalkSpec,
    horizon: u64,
    max_returns: usize,
    roulette: Option<Roulette>,
    rng: &mut R,
) -> Result<WeightedReturns> {
    let mut walker = match roulette {
        Some(rl) => ReturnWalker::with_roulette(spec, rl)?,
        None => ReturnWalker::new(spec),
    };
    let mut out = WeightedReturns {
        horizon,
        ..Default::default()
    };
    while out.times.len() < max_returns {
        let next = walker.next_return(horizon, rng);
        match next {
            Some(t) => {
                out.times.push(t);
                out.weights.push(walker.weight());
            }
            None => break,
        }
    }
    Ok(out)
}

impl WeightedReturns {
    /// Unbiased estimate of `P(T_k <= m)`.
    pub fn kth_return_by(&self, k: usize, m: u64) -> f64 {
        debug_assert!(k >= 1 && m <= self.horizon);
        match self.times.get(k - 1) {
            Some(&t) if t <= m => self.weights[k - 1],
            _ => 0.0,
        }
    }

    /// Unbiased estimate of `P(#{returns at times < n} >= k)`.
    pub fn at_least_before(&self, k: usize, n: u64) -> f64 {
        if k == 0 {
            return 1.0;
        }
        self.kth_return_by(k, n - 1)
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
}

const TAG_KD: u64 = 0x4B44;
const TAG_F0: u64 = 0x4630;

/// Monte Carlo estimate of `n^{-1/2} E[l_n(0)]` (d = 1) or
/// `E[l_n(0)] / log n` (d = 2).
pub fn estimate_kd(spec: &WalkSpec, n: u64, cfg: &McConfig) -> Result<Estimate> {
    cfg.validate()?;
    let norm = match spec.d {
        1 => (n as f64).sqrt(),
        2 => (n as f64).ln(),
        _ => return Err(invalid("d", "K_d is only defined for d <= 2")),
    };
    if n < 2 {
        return Err(invalid("n", "need n >= 2 for a nonzero normalizer"));
    }
    let blocks = run_blocks(cfg, TAG_KD, |rng, count| {
        let mut s = SampleStats::new();
        for _ in 0..count {
            s.push(sample_ell0(spec, n, rng) as f64);
        }
        s
    });
    let stats = reduce_stats(&blocks);
    Ok(Estimate {
        estimate: stats.mean() / norm,
        stderr: stats.stderr() / norm,
    })
}

/// Local-CLT envelope constant: `P(S_{2k} = 0) <= C_d k^{-d/2}` for all `k`.
///
/// `C_d = 2 (d / (4 pi))^{d/2}` is the limit of `k^{d/2} P(S_{2k} = 0)`,
/// which the simple walk approaches from below (checked against the exact
/// return probabilities in the oracle tests).
pub fn return_envelope_constant(d: usize) -> f64 {
    2.0 * (d as f64 / (4.0 * PI)).powf(d as f64 / 2.0)
}

/// Upper bound on `P(m < T_1 < inf)` from the local-CLT envelope.
pub fn late_return_bound(d: usize, m: u64) -> f64 {
    let h = d as f64 / 2.0;
    let k0 = (m / 2 + 1) as f64;
    return_envelope_constant(d) * (k0.powf(-h) + k0.powf(1.0 - h) / (h - 1.0))
}

/// Sandwich for the return probability `f_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F0Estimate {
    /// `P(T_1 <= m)` estimate minus three standard errors.
    pub lower: f64,
    /// `P(T_1 <= m)` plus three standard errors plus [`late_return_bound`].
    pub upper: f64,
    pub point: f64,
    /// Empirical `P(T_1 <= m)`.
    pub within_horizon: f64,
    pub stderr: f64,
    pub late_bound: f64,
}

impl F0Estimate {
    pub(crate) fn from_moments(d: usize, m: u64, p: f64, stderr: f64) -> Self {
        let late_bound = late_return_bound(d, m);
        let lower = (p - 3.0 * stderr).max(0.0);
        let upper = (p + 3.0 * stderr + late_bound).min(1.0);
        Self {
            lower,
            upper,
            point: 0.5 * (lower + upper),
            within_horizon: p,
            stderr,
            late_bound,
        }
    }
}

/// Estimates `P(T_1 <= m)` and brackets `f_0` with [`late_return_bound`].
pub fn estimate_f0(spec: &WalkSpec, m: u64, cfg: &McConfig) -> Result<F0Estimate> {
    cfg.validate()?;
    if spec.is_recurrent() {
        return Err(Error::Recurrent("f_0 = 1 for d <= 2".into()));
    }
    if m < 2 {
        return Err(invalid("m", "horizon must be at least 2"));
    }
    let roulette = Roulette::default_for(spec.d, m);
    let blocks = run_blocks(cfg, TAG_F0, |rng, count| {
        let mut s = LinearStats::new();
        for _ in 0..count {
            let rec = sample_weighted_returns(spec, m, 1, roulette, rng).expect("validated horizon");
            s.push(rec.kth_return_by(1, m));
        }
        s
    });
    let mut stats = LinearStats::new();
    for b in &blocks {
        stats.merge(b);
    }
    Ok(F0Estimate::from_moments(spec.d, m, stats.mean(), stats.stderr()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_bad_dimension_and_horizon() {
        assert!(WalkSpec::simple(0).is_err());
        assert!(WalkSpec::simple(5).is_err());
        let spec = WalkSpec::simple(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(simulate_path(&spec, 0, &mut rng).is_err());
    }

    #[test]
    fn single_position_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for d in 1..=4 {
            let f = simulate_path(&WalkSpec::simple(d).unwrap(), 1, &mut rng).unwrap();
            assert_eq!((f.ell0(), f.lmax(), f.range_size()), (1, 1, 1));
        }
    }

    #[test]
    fn occupation_identity_and_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=4 {
            let spec = WalkSpec::simple(d).unwrap();
            for n in [2, 3, 17, 1000] {
                let f = simulate_path(&spec, n, &mut rng).unwrap();
                assert_eq!(f.total(), n);
                assert!(f.ell0() >= 1);
                assert!(f.lmax() as u64 <= n && f.lmax() >= 1);
                assert!(f.range_size() as u64 <= n && f.range_size() >= 1);
                assert_eq!(f.local_time(&[0; 4]), f.ell0());
                assert_eq!(f.iter().count(), f.range_size());
                assert_eq!(f.iter().map(|(_, c)| c).max().unwrap(), f.lmax());
            }
        }
    }

    #[test]
    fn argmax_breaks_ties_lexicographically() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let spec = WalkSpec::simple(2).unwrap();
        for _ in 0..50 {
            let f = simulate_path(&spec, 30, &mut rng).unwrap();
            let (site, c) = f.argmax_site();
            assert_eq!(c, f.lmax());
            let smallest = f.iter().filter(|&(_, v)| v == c).map(|(s, _)| s).min().unwrap();
            assert_eq!(site, smallest);
        }
    }

    #[test]
    fn mean_ell0_at_n4_in_d1() {
        // l_4(0) = 1 + 1{S_2 = 0}, so E = 1.5.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let spec = WalkSpec::simple(1).unwrap();
        let reps = 200_000;
        let sum: u64 = (0..reps).map(|_| simulate_path(&spec, 4, &mut rng).unwrap().ell0() as u64).sum();
        let mean = sum as f64 / reps as f64;
        assert!((mean - 1.5).abs() < 4.0 * (0.25 / reps as f64).sqrt(), "{mean}");
    }

    #[test]
    fn jumping_walker_matches_stepwise_law() {
        // Same law of l_n(0) from the full path and from the jumping walker.
        for d in 1..=3 {
            let spec = WalkSpec::simple(d).unwrap();
            let n = 400;
            let reps = 40_000;
            let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
            let a: Vec<f64> = (0..reps).map(|_| simulate_path(&spec, n, &mut rng).unwrap().ell0() as f64).collect();
            let b: Vec<f64> = (0..reps).map(|_| sample_ell0(&spec, n, &mut rng) as f64).collect();
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let var = |v: &[f64]| {
                let m = mean(v);
                v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
            };
            let se = ((var(&a) + var(&b)) / reps as f64).sqrt();
            assert!((mean(&a) - mean(&b)).abs() < 4.0 * se, "d={d}: {} vs {}", mean(&a), mean(&b));
        }
    }

    #[test]
    fn return_time_parity_and_ordering() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in 1..=4 {
            let spec = WalkSpec::simple(d).unwrap();
            for _ in 0..200 {
                let rt = sample_return_times(&spec, 10_000, 20, &mut rng).unwrap();
                for w in rt.times.windows(2) {
                    assert!(w[0] < w[1]);
                }
                for inc in rt.increments() {
                    assert!(inc >= 2 && inc % 2 == 0);
                }
                assert!(rt.times.iter().all(|&t| t <= 10_000));
                let entries: Vec<_> = rt.entries().collect();
                assert_eq!(entries.len(), rt.times.len() + rt.censored as usize);
            }
        }
    }

    #[test]
    fn f0_rejects_recurrent_walks() {
        let cfg = McConfig::new(10, 1);
        let err = estimate_f0(&WalkSpec::simple(1).unwrap(), 100, &cfg).unwrap_err();
        assert!(err.to_string().contains("recurrent"));
        assert!(matches!(err, Error::Recurrent(_)));
    }

    #[test]
    fn kd_rejects_transient_walks_and_has_exact_small_case() {
        let cfg = McConfig::new(100, 1);
        assert!(estimate_kd(&WalkSpec::simple(3).unwrap(), 100, &cfg).is_err());
        let est = estimate_kd(&WalkSpec::simple(1).unwrap(), 2, &cfg).unwrap();
        assert!((est.estimate - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn fair_binomial_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for steps in [0u64, 1, 5, 63, 64, 65, 1000, POPCOUNT_MAX_STEPS + 1] {
            let reps = 20_000;
            let xs: Vec<f64> = (0..reps).map(|_| fair_binomial(steps, &mut rng) as f64).collect();
            assert!(xs.iter().all(|&x| x <= steps as f64));
            let mean = xs.iter().sum::<f64>() / reps as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
            let sd = (steps as f64 / 4.0).sqrt();
            assert!((mean - steps as f64 / 2.0).abs() <= 5.0 * sd / (reps as f64).sqrt() + 1e-12);
            assert!((var - steps as f64 / 4.0).abs() <= 0.1 * steps as f64 / 4.0 + 1e-12);
        }
    }

    #[test]
    fn roulette_keeps_weighted_return_law() {
        let spec = WalkSpec::simple(3).unwrap();
        let rl = Roulette { start: 8, survival: 0.5 };
        let (n, reps) = (20_000u64, 40_000);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let (mut plain, mut weighted, mut wsq) = (0.0, 0.0, 0.0);
        for _ in 0..reps {
            plain += ReturnWalker::new(&spec).next_return(n, &mut rng).is_some() as u8 as f64;
            let mut w = ReturnWalker::with_roulette(&spec, rl).unwrap();
            if w.next_return(n, &mut rng).is_some() {
                weighted += w.weight();
                wsq += w.weight() * w.weight();
            }
            for ev in w.drain_events() {
                assert!(ev.weight_after == 0.0 || ev.weight_after == 2.0 * ev.weight_before);
            }
        }
        let r = reps as f64;
        let (p, q) = (plain / r, weighted / r);
        let se = (p * (1.0 - p) / r + (wsq / r - q * q) / r).sqrt();
        assert!((p - q).abs() < 4.0 * se, "{p} vs {q}");
    }

    #[test]
    fn roulette_parameters_are_checked() {
        let spec = WalkSpec::simple(3).unwrap();
        assert!(ReturnWalker::with_roulette(&spec, Roulette { start: 1, survival: 0.5 }).is_err());
        assert!(ReturnWalker::with_roulette(&spec, Roulette { start: 8, survival: 0.0 }).is_err());
    }

    #[test]
    fn late_return_bound_decreases() {
        let mut prev = f64::INFINITY;
        for m in [10, 100, 1000, 1_000_000] {
            let b = late_return_bound(3, m);
            assert!(b < prev && b > 0.0);
            prev = b;
        }
    }
}
