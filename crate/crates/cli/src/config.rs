//! Experiment configuration: a flat `section.key = value` text format.
//!
//! ```text
//! # comments start with '#'
//! scenery.family = SymmetricWeibull
//! scenery.q = 0.5
//! scenery.b = 1
//! walk.d = 3
//! grid.n = 1000, 10000
//! grid.t = 0.5
//! estimate.methods = naive, conditional
//! mc.replicas = 10000
//! mc.seed = 7
//! ```
//!
//! All values stay strings until validation, so a resolved configuration can
//! be echoed verbatim into `manifest.json` and loaded back from there.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rwrs_core::{Family, Method, SceneryDist, WalkKind, WalkSpec};

use crate::error::{CliError, CliResult, ConfigError};

/// Every accepted key with its default (`None` when required).
const KEYS: &[(&str, Option<&str>)] = &[
    ("scenery.family", Some("SymmetricWeibull")),
    ("scenery.q", None),
    ("scenery.b", Some("1")),
    ("walk.d", None),
    ("walk.kind", Some("simple")),
    ("walk.constant", None),
    ("grid.n", None),
    ("grid.t", None),
    ("grid.r", None),
    ("estimate.methods", Some("conditional")),
    ("mc.replicas", Some("10000")),
    ("mc.seed", Some("1")),
    ("mc.shards", Some("1")),
    ("output.dir", Some("out")),
    ("lemma1.eps", Some("0.1")),
    ("lemma1.eta", Some("0.1")),
];

/// Methods that estimate `P(Z_n > n t)` or its single-site relatives.
pub const ESTIMATE_METHODS: [Method; 5] = [
    Method::Naive,
    Method::ConditionalLastSite,
    Method::MixtureIS,
    Method::SingleSite,
    Method::ExactOracle,
];

/// Key-value pairs with the line each came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawConfig {
    pub source_name: String,
    entries: BTreeMap<String, (String, Option<usize>)>,
}

impl RawConfig {
    pub fn parse_text(source_name: &str, text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig {
            source_name: source_name.to_string(),
            entries: BTreeMap::new(),
        };
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(raw.error_at(Some(lineno), content, "expected `key = value`"));
            };
            raw.insert(key.trim(), value.trim(), Some(lineno))?;
        }
        Ok(raw)
    }

    /// Reads the `config` object of a manifest written by `estimate`.
    pub fn parse_manifest(source_name: &str, text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig {
            source_name: source_name.to_string(),
            entries: BTreeMap::new(),
        };
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| raw.error_at(Some(e.line()), "manifest", e.to_string()))?;
        let Some(config) = value.get("config").and_then(|c| c.as_object()) else {
            return Err(raw.error_at(None, "config", "manifest has no `config` object"));
        };
        for (key, v) in config {
            let Some(s) = v.as_str() else {
                return Err(raw.error_at(None, key, "values must be strings"));
            };
            raw.insert(key, s, None)?;
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let name = path.display().to_string();
        let raw = if text.trim_start().starts_with('{') {
            Self::parse_manifest(&name, &text)?
        } else {
            Self::parse_text(&name, &text)?
        };
        Ok(raw)
    }

    fn insert(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), ConfigError> {
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(self.error_at(line, key, "unknown key"));
        }
        if value.is_empty() {
            return Err(self.error_at(line, key, "empty value"));
        }
        if let Some((_, Some(prev))) = self.entries.get(key) {
            return Err(self.error_at(line, key, format!("duplicate key (first set on line {prev})")));
        }
        self.entries.insert(key.to_string(), (value.to_string(), line));
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        self.entries.remove(key);
        self.insert(key, value, None)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).and_then(|(_, l)| *l)
    }

    fn error_at(&self, line: Option<usize>, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            source_name: self.source_name.clone(),
            line,
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        self.error_at(self.line(key), key, message)
    }

    fn value_or_default(&self, key: &str) -> Result<String, ConfigError> {
        if let Some(v) = self.get(key) {
            return Ok(v.to_string());
        }
        match KEYS.iter().find(|(k, _)| *k == key).and_then(|(_, d)| *d) {
            Some(d) => Ok(d.to_string()),
            None => Err(self.error(key, "required key is missing")),
        }
    }

    fn parse_with<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, ConfigError> {
        let v = self.value_or_default(key)?;
        parse(&v).map_err(|m| self.error(key, m))
    }

    fn parse_list<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, ConfigError> {
        let v = self.value_or_default(key)?;
        v.split(',').map(|s| parse(s.trim()).map_err(|m| self.error(key, m))).collect()
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("`{s}` is not a finite number"))
}

/// Integers, also accepted in exact scientific form such as `1e6`.
fn parse_u64(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 9.0e15 => Ok(x as u64),
        _ => Err(format!("`{s}` is not a nonnegative integer")),
    }
}

fn parse_usize(s: &str) -> Result<usize, String> {
    parse_u64(s).map(|v| v as usize)
}

fn core_msg(e: rwrs_core::Error) -> String {
    e.to_string()
}

/// The level parameterization of a grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Levels {
    T(Vec<f64>),
    /// `t = n^{-r}`.
    R(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub n: u64,
    pub t: f64,
    pub r: f64,
}

/// A validated experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dist: SceneryDist,
    pub walk: WalkSpec,
    /// Overrides `K_d` (`d <= 2`) or `f_0` (`d >= 3`) of the simple walk.
    pub walk_constant: Option<f64>,
    pub n: Vec<u64>,
    pub levels: Levels,
    pub methods: Vec<Method>,
    pub replicas: u64,
    pub seed: u64,
    pub shards: usize,
    pub output_dir: PathBuf,
    pub eps: f64,
    pub eta: f64,
    raw: RawConfig,
}

impl ExperimentConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        let family: Family = raw.parse_with("scenery.family", |s| s.parse().map_err(core_msg))?;
        let q = raw.parse_with("scenery.q", parse_f64)?;
        let b = raw.parse_with("scenery.b", parse_f64)?;
        let dist = SceneryDist::new(family, q, b).map_err(|e| {
            let key = match &e {
                rwrs_core::Error::InvalidParameter { name, .. } if *name == "b" => "scenery.b",
                _ => "scenery.q",
            };
            raw.error(key, e.to_string())
        })?;
        let d = raw.parse_with("walk.d", parse_usize)?;
        let walk = WalkSpec::simple(d).map_err(|e| raw.error("walk.d", e.to_string()))?;
        raw.parse_with("walk.kind", |s| match s {
            "simple" | "SimpleSymmetric" => Ok(WalkKind::SimpleSymmetric),
            other => Err(format!("unknown walk kind `{other}` (only `simple` is supported)")),
        })?;
        let walk_constant = match raw.get("walk.constant") {
            None => None,
            Some(_) => Some(raw.parse_with("walk.constant", |s| {
                let k = parse_f64(s)?;
                match (walk.is_recurrent(), k) {
                    (true, k) if k > 0.0 => Ok(k),
                    (false, k) if k > 0.0 && k < 1.0 => Ok(k),
                    (true, _) => Err(format!("K_d must be positive, got {k}")),
                    (false, _) => Err(format!("f_0 must lie in (0, 1), got {k}")),
                }
            })?),
        };

        let n = raw.parse_list("grid.n", |s| match parse_u64(s)? {
            0 => Err("n must be at least 1".to_string()),
            v => Ok(v),
        })?;
        let levels = match (raw.get("grid.t"), raw.get("grid.r")) {
            (Some(_), Some(_)) => return Err(raw.error("grid.r", "set either grid.t or grid.r, not both")),
            (None, None) => return Err(raw.error("grid.t", "one of grid.t or grid.r is required")),
            (Some(_), None) => Levels::T(raw.parse_list("grid.t", parse_f64)?),
            (None, Some(_)) => Levels::R(raw.parse_list("grid.r", parse_f64)?),
        };

        let methods = raw.parse_list("estimate.methods", |s| {
            let m: Method = s.parse().map_err(core_msg)?;
            if !ESTIMATE_METHODS.contains(&m) {
                let names: Vec<_> = ESTIMATE_METHODS.iter().map(|m| m.name()).collect();
                return Err(format!("method `{s}` cannot be used here (expected one of {})", names.join(", ")));
            }
            if m == Method::ExactOracle && walk.is_recurrent() {
                return Err("exact_oracle needs a transient walk (walk.d >= 3)".to_string());
            }
            Ok(m)
        })?;
        let mut seen = Vec::new();
        for m in &methods {
            if seen.contains(m) {
                return Err(raw.error("estimate.methods", format!("method `{m}` listed twice")));
            }
            seen.push(*m);
        }

        let replicas = raw.parse_with("mc.replicas", |s| match parse_u64(s)? {
            0 => Err("replicas must be at least 1".to_string()),
            v => Ok(v),
        })?;
        let seed = raw.parse_with("mc.seed", parse_u64)?;
        let shards = raw.parse_with("mc.shards", |s| match parse_usize(s)? {
            0 => Err("shards must be at least 1".to_string()),
            v => Ok(v),
        })?;
        let output_dir = PathBuf::from(raw.value_or_default("output.dir")?);
        let eps = raw.parse_with("lemma1.eps", |s| {
            let e = parse_f64(s)?;
            if e > 0.0 && e < 0.25 {
                Ok(e)
            } else {
                Err(format!("eps must lie in (0, 1/4), got {e}"))
            }
        })?;
        let eta = raw.parse_with("lemma1.eta", |s| {
            let e = parse_f64(s)?;
            if e > 0.0 && e < 1.0 {
                Ok(e)
            } else {
                Err(format!("eta must lie in (0, 1), got {e}"))
            }
        })?;

        let cfg = Self {
            dist,
            walk,
            walk_constant,
            n,
            levels,
            methods,
            replicas,
            seed,
            shards,
            output_dir,
            eps,
            eta,
            raw,
        };
        if let Some(p) = cfg.points().iter().find(|p| !p.t.is_finite() || p.t == 0.0 && matches!(cfg.levels, Levels::R(_))) {
            return Err(cfg.raw.error("grid.r", format!("level t = {} at n = {} is not usable", p.t, p.n)));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let raw = RawConfig::load(path)?;
        Ok(Self::from_raw(raw)?)
    }

    /// Grid points in emission order: `n` ascending, then by level.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut n = self.n.clone();
        n.sort_unstable();
        n.dedup();
        let mut out = Vec::new();
        for &n in &n {
            let ln_n = (n as f64).ln();
            let mut level_points: Vec<GridPoint> = match &self.levels {
                Levels::T(ts) => ts
                    .iter()
                    .map(|&t| GridPoint {
                        n,
                        t,
                        r: if n > 1 && t > 0.0 {
                            -t.ln() / ln_n
                        } else if t > 0.0 {
                            0.0
                        } else {
                            f64::NAN
                        },
                    })
                    .collect(),
                Levels::R(rs) => rs
                    .iter()
                    .map(|&r| GridPoint {
                        n,
                        t: (-r * ln_n).exp(),
                        r,
                    })
                    .collect(),
            };
            level_points.sort_by(|a, b| a.t.total_cmp(&b.t));
            level_points.dedup_by(|a, b| a.t == b.t);
            out.extend(level_points);
        }
        out
    }

    /// The resolved configuration with defaults filled in, as strings.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for (key, default) in KEYS {
            let value = self.raw.get(key).map(str::to_string).or(default.map(str::to_string));
            if let Some(v) = value {
                out.insert(key.to_string(), v);
            }
        }
        out
    }

    pub fn source_name(&self) -> &str {
        &self.raw.source_name
    }
}
