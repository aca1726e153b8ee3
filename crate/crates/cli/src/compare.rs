//! `compare`: simulated log-probabilities against `-beta_n(t) * constant`.
//!
//! Only the row itself is consulted, so verdicts are reproducible from the
//! csv alone.

use std::collections::BTreeMap;
use std::path::Path;

use rwrs_core::estimators::{clopper_pearson_zero, Method};

use crate::error::{CliError, CliResult};
use crate::experiment::{fmt_num, COLUMNS};

pub const COMPARE_COLUMNS: [&str; 17] = [
    "d",
    "q",
    "b",
    "family",
    "n",
    "t",
    "r",
    "method",
    "ratio_paper",
    "ratio_paper_err",
    "ratio_minimized",
    "ratio_minimized_err",
    "one_sided_paper",
    "one_sided_minimized",
    "trend_paper",
    "trend_minimized",
    "status",
];

/// A ratio cell: a value with uncertainty, or a reason there is none.
#[derive(Debug, Clone, PartialEq)]
pub enum Ratio {
    Value { ratio: f64, err: f64 },
    Censored,
    Missing,
}

impl Ratio {
    pub fn value(&self) -> Option<f64> {
        match self {
            Ratio::Value { ratio, .. } => Some(*ratio),
            _ => None,
        }
    }

    fn cells(&self) -> (String, String) {
        match self {
            Ratio::Value { ratio, err } => (fmt_num(*ratio), fmt_num(*err)),
            Ratio::Censored => ("censored".to_string(), String::new()),
            Ratio::Missing => ("n/a".to_string(), String::new()),
        }
    }
}

/// Direction of `|ratio - 1|` across increasing `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    TowardOne,
    AwayFromOne,
    Mixed,
    Insufficient,
}

impl Trend {
    pub fn name(&self) -> &'static str {
        match self {
            Trend::TowardOne => "toward_1",
            Trend::AwayFromOne => "away_from_1",
            Trend::Mixed => "mixed",
            Trend::Insufficient => "insufficient",
        }
    }

    pub fn of(values: &[f64]) -> Trend {
        if values.len() < 2 {
            return Trend::Insufficient;
        }
        let dist: Vec<f64> = values.iter().map(|v| (v - 1.0).abs()).collect();
        if dist.windows(2).all(|w| w[1] < w[0]) {
            Trend::TowardOne
        } else if dist.windows(2).all(|w| w[1] > w[0]) {
            Trend::AwayFromOne
        } else {
            Trend::Mixed
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub key: Vec<String>,
    pub n: u64,
    pub ratio_paper: Ratio,
    pub ratio_minimized: Ratio,
    /// `log(upper CI) / (-beta * constant)`, a lower bound on the ratio.
    pub one_sided_paper: Option<f64>,
    pub one_sided_minimized: Option<f64>,
    pub trend_paper: Trend,
    pub trend_minimized: Trend,
    pub status: String,
}

fn num(row: &BTreeMap<&str, String>, col: &str) -> Option<f64> {
    row.get(col).and_then(|s| s.parse::<f64>().ok())
}

fn ratio_for(log_p: Option<f64>, rel_err: Option<f64>, p_hat: Option<f64>, scale: Option<f64>) -> Ratio {
    let (Some(scale), Some(p_hat)) = (scale, p_hat) else {
        return Ratio::Missing;
    };
    if !(scale > 0.0) {
        return Ratio::Missing;
    }
    if p_hat == 0.0 {
        return Ratio::Censored;
    }
    match log_p {
        Some(l) if l.is_finite() => Ratio::Value {
            ratio: l / -scale,
            err: rel_err.filter(|e| e.is_finite()).unwrap_or(f64::INFINITY) / scale,
        },
        _ => Ratio::Missing,
    }
}

/// Parses `results.csv` text and evaluates every row.
pub fn compare_text(source: &Path, text: &str) -> CliResult<Vec<Comparison>> {
    let input_err = |message: String| CliError::Input {
        path: source.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| input_err(e.to_string()))?.clone();
    let missing: Vec<&str> = COLUMNS.iter().copied().filter(|c| !headers.iter().any(|h| h == *c)).collect();
    if !missing.is_empty() {
        return Err(input_err(format!("missing columns: {}", missing.join(", "))));
    }

    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| input_err(format!("row {}: {e}", i + 1)))?;
        let row: BTreeMap<&str, String> = headers.iter().zip(record.iter().map(str::to_string)).collect();
        let n = row["n"]
            .parse::<u64>()
            .map_err(|_| input_err(format!("row {}: n = `{}` is not an integer", i + 1, row["n"])))?;
        let beta = num(&row, "beta_n");
        let scale = |col: &str| beta.zip(num(&row, col)).map(|(b, c)| b * c);
        let (paper, minimized) = (scale("paper_constant"), scale("minimized_constant"));
        let p_hat = num(&row, "p_hat");
        let log_p = num(&row, "log_p");
        let rel_err = num(&row, "rel_err");

        let upper = p_hat.map(|p| {
            if p == 0.0 {
                let replicas = num(&row, "replicas").unwrap_or(0.0) as u64;
                clopper_pearson_zero(replicas)
            } else {
                let z = rwrs_core::estimators::CI_Z;
                (p + z * num(&row, "stderr").unwrap_or(0.0)).min(1.0)
            }
        });
        let one_sided = |s: Option<f64>| match (upper, s) {
            (Some(u), Some(s)) if u > 0.0 && s > 0.0 => Some(u.ln() / -s),
            _ => None,
        };
        let method_ok = row["method"].parse::<Method>().is_ok();
        let status = if method_ok {
            row["status"].clone()
        } else {
            format!("{};unknown_method", row["status"])
        };

        out.push(Comparison {
            key: ["d", "q", "b", "family", "n", "t", "r", "method"]
                .iter()
                .map(|c| row[*c].clone())
                .collect(),
            n,
            ratio_paper: ratio_for(log_p, rel_err, p_hat, paper),
            ratio_minimized: ratio_for(log_p, rel_err, p_hat, minimized),
            one_sided_paper: one_sided(paper),
            one_sided_minimized: one_sided(minimized),
            trend_paper: Trend::Insufficient,
            trend_minimized: Trend::Insufficient,
            status,
        });
    }
    assign_trends(&mut out);
    Ok(out)
}

/// Groups rows sharing everything but `n` and `t` (so `r` is fixed) and
/// classifies each group's ratios in increasing `n`.
fn assign_trends(rows: &mut [Comparison]) {
    let group_of = |c: &Comparison| {
        let mut k = c.key.clone();
        k.remove(5);
        k.remove(4);
        k
    };
    let mut groups: BTreeMap<Vec<String>, Vec<usize>> = BTreeMap::new();
    for (i, c) in rows.iter().enumerate() {
        groups.entry(group_of(c)).or_default().push(i);
    }
    for idx in groups.into_values() {
        let mut sorted = idx.clone();
        sorted.sort_by_key(|&i| rows[i].n);
        let series = |f: &dyn Fn(&Comparison) -> Option<f64>| -> Vec<f64> { sorted.iter().filter_map(|&i| f(&rows[i])).collect() };
        let paper = Trend::of(&series(&|c| c.ratio_paper.value()));
        let minimized = Trend::of(&series(&|c| c.ratio_minimized.value()));
        for &i in &idx {
            rows[i].trend_paper = paper;
            rows[i].trend_minimized = minimized;
        }
    }
}

pub fn compare_file(path: &Path) -> CliResult<Vec<Comparison>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    compare_text(path, &text)
}

/// Renders the verdict table as csv.
pub fn render(rows: &[Comparison]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(COMPARE_COLUMNS).expect("in-memory write");
    for c in rows {
        let (rp, rpe) = c.ratio_paper.cells();
        let (rm, rme) = c.ratio_minimized.cells();
        let mut rec = c.key.clone();
        rec.extend([
            rp,
            rpe,
            rm,
            rme,
            c.one_sided_paper.map(fmt_num).unwrap_or_default(),
            c.one_sided_minimized.map(fmt_num).unwrap_or_default(),
            c.trend_paper.name().to_string(),
            c.trend_minimized.name().to_string(),
            c.status.clone(),
        ]);
        w.write_record(rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}
