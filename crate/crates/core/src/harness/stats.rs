use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Spread of the best value reached in each run of one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub algo: String,
    pub runs: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation; zero for a single run.
    pub std: f64,
}

impl SummaryStats {
    pub fn from_values(algo: impl Into<String>, values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("no runs to summarise".into()));
        }
        let n = values.len();
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            algo: algo.into(),
            runs: n,
            min: sorted[0],
            max: sorted[n - 1],
            mean,
            median: quantile(&sorted, 0.5),
            std,
        })
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let (a, b) = (sorted[lo], sorted[hi]);
    if lo == hi || a == b {
        a
    } else {
        a + (pos - lo as f64) * (b - a)
    }
}

pub const SUMMARY_METRICS: [&str; 5] = ["Min", "Max", "Mean", "Median", "STD"];

/// One row per metric, one column per algorithm.
pub fn summary_csv(stats: &[SummaryStats]) -> String {
    let mut s = String::from("metric");
    for st in stats {
        write!(s, ",{}", st.algo).unwrap();
    }
    s.push('\n');
    for metric in SUMMARY_METRICS {
        s.push_str(metric);
        for st in stats {
            let v = match metric {
                "Min" => st.min,
                "Max" => st.max,
                "Mean" => st.mean,
                "Median" => st.median,
                _ => st.std,
            };
            write!(s, ",{v:e}").unwrap();
        }
        s.push('\n');
    }
    s
}

/// Reads a table written by [`summary_csv`]; `runs` is left at zero.
pub fn parse_summary_csv(text: &str) -> Result<Vec<SummaryStats>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let algos: Vec<String> = reader.headers()?.iter().skip(1).map(String::from).collect();
    let mut out: Vec<SummaryStats> = algos
        .iter()
        .map(|a| SummaryStats {
            algo: a.clone(),
            runs: 0,
            min: f64::NAN,
            max: f64::NAN,
            mean: f64::NAN,
            median: f64::NAN,
            std: f64::NAN,
        })
        .collect();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec?;
        let metric = rec.get(0).unwrap_or_default().to_string();
        for (j, field) in rec.iter().skip(1).enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::data("summary", Some(row + 1), format!("bad number '{field}'")))?;
            let st = out
                .get_mut(j)
                .ok_or_else(|| Error::data("summary", Some(row + 1), "too many columns"))?;
            match metric.as_str() {
                "Min" => st.min = v,
                "Max" => st.max = v,
                "Mean" => st.mean = v,
                "Median" => st.median = v,
                "STD" => st.std = v,
                other => return Err(Error::data("summary", Some(row + 1), format!("unknown metric '{other}'"))),
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub algo: String,
    pub mean: f64,
    /// `None` when the other mean is zero.
    pub improvement_pct: Option<f64>,
}

/// Percentage by which the reference mean beats every other mean.
pub fn compare_report(stats: &[SummaryStats], reference: &str, maximize: bool) -> Result<Vec<Comparison>> {
    if stats.len() < 2 {
        return Err(Error::Config("comparison needs at least two algorithms".into()));
    }
    let r = stats
        .iter()
        .find(|s| s.algo == reference)
        .ok_or_else(|| Error::Config(format!("reference '{reference}' not in summary")))?;
    Ok(stats
        .iter()
        .filter(|s| s.algo != reference)
        .map(|s| {
            let gain = if maximize { r.mean - s.mean } else { s.mean - r.mean };
            let improvement_pct = (s.mean != 0.0).then(|| 100.0 * gain / s.mean.abs());
            Comparison {
                algo: s.algo.clone(),
                mean: s.mean,
                improvement_pct,
            }
        })
        .collect())
}

pub fn compare_csv(reference: &str, rows: &[Comparison]) -> String {
    let mut s = format!("reference,algo,mean,improvement_pct\n");
    for c in rows {
        let pct = c.improvement_pct.map_or("n/a".to_string(), |p| format!("{p:.2}"));
        writeln!(s, "{reference},{},{:e},{pct}", c.algo, c.mean).unwrap();
    }
    s
}

/// Median and interquartile band of best-so-far fitness per evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceBand {
    pub algo: String,
    pub median: Vec<f64>,
    pub q25: Vec<f64>,
    pub q75: Vec<f64>,
}

/// Aligns best-so-far curves on a shared evaluation axis, extending shorter
/// curves with their last value.
pub fn emit_plot_data(curves: &[(String, Vec<Vec<f64>>)]) -> Vec<ConvergenceBand> {
    let len = curves
        .iter()
        .flat_map(|(_, runs)| runs.iter().map(Vec::len))
        .max()
        .unwrap_or(0);
    curves
        .iter()
        .map(|(algo, runs)| {
            let mut band = ConvergenceBand {
                algo: algo.clone(),
                median: Vec::with_capacity(len),
                q25: Vec::with_capacity(len),
                q75: Vec::with_capacity(len),
            };
            for i in 0..len {
                let mut col: Vec<f64> = runs
                    .iter()
                    .filter_map(|r| r.get(i).or(r.last()).copied())
                    .collect();
                col.sort_by(f64::total_cmp);
                if col.is_empty() {
                    col.push(f64::NAN);
                }
                band.median.push(quantile(&col, 0.5));
                band.q25.push(quantile(&col, 0.25));
                band.q75.push(quantile(&col, 0.75));
            }
            band
        })
        .collect()
}

pub fn convergence_csv(bands: &[ConvergenceBand]) -> String {
    let mut s = String::from("eval_index");
    for b in bands {
        write!(s, ",{0}_median,{0}_q25,{0}_q75", b.algo).unwrap();
    }
    s.push('\n');
    let len = bands.first().map_or(0, |b| b.median.len());
    for i in 0..len {
        write!(s, "{i}").unwrap();
        for b in bands {
            write!(s, ",{},{},{}", b.median[i], b.q25[i], b.q75[i]).unwrap();
        }
        s.push('\n');
    }
    s
}
