//! Metric, benchmark and regex-coverage report files.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::{Map, Value};
use synlog_core::anonymize::RegexCategory;
use synlog_core::metrics::MetricsReport;
use synlog_core::variables::RegexCoverage;

use crate::error::{Error, Result};

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn flat_object(report: &MetricsReport) -> Value {
    let mut obj = Map::new();
    obj.insert("ga".into(), report.ga.into());
    obj.insert("pa".into(), report.pa.into());
    obj.insert("fga".into(), report.fga.into());
    obj.insert("fta".into(), report.fta.into());
    obj.insert("pga".into(), report.pga.into());
    obj.insert("rga".into(), report.rga.into());
    obj.insert("pta".into(), report.pta.into());
    obj.insert("rta".into(), report.rta.into());
    obj.insert("messages_total".into(), report.messages_total.into());
    obj.insert(
        "predicted_templates".into(),
        report.predicted_templates.into(),
    );
    obj.insert("truth_templates".into(), report.truth_templates.into());
    obj.insert("correct_groups".into(), report.correct_groups.into());
    obj.insert("correct_templates".into(), report.correct_templates.into());
    Value::Object(obj)
}

/// Baseline (grouper templates) and, when present, refined metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub baseline: MetricsReport,
    pub refined: Option<MetricsReport>,
}

impl Evaluation {
    fn variants(&self) -> Vec<(&'static str, MetricsReport)> {
        let mut v = vec![("baseline", self.baseline)];
        if let Some(r) = self.refined {
            v.push(("synlog", r));
        }
        v
    }

    pub fn to_json(&self) -> String {
        let mut root = Map::new();
        for (name, report) in self.variants() {
            root.insert(name.into(), flat_object(&report));
        }
        if let Some(r) = self.refined {
            let delta: Map<String, Value> = r
                .delta(&self.baseline)
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.into()))
                .collect();
            root.insert("delta".into(), Value::Object(delta));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("json value");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("variant,{}\n", MetricsReport::csv_header());
        for (name, report) in self.variants() {
            s.push_str(&format!("{name},{}\n", report.csv_row()));
        }
        s
    }

    /// `variant.key=value` lines, deltas last.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        for (name, report) in self.variants() {
            for line in report.to_key_value().lines() {
                s.push_str(&format!("{name}.{line}\n"));
            }
        }
        if let Some(r) = self.refined {
            for (k, v) in r.delta(&self.baseline) {
                s.push_str(&format!("delta.{k}={v}\n"));
            }
        }
        s
    }

    /// Writes `metrics.json` and `metrics.csv` into `out_dir`.
    pub fn write(&self, out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
        let json = out_dir.join("metrics.json");
        let csv = out_dir.join("metrics.csv");
        write(&json, &self.to_json())?;
        write(&csv, &self.to_csv())?;
        Ok((json, csv))
    }
}

/// `category,count,fraction` rows: every category, then `unmatched`,
/// `matched`, `total` and `misaligned_pairs` (as a fraction of messages).
pub fn regex_stats_csv(coverage: &RegexCoverage) -> String {
    let total = coverage.total();
    let frac = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    let mut s = String::from("category,count,fraction\n");
    for c in RegexCategory::ALL {
        let n = coverage.count(c);
        s.push_str(&format!("{c},{n},{}\n", frac(n, total)));
    }
    s.push_str(&format!(
        "unmatched,{},{}\n",
        coverage.unmatched,
        frac(coverage.unmatched, total)
    ));
    s.push_str(&format!(
        "matched,{},{}\n",
        coverage.matched(),
        coverage.matched_fraction()
    ));
    s.push_str(&format!(
        "total,{total},{}\n",
        if total == 0 { 0.0 } else { 1.0 }
    ));
    s.push_str(&format!(
        "misaligned_pairs,{},{}\n",
        coverage.misaligned_pairs,
        frac(coverage.misaligned_pairs, coverage.messages)
    ));
    s
}

pub fn write_regex_stats(coverage: &RegexCoverage, out_dir: &Path) -> Result<PathBuf> {
    let path = out_dir.join("regex_stats.csv");
    write(&path, &regex_stats_csv(coverage))?;
    Ok(path)
}

/// Median stage timings over repeated runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchReport {
    pub records: usize,
    pub groups: usize,
    pub repeat: usize,
    pub threads: usize,
    pub grouping: Duration,
    pub refinement: Duration,
    pub total: Duration,
}

impl BenchReport {
    /// Refinement time over grouping time.
    pub fn refinement_ratio(&self) -> f64 {
        let g = self.grouping.as_secs_f64();
        if g == 0.0 {
            0.0
        } else {
            self.refinement.as_secs_f64() / g
        }
    }

    pub const CSV_HEADER: &'static str =
        "records,groups,repeat,threads,grouping_ms,refinement_ms,total_ms,refinement_ratio";

    pub fn csv_row(&self) -> String {
        let ms = |d: Duration| d.as_secs_f64() * 1000.0;
        format!(
            "{},{},{},{},{:.3},{:.3},{:.3},{:.4}",
            self.records,
            self.groups,
            self.repeat,
            self.threads,
            ms(self.grouping),
            ms(self.refinement),
            ms(self.total),
            self.refinement_ratio()
        )
    }

    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let path = out_dir.join("bench.csv");
        write(
            &path,
            &format!("{}\n{}\n", Self::CSV_HEADER, self.csv_row()),
        )?;
        Ok(path)
    }
}

/// Median of a non-empty sample; even counts average the middle pair.
pub fn median(samples: &mut [Duration]) -> Duration {
    assert!(!samples.is_empty(), "median of no samples");
    samples.sort();
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        (samples[mid - 1] + samples[mid]) / 2
    }
}
