//! Grouping and parsing accuracy at message and template level.
//!
//! Predicted groups are equivalence classes of identical rendered templates,
//! so two upstream groups that end up with the same template count as one.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{normalize_whitespace, LineId, LogGroup};

/// Line id to rendered template. Template strings are stored with
/// whitespace runs collapsed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignments {
    map: BTreeMap<LineId, String>,
}

/// Templates produced by a parser.
pub type ParseResult = Assignments;
/// Reference templates from an annotated dataset.
pub type GroundTruth = Assignments;

impl Assignments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, line_id: LineId, template: &str) -> Option<String> {
        self.map.insert(line_id, normalize_whitespace(template))
    }

    pub fn get(&self, line_id: LineId) -> Option<&str> {
        self.map.get(&line_id).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Entries in line id order.
    pub fn iter(&self) -> impl Iterator<Item = (LineId, &str)> + '_ {
        self.map.iter().map(|(&id, t)| (id, t.as_str()))
    }

    /// Uses each group's identified template, or its draft when none is set.
    pub fn from_groups(groups: &[LogGroup]) -> Self {
        let mut out = Assignments::new();
        for group in groups {
            let rendered = group.template.as_ref().unwrap_or(&group.draft).to_string();
            for &id in &group.member_ids {
                out.map.insert(id, rendered.clone());
            }
        }
        out
    }

    /// Line ids grouped by template string.
    pub fn classes(&self) -> BTreeMap<&str, Vec<LineId>> {
        let mut classes: BTreeMap<&str, Vec<LineId>> = BTreeMap::new();
        for (&id, t) in &self.map {
            classes.entry(t.as_str()).or_default().push(id);
        }
        classes
    }
}

impl FromIterator<(LineId, String)> for Assignments {
    fn from_iter<I: IntoIterator<Item = (LineId, String)>>(iter: I) -> Self {
        let mut out = Assignments::new();
        for (id, t) in iter {
            out.insert(id, &t);
        }
        out
    }
}

/// All four accuracies with their precision/recall parts and raw counts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricsReport {
    pub ga: f64,
    pub pa: f64,
    pub fga: f64,
    pub fta: f64,
    pub pga: f64,
    pub rga: f64,
    pub pta: f64,
    pub rta: f64,
    pub messages_total: usize,
    pub predicted_templates: usize,
    pub truth_templates: usize,
    pub correct_groups: usize,
    pub correct_templates: usize,
}

impl MetricsReport {
    pub const FIELDS: [&'static str; 13] = [
        "ga",
        "pa",
        "fga",
        "fta",
        "pga",
        "rga",
        "pta",
        "rta",
        "messages_total",
        "predicted_templates",
        "truth_templates",
        "correct_groups",
        "correct_templates",
    ];

    /// Field values as text, in [`MetricsReport::FIELDS`] order.
    pub fn values(&self) -> [String; 13] {
        [
            format!("{}", self.ga),
            format!("{}", self.pa),
            format!("{}", self.fga),
            format!("{}", self.fta),
            format!("{}", self.pga),
            format!("{}", self.rga),
            format!("{}", self.pta),
            format!("{}", self.rta),
            format!("{}", self.messages_total),
            format!("{}", self.predicted_templates),
            format!("{}", self.truth_templates),
            format!("{}", self.correct_groups),
            format!("{}", self.correct_templates),
        ]
    }

    /// `key=value` lines.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for (k, v) in Self::FIELDS.iter().zip(self.values()) {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    pub fn csv_header() -> String {
        Self::FIELDS.join(",")
    }

    pub fn csv_row(&self) -> String {
        self.values().join(",")
    }

    /// Fraction-wise `self - baseline`.
    pub fn delta(&self, baseline: &MetricsReport) -> [(&'static str, f64); 8] {
        [
            ("ga", self.ga - baseline.ga),
            ("pa", self.pa - baseline.pa),
            ("fga", self.fga - baseline.fga),
            ("fta", self.fta - baseline.fta),
            ("pga", self.pga - baseline.pga),
            ("rga", self.rga - baseline.rga),
            ("pta", self.pta - baseline.pta),
            ("rta", self.rta - baseline.rta),
        ]
    }
}

/// F-score; zero when both inputs are zero.
pub fn harmonic_mean(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn check_domain(pred: &ParseResult, truth: &GroundTruth) -> Result<()> {
    let same = pred.len() == truth.len() && pred.map.keys().eq(truth.map.keys());
    if same {
        Ok(())
    } else {
        Err(Error::DomainMismatch {
            predicted: pred.len(),
            truth: truth.len(),
        })
    }
}

/// Computes every metric in one pass over the predicted classes.
pub fn evaluate(pred: &ParseResult, truth: &GroundTruth) -> Result<MetricsReport> {
    check_domain(pred, truth)?;
    let pred_classes = pred.classes();
    let truth_classes = truth.classes();

    let mut grouped_messages = 0usize;
    let mut correct_groups = 0usize;
    let mut correct_templates = 0usize;
    for (template, ids) in &pred_classes {
        let Some(truth_template) = truth.get(ids[0]) else {
            continue;
        };
        let same_set = truth_classes[truth_template].len() == ids.len()
            && ids.iter().all(|&id| truth.get(id) == Some(truth_template));
        if same_set {
            correct_groups += 1;
            grouped_messages += ids.len();
            if *template == truth_template {
                correct_templates += 1;
            }
        }
    }
    let parsed_messages = pred
        .iter()
        .filter(|&(id, t)| truth.get(id) == Some(t))
        .count();

    let n = pred.len();
    let (np, nt) = (pred_classes.len(), truth_classes.len());
    let pga = ratio(correct_groups, np);
    let rga = ratio(correct_groups, nt);
    let pta = ratio(correct_templates, np);
    let rta = ratio(correct_templates, nt);
    Ok(MetricsReport {
        ga: ratio(grouped_messages, n),
        pa: ratio(parsed_messages, n),
        fga: ratio(2 * correct_groups, np + nt),
        fta: ratio(2 * correct_templates, np + nt),
        pga,
        rga,
        pta,
        rta,
        messages_total: n,
        predicted_templates: np,
        truth_templates: nt,
        correct_groups,
        correct_templates,
    })
}

pub fn compute_ga(pred: &ParseResult, truth: &GroundTruth) -> Result<f64> {
    evaluate(pred, truth).map(|r| r.ga)
}

pub fn compute_pa(pred: &ParseResult, truth: &GroundTruth) -> Result<f64> {
    evaluate(pred, truth).map(|r| r.pa)
}

/// `(pga, rga, fga)`
pub fn compute_fga(pred: &ParseResult, truth: &GroundTruth) -> Result<(f64, f64, f64)> {
    evaluate(pred, truth).map(|r| (r.pga, r.rga, r.fga))
}

/// `(pta, rta, fta)`
pub fn compute_fta(pred: &ParseResult, truth: &GroundTruth) -> Result<(f64, f64, f64)> {
    evaluate(pred, truth).map(|r| (r.pta, r.rta, r.fta))
}
