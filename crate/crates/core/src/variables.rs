//! Recovering variable values from a (content, template) pair and
//! classifying them against the rule set.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use regex::Regex;

use crate::anonymize::{RegexCategory, RegexRuleSet};
use crate::metrics::GroundTruth;
use crate::model::{normalize_whitespace, LineId, Template, Token, MARKER};

/// Outcome of aligning a template with its content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extraction {
    Aligned(Vec<String>),
    /// The template does not describe the content.
    Misaligned,
}

impl Extraction {
    /// Captured values, empty when misaligned.
    pub fn values(&self) -> &[String] {
        match self {
            Extraction::Aligned(v) => v,
            Extraction::Misaligned => &[],
        }
    }

    pub fn is_aligned(&self) -> bool {
        matches!(self, Extraction::Aligned(_))
    }
}

/// A template compiled into an anchored matcher.
///
/// Constant tokens match literally, a standalone marker captures one or more
/// whole tokens (lazily, leftmost first) and a marker embedded in a token,
/// as in `blk_<*>`, captures one or more non-space characters.
#[derive(Debug, Clone)]
pub struct TemplateMatcher {
    regex: Regex,
}

impl TemplateMatcher {
    pub fn new(template: &Template) -> Self {
        let mut pattern = String::from("^");
        for (i, tok) in template.tokens().iter().enumerate() {
            if i > 0 {
                pattern.push(' ');
            }
            match tok {
                Token::Variable => pattern.push_str(r"(\S+(?: \S+)*?)"),
                Token::Constant(text) => {
                    for (j, piece) in text.split(MARKER).enumerate() {
                        if j > 0 {
                            pattern.push_str(r"(\S+?)");
                        }
                        pattern.push_str(&regex::escape(piece));
                    }
                }
            }
        }
        pattern.push('$');
        TemplateMatcher {
            regex: Regex::new(&pattern).expect("escaped template pattern compiles"),
        }
    }

    pub fn extract(&self, content: &str) -> Extraction {
        let normalized = normalize_whitespace(content);
        match self.regex.captures(&normalized) {
            Some(caps) => Extraction::Aligned(
                caps.iter()
                    .skip(1)
                    .flatten()
                    .map(|m| String::from(m.as_str()))
                    .collect(),
            ),
            None => Extraction::Misaligned,
        }
    }
}

/// Values the template's markers stand for in `content`.
pub fn extract_variables(content: &str, template: &Template) -> Extraction {
    TemplateMatcher::new(template).extract(content)
}

/// One extracted ground-truth variable value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableOccurrence {
    pub line_id: LineId,
    pub value: String,
    /// First rule that fully matches the value; `None` means unmatched.
    pub category: Option<RegexCategory>,
}

/// Per-category counts of ground-truth variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegexCoverage {
    pub counts: BTreeMap<RegexCategory, usize>,
    pub unmatched: usize,
    pub misaligned_pairs: usize,
    pub messages: usize,
}

impl RegexCoverage {
    /// Extracts every variable of every message and classifies it.
    /// `contents` yields (line id, content); templates come from `truth`.
    pub fn tally<'a>(
        contents: impl IntoIterator<Item = (LineId, &'a str)>,
        truth: &GroundTruth,
        rules: &RegexRuleSet,
    ) -> (RegexCoverage, Vec<VariableOccurrence>) {
        let mut matchers: BTreeMap<&str, Option<TemplateMatcher>> = BTreeMap::new();
        let mut coverage = RegexCoverage::default();
        let mut occurrences = Vec::new();
        for (line_id, content) in contents {
            coverage.messages += 1;
            let Some(template_text) = truth.get(line_id) else {
                coverage.misaligned_pairs += 1;
                continue;
            };
            let matcher = matchers.entry(template_text).or_insert_with(|| {
                Template::parse(template_text)
                    .ok()
                    .map(|t| TemplateMatcher::new(&t))
            });
            let extraction = match matcher {
                Some(m) => m.extract(content),
                None => Extraction::Misaligned,
            };
            let Extraction::Aligned(values) = extraction else {
                coverage.misaligned_pairs += 1;
                continue;
            };
            for value in values {
                let category = rules.classify(&value);
                match category {
                    Some(c) => *coverage.counts.entry(c).or_default() += 1,
                    None => coverage.unmatched += 1,
                }
                occurrences.push(VariableOccurrence {
                    line_id,
                    value,
                    category,
                });
            }
        }
        (coverage, occurrences)
    }

    pub fn count(&self, category: RegexCategory) -> usize {
        self.counts.get(&category).copied().unwrap_or(0)
    }

    pub fn matched(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn total(&self) -> usize {
        self.matched() + self.unmatched
    }

    /// Matched share of all variables; zero when there are none.
    pub fn matched_fraction(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.matched() as f64 / t as f64,
        }
    }
}
