//! Heuristic pre-marking of likely variable tokens.
//!
//! A token becomes a variable marker when it fully matches one of the
//! common-variable patterns, when it is a pure number, or when it holds
//! strictly more digit characters than non-digit characters. Patterns are
//! tried before the number rules.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use regex::Regex;

use crate::error::{Error, Result};
use crate::model::Token;

/// Variable categories recognised by the default pattern table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegexCategory {
    IpAddress,
    MacAddress,
    EmailAddress,
    UnixPath,
    WindowsPath,
    Datetime,
    Duration,
    Memory,
}

impl RegexCategory {
    pub const ALL: [RegexCategory; 8] = [
        RegexCategory::EmailAddress,
        RegexCategory::MacAddress,
        RegexCategory::IpAddress,
        RegexCategory::WindowsPath,
        RegexCategory::UnixPath,
        RegexCategory::Datetime,
        RegexCategory::Duration,
        RegexCategory::Memory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RegexCategory::IpAddress => "ip_address",
            RegexCategory::MacAddress => "mac_address",
            RegexCategory::EmailAddress => "email_address",
            RegexCategory::UnixPath => "unix_path",
            RegexCategory::WindowsPath => "windows_path",
            RegexCategory::Datetime => "datetime",
            RegexCategory::Duration => "duration",
            RegexCategory::Memory => "memory",
        }
    }

    /// The built-in pattern for this category.
    pub fn default_pattern(self) -> &'static str {
        match self {
            RegexCategory::IpAddress => r"(?:[-0-9a-zA-Z]+\.){2,}[-0-9a-zA-Z]+(?::?:\d+)?",
            RegexCategory::MacAddress => r"([A-Fa-f0-9]{2}:){5,11}[A-Fa-f0-9]{2}",
            RegexCategory::EmailAddress => r"[0-9a-zA-Z]+@([0-9a-zA-Z]+\.)+[0-9a-zA-Z]+",
            RegexCategory::UnixPath => {
                r"(\/[\d+\w+\-_\.\\\#\$]*[\/\.][\d+\w+\-_\.\\\#\$\/*]*)+(\sHTTPS?\/\d\.\d)?"
            }
            RegexCategory::WindowsPath => {
                r"([a-zA-Z]\:[\/\\][\d+\w+\-_\.\\\#\$]*([\/\\\.][\d+\w+\-_\.\\\#\$\\\/*]*)?)"
            }
            RegexCategory::Datetime => r"(\d{1,4}(-|/)\d{1,2}(-|/)\d{1,4})",
            RegexCategory::Duration => r"[+-]?(\d+s(\d+\s?ms)?|\d+\s?ms)",
            RegexCategory::Memory => r"(\d+(\.\d+)?)\s?[kmgKMG][bB]?((\/s)|(ytes))?",
        }
    }
}

impl fmt::Display for RegexCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegexCategory {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        RegexCategory::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

/// A categorised pattern, matched against whole tokens.
#[derive(Debug, Clone)]
pub struct RegexRule {
    pub category: RegexCategory,
    pattern: String,
    anchored: Regex,
}

impl RegexRule {
    pub fn new(category: RegexCategory, pattern: &str) -> core::result::Result<Self, regex::Error> {
        let anchored = Regex::new(&format!("^(?:{pattern})$"))?;
        Ok(RegexRule {
            category,
            pattern: pattern.to_string(),
            anchored,
        })
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    /// Whole-string match.
    pub fn is_match(&self, text: &str) -> bool {
        self.anchored.is_match(text)
    }
}

/// Ordered rule list; the first matching rule decides a token's category.
#[derive(Debug, Clone)]
pub struct RegexRuleSet {
    rules: Vec<RegexRule>,
}

impl Default for RegexRuleSet {
    fn default() -> Self {
        let rules = RegexCategory::ALL
            .into_iter()
            .map(|c| RegexRule::new(c, c.default_pattern()).expect("built-in pattern compiles"))
            .collect();
        RegexRuleSet { rules }
    }
}

impl RegexRuleSet {
    pub fn new(rules: Vec<RegexRule>) -> Self {
        RegexRuleSet { rules }
    }

    /// Parses a rule file: one `category<TAB>pattern` per line. Blank lines
    /// and lines starting with `#` are skipped.
    pub fn from_rules_text(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, pattern) = line.split_once('\t').ok_or_else(|| Error::InvalidRule {
                line: line_no,
                message: "expected `category<TAB>pattern`".to_string(),
            })?;
            let category =
                name.trim()
                    .parse::<RegexCategory>()
                    .map_err(|message| Error::InvalidRule {
                        line: line_no,
                        message,
                    })?;
            let rule = RegexRule::new(category, pattern).map_err(|e| Error::InvalidRule {
                line: line_no,
                message: e.to_string(),
            })?;
            rules.push(rule);
        }
        Ok(RegexRuleSet { rules })
    }

    pub fn rules(&self) -> &[RegexRule] {
        &self.rules
    }

    /// Category of the first rule that fully matches `text`.
    pub fn classify(&self, text: &str) -> Option<RegexCategory> {
        self.rules
            .iter()
            .find(|r| r.is_match(text))
            .map(|r| r.category)
    }

    /// Whether anonymization turns a token with this text into a marker.
    pub fn is_variable_text(&self, text: &str) -> bool {
        self.rules.iter().any(|r| r.is_match(text)) || is_pure_number(text) || is_digit_rich(text)
    }

    pub fn anonymize(&self, tokens: &[Token]) -> Vec<Token> {
        tokens
            .iter()
            .map(|tok| match tok {
                Token::Constant(text) if self.is_variable_text(text) => Token::Variable,
                other => other.clone(),
            })
            .collect()
    }
}

/// Replaces likely variable tokens with markers. Token count is unchanged.
pub fn anonymize(tokens: &[Token], rules: &RegexRuleSet) -> Vec<Token> {
    rules.anonymize(tokens)
}

/// A decimal real (`42`, `-3.5`, `.5`) or a `0x`/`0X`-prefixed hex number.
pub fn is_pure_number(text: &str) -> bool {
    let body = text.strip_prefix(['+', '-']).unwrap_or(text);
    if let Some(hex) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) {
        return !hex.is_empty() && hex.bytes().all(|b| b.is_ascii_hexdigit());
    }
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    match frac {
        None => !int.is_empty() && all_digits(int),
        Some(f) => (!int.is_empty() || !f.is_empty()) && all_digits(int) && all_digits(f),
    }
}

/// Strictly more digit characters than non-digit characters.
pub fn is_digit_rich(text: &str) -> bool {
    let (digits, others) = text.chars().fold((0usize, 0usize), |(d, o), c| {
        if c.is_ascii_digit() {
            (d + 1, o)
        } else {
            (d, o + 1)
        }
    });
    digits > others
}
