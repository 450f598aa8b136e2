//! Records, tokens, templates and groups.
//!
//! A log message is split on runs of ASCII whitespace; no punctuation
//! splitting happens here. A template is a token sequence in which some
//! positions hold the variable marker `<*>`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Literal text of the variable marker.
pub const MARKER: &str = "<*>";

/// 1-based ordinal of a record within its dataset.
pub type LineId = u64;

/// Opaque identifier handed out by a grouper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupId(pub u32);

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}", self.0)
    }
}

/// One whitespace-delimited unit of a message or template.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Constant(String),
    Variable,
}

impl Token {
    /// Builds a token from its text; exactly `<*>` becomes [`Token::Variable`].
    pub fn new(text: &str) -> Token {
        if text == MARKER {
            Token::Variable
        } else {
            Token::Constant(text.to_string())
        }
    }

    pub fn text(&self) -> &str {
        match self {
            Token::Constant(s) => s,
            Token::Variable => MARKER,
        }
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Token::Variable)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.text())
    }
}

/// Splits `content` on runs of ASCII whitespace.
pub fn tokenize(content: &str) -> Result<Vec<Token>> {
    let tokens: Vec<Token> = content.split_ascii_whitespace().map(Token::new).collect();
    if tokens.is_empty() {
        return Err(Error::EmptyContent);
    }
    Ok(tokens)
}

/// Collapses whitespace runs to single spaces and trims the ends.
pub fn normalize_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for (i, word) in s.split_ascii_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// An ordered sequence of constant tokens and variable markers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Template {
    tokens: Vec<Token>,
}

impl Template {
    pub fn new(tokens: Vec<Token>) -> Template {
        Template { tokens }
    }

    /// Parses a rendered template such as `open <*> failed`.
    pub fn parse(s: &str) -> Result<Template> {
        tokenize(s).map(Template::new)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Constant token texts in order.
    pub fn constants(&self) -> impl Iterator<Item = &str> + '_ {
        self.tokens.iter().filter_map(|t| match t {
            Token::Constant(s) => Some(s.as_str()),
            Token::Variable => None,
        })
    }

    pub fn marker_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_variable()).count()
    }

    /// True when no two variable markers are adjacent.
    pub fn is_canonical(&self) -> bool {
        !self
            .tokens
            .windows(2)
            .any(|w| w[0].is_variable() && w[1].is_variable())
    }

    /// Replaces each maximal run of adjacent markers with a single marker.
    pub fn collapse_markers(self) -> Template {
        let mut tokens = Vec::with_capacity(self.tokens.len());
        for tok in self.tokens {
            if tok.is_variable() && tokens.last().is_some_and(Token::is_variable) {
                continue;
            }
            tokens.push(tok);
        }
        Template { tokens }
    }

    /// True iff this template's constants, in order, form a subsequence of
    /// the texts of `tokens`.
    pub fn constants_present(&self, tokens: &[Token]) -> bool {
        let mut haystack = tokens.iter().map(Token::text);
        self.constants()
            .all(|needle| haystack.by_ref().any(|t| t == needle))
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, tok) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(tok.text())?;
        }
        Ok(())
    }
}

impl FromStr for Template {
    type Err = Error;

    fn from_str(s: &str) -> Result<Template> {
        Template::parse(s)
    }
}

impl From<Vec<Token>> for Template {
    fn from(tokens: Vec<Token>) -> Template {
        Template::new(tokens)
    }
}

/// One raw log message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogRecord {
    pub line_id: LineId,
    pub content: String,
}

impl LogRecord {
    pub fn new(line_id: LineId, content: impl Into<String>) -> Result<LogRecord> {
        let content = content.into();
        if content.trim().is_empty() {
            return Err(Error::EmptyContent);
        }
        Ok(LogRecord { line_id, content })
    }
}

/// A cluster of records presumed to share one template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogGroup {
    pub id: GroupId,
    /// Member line ids in the order they were fed.
    pub member_ids: Vec<LineId>,
    /// Distinct member contents in order of first appearance.
    pub unique_contents: Vec<String>,
    /// The grouper's own positional template. Used as the output when
    /// template identification is switched off.
    pub draft: Template,
    /// Assigned by template identification.
    pub template: Option<Template>,
}

impl LogGroup {
    pub fn len(&self) -> usize {
        self.member_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_ids.is_empty()
    }
}
