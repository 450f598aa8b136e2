//! Phase one: online clustering of records into [`LogGroup`]s.
//!
//! Two backends sit behind the [`Grouper`] trait:
//!
//! * [`DrainGrouper`], a fixed-depth prefix tree keyed by token count and
//!   leading tokens, with positional similarity at the leaves;
//! * [`AelGrouper`], which bins records by token count and anonymized
//!   variable count and keeps records together when their constant tokens
//!   agree positionally.
//!
//! Groupers are order-sensitive. Feeding the same records in the same order
//! always produces the same partition.

mod ael;
mod drain;

pub use ael::AelGrouper;
pub use drain::DrainGrouper;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use hashbrown::DefaultHashBuilder;
use indexmap::IndexSet;

use crate::anonymize::RegexRuleSet;
use crate::error::{Error, Result};
use crate::model::{GroupId, LineId, LogGroup, LogRecord, Template};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    DrainLike,
    AelLike,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::DrainLike => "drain",
            Backend::AelLike => "ael",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drain" | "drain_like" => Ok(Backend::DrainLike),
            "ael" | "ael_like" => Ok(Backend::AelLike),
            other => Err(Error::InvalidConfig(alloc::format!(
                "unknown grouper `{other}` (expected drain or ael)"
            ))),
        }
    }
}

/// Grouper settings. The tree parameters only affect the drain backend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrouperConfig {
    pub backend: Backend,
    pub tree_depth: usize,
    pub similarity_threshold: f64,
    pub max_children: usize,
}

impl Default for GrouperConfig {
    fn default() -> Self {
        GrouperConfig {
            backend: Backend::DrainLike,
            tree_depth: 4,
            similarity_threshold: 0.4,
            max_children: 100,
        }
    }
}

impl GrouperConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tree_depth < 3 {
            return Err(Error::InvalidConfig("tree depth must be at least 3".into()));
        }
        if !(self.similarity_threshold > 0.0 && self.similarity_threshold < 1.0) {
            return Err(Error::InvalidConfig(
                "similarity threshold must lie strictly between 0 and 1".into(),
            ));
        }
        if self.max_children == 0 {
            return Err(Error::InvalidConfig(
                "max children must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// An online clustering backend.
pub trait Grouper {
    /// Assigns `record` to exactly one group and returns that group's id.
    fn feed(&mut self, record: &LogRecord) -> Result<GroupId>;

    /// The partition so far, ordered by each group's first member.
    fn finalize(self) -> Vec<LogGroup>;
}

/// Backend-dispatching grouping state.
#[derive(Debug)]
pub enum GroupingState {
    Drain(DrainGrouper),
    Ael(AelGrouper),
}

impl GroupingState {
    /// `rules` drive the variable counting of the AEL backend and are unused
    /// by the drain backend.
    pub fn new(cfg: &GrouperConfig, rules: &RegexRuleSet) -> Result<Self> {
        cfg.validate()?;
        Ok(match cfg.backend {
            Backend::DrainLike => GroupingState::Drain(DrainGrouper::new(cfg)?),
            Backend::AelLike => GroupingState::Ael(AelGrouper::new(rules.clone())),
        })
    }
}

impl Grouper for GroupingState {
    fn feed(&mut self, record: &LogRecord) -> Result<GroupId> {
        match self {
            GroupingState::Drain(g) => g.feed(record),
            GroupingState::Ael(g) => g.feed(record),
        }
    }

    fn finalize(self) -> Vec<LogGroup> {
        match self {
            GroupingState::Drain(g) => g.finalize(),
            GroupingState::Ael(g) => g.finalize(),
        }
    }
}

/// Feeds `records` in order and returns the finalized partition.
pub fn group_records<'a>(
    cfg: &GrouperConfig,
    rules: &RegexRuleSet,
    records: impl IntoIterator<Item = &'a LogRecord>,
) -> Result<Vec<LogGroup>> {
    let mut state = GroupingState::new(cfg, rules)?;
    for record in records {
        state.feed(record)?;
    }
    Ok(state.finalize())
}

/// Membership bookkeeping shared by the backends.
#[derive(Debug)]
struct Members {
    id: GroupId,
    line_ids: Vec<LineId>,
    unique: IndexSet<String, DefaultHashBuilder>,
}

impl Members {
    fn new(id: GroupId) -> Self {
        Members {
            id,
            line_ids: Vec::new(),
            unique: IndexSet::default(),
        }
    }

    fn push(&mut self, record: &LogRecord) {
        self.line_ids.push(record.line_id);
        if !self.unique.contains(record.content.as_str()) {
            self.unique.insert(record.content.clone());
        }
    }

    fn into_group(self, draft: Template) -> LogGroup {
        LogGroup {
            id: self.id,
            member_ids: self.line_ids,
            unique_contents: self.unique.into_iter().collect(),
            draft,
            template: None,
        }
    }
}

fn sort_by_first_member(groups: &mut [LogGroup]) {
    groups.sort_by_key(|g| g.member_ids.first().copied());
}
