//! Two-phase log parsing without the standard library.
//!
//! Records are first clustered by a syntax-based [`grouping`] backend. Each
//! group then gets a template from [`synlog`]: a few representative
//! messages are [`anonymize`]d, their longest common token subsequence is
//! kept, constants missing from any member are demoted and marker runs are
//! collapsed. [`metrics`] scores the result against annotated templates.
//!
//! ```
//! use synlog_core::prelude::*;
//!
//! let records = [
//!     LogRecord::new(1, "Reading broadcast variable 11 took 15 ms").unwrap(),
//!     LogRecord::new(2, "Reading broadcast variable 12 took 9 ms").unwrap(),
//! ];
//! let rules = RegexRuleSet::default();
//! let mut groups = group_records(&GrouperConfig::default(), &rules, &records).unwrap();
//! let parsed = refine_groups(&mut groups, &rules, &SamplerConfig::default()).unwrap();
//! assert_eq!(parsed.get(1), Some("Reading broadcast variable <*> took <*> ms"));
//! ```
#![no_std]
#![warn(rust_2018_idioms)]

extern crate alloc;

pub mod anonymize;
pub mod error;
pub mod grouping;
pub mod metrics;
pub mod model;
pub mod synlog;
pub mod variables;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::anonymize::{anonymize, RegexCategory, RegexRule, RegexRuleSet};
    pub use crate::error::{Error, Result};
    pub use crate::grouping::{group_records, Backend, Grouper, GrouperConfig, GroupingState};
    pub use crate::metrics::{evaluate, Assignments, GroundTruth, MetricsReport, ParseResult};
    pub use crate::model::{
        tokenize, GroupId, LineId, LogGroup, LogRecord, Template, Token, MARKER,
    };
    pub use crate::synlog::{refine_groups, Refiner, SamplerConfig, StraySymbols};
    pub use crate::variables::{extract_variables, Extraction, RegexCoverage, TemplateMatcher};
}
