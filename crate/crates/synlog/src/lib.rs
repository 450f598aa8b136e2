//! Dataset IO, evaluation, benchmarking and the command-line front end for
//! the `synlog-core` parser.

pub mod bench;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
pub use synlog_core;
