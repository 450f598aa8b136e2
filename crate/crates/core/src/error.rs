use alloc::string::String;
use core::fmt;

/// Errors raised by the pure parsing core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Log content or template text was empty after trimming whitespace.
    EmptyContent,
    /// A configuration value is outside its allowed range.
    InvalidConfig(String),
    /// A rule line could not be parsed or its pattern failed to compile.
    InvalidRule { line: usize, message: String },
    /// Predicted and ground-truth assignments cover different line ids.
    DomainMismatch { predicted: usize, truth: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyContent => f.write_str("log content is empty"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::InvalidRule { line, message } => {
                write!(f, "invalid rule on line {line}: {message}")
            }
            Error::DomainMismatch { predicted, truth } => write!(
                f,
                "prediction covers {predicted} line ids but ground truth covers {truth}, or the id sets differ"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
