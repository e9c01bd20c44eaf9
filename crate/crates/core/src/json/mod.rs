//! JSON input and output.
//!
//! [`from_json`] drives a [`Builder`](crate::builder::Builder) directly from
//! parser events, in one pass and without an intermediate tree.
//! [`from_json_numbers`] is a specialized path for nested lists of numbers
//! with fixed accumulators and no type discovery. [`to_json`] writes compact
//! JSON.

mod ingest;
mod numbers;
pub mod reader;
mod writer;

use thiserror::Error;

use crate::builder::BuilderError;

pub use ingest::{from_json, from_json_reader, from_json_with};
pub use numbers::{from_json_numbers, from_json_numbers_reader};
pub use reader::{Event, Parser};
pub use writer::{to_json, write_json};

pub const DEFAULT_MAX_DEPTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JsonOptions {
    /// One JSON value per line instead of one top-level array.
    pub ndjson: bool,
    /// Maximum nesting of arrays and objects, the outermost included.
    pub max_depth: usize,
}

impl Default for JsonOptions {
    fn default() -> Self {
        JsonOptions {
            ndjson: false,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum JsonError {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: u64, message: String },
    #[error("nesting depth limit {limit} exceeded at byte {offset}")]
    DepthLimitExceeded { offset: u64, limit: usize },
    #[error("integer literal {literal} at byte {offset} does not fit in 64 bits")]
    IntegerOverflow { offset: u64, literal: String },
    #[error("input deviates from nested lists of numbers at byte {offset}: {message}")]
    StructureDeviation { offset: u64, message: String },
    #[error("duplicate key {key:?} at byte {offset}")]
    DuplicateKey { offset: u64, key: String },
    #[error("builder error at byte {offset}: {source}")]
    Builder { offset: u64, source: BuilderError },
    #[error("read error: {0}")]
    Io(String),
}

impl JsonError {
    /// Byte offset of the problem, when it has one.
    pub fn offset(&self) -> Option<u64> {
        match self {
            JsonError::Parse { offset, .. }
            | JsonError::DepthLimitExceeded { offset, .. }
            | JsonError::IntegerOverflow { offset, .. }
            | JsonError::StructureDeviation { offset, .. }
            | JsonError::DuplicateKey { offset, .. }
            | JsonError::Builder { offset, .. } => Some(*offset),
            JsonError::Io(_) => None,
        }
    }
}
