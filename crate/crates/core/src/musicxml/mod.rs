//! Uncompressed partwise MusicXML in and out.
//!
//! The reader keeps a deliberately small subset: part list, divisions, time
//! and key signatures, clefs, notes, rests, chords and ties of the first
//! voice. Everything else is dropped and counted in [`ParseDiagnostics`].

mod parse;
mod write;

use std::collections::BTreeMap;

use thiserror::Error;

pub use parse::parse_score;
pub use write::write_score;

#[derive(Debug, Error)]
pub enum MusicXmlError {
    #[error("input is not valid UTF-8 (byte {offset})")]
    Encoding { offset: usize },
    #[error("malformed XML at byte {offset}: {message}")]
    Malformed { offset: usize, message: String },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("part {part}, measure {measure}: {message}")]
    Validation {
        part: String,
        measure: usize,
        message: String,
    },
    #[error("invalid score: {0}")]
    Invalid(String),
    #[error("cannot serialize part {part}: durations need {divisions} divisions per quarter, limit is {limit}")]
    DivisionsOverflow {
        part: String,
        divisions: i64,
        limit: i64,
    },
}

/// What the reader noticed but did not keep.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParseDiagnostics {
    pub warnings: Vec<(String, String)>,
    /// Element name → number of times an element of that name was dropped.
    pub skipped_elements: BTreeMap<String, usize>,
}

impl ParseDiagnostics {
    pub(crate) fn warn(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.warnings.push((location.into(), message.into()));
    }

    pub(crate) fn skip(&mut self, element: &str) {
        *self
            .skipped_elements
            .entry(element.to_string())
            .or_default() += 1;
    }

    pub fn skipped_total(&self) -> usize {
        self.skipped_elements.values().sum()
    }
}
