//! Scenario files, reports and the end-to-end suites behind the command
//! line tool.

mod io;
mod lines;
mod report;
mod scenario;
mod suite;

use std::fmt;

pub use io::{matrix_from_value, matrix_to_value, state_from_value, state_to_value, to_pretty, DecodeError};
pub use report::{Entry, Report, ARTIFACT};
pub use scenario::{emit, ingest, ingest_text, scenario_to_value, Factor, Ingested, InputDigest, Mode, Overrides, Scenario};
pub use suite::{build_family, dilation_residual, ingestion_failure, run_theorem_suite, BuiltFamily, FamilyKind};

/// A scenario or input file that failed to load.
#[derive(Clone, Debug, PartialEq)]
pub struct IngestError {
    pub origin: String,
    pub line: Option<usize>,
    /// JSON path of the offending value, when known.
    pub path: String,
    pub message: String,
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.origin)?;
        if let Some(l) = self.line {
            write!(f, ":{l}")?;
        }
        if !self.path.is_empty() {
            write!(f, " ({})", self.path)?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for IngestError {}
