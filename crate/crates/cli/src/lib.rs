//! Report assembly, corpus search and rendering behind the `tilescope`
//! command-line tool.

pub mod analyze;
pub mod render;
pub mod search;

use thiserror::Error;

pub use analyze::{analyze, AnalysisReport, AnalyzeOptions};
pub use search::{search, SearchOptions, SearchSummary};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] tilescope_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const INCONCLUSIVE: i32 = 3;
    pub const FAILURE: i32 = 1;
}

/// Parses `"0,1,8,9"` (spaces allowed, negative values allowed).
pub fn parse_digits(text: &str) -> Result<Vec<i64>, CliError> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<i64>()
                .map_err(|_| CliError::Input(format!("not an integer: {t:?}")))
        })
        .collect()
}

/// Deterministic JSON rendering used for every report.
pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)?)
}
