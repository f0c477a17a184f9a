//! Batch experiments over seeded scenarios: CSV traces, per-run tables and
//! summaries.

pub mod record;
pub mod runner;
pub mod spec;
pub mod summary;

pub use record::{Row, Status, HEADER, SUMMARY_HEADER};
pub use runner::{run_experiment, run_single, ExperimentOutput, RunOutcome};
pub use spec::{Algorithm, Experiment, ExperimentSpec};
pub use summary::{summarize, SummaryRow};

/// Environment variable that overrides the output directory.
pub const OUTPUT_DIR_ENV: &str = "CAPA_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("experiment spec: {0}")]
    Spec(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("no runs found under {0}")]
    EmptySummary(String),
    #[error(transparent)]
    Core(#[from] capa_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Csv(e.to_string())
    }
}
