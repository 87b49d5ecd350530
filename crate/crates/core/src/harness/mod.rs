//! Configuration, manufactured solutions, the convergence-study driver and
//! report output.

mod config;
mod registry;
mod report;
mod study;

use thiserror::Error;

pub use config::{parse_config, parse_config_str, StudyConfig};
pub use registry::{lookup, names, ManufacturedSolution};
pub use report::{emit_report, eoc, sig6, ConvergenceReport, Diagnostics, ErrorReportRow, ReportFormat, CSV_HEADER, EOC_FLOOR};
pub use study::{diagnose, quick_config, run_convergence_study, run_level, solve, Rules};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("unknown solution {0:?}")]
    UnknownSolution(String),
    #[error("level N = {n}: {source}")]
    Level {
        n: usize,
        #[source]
        source: Box<crate::Error>,
    },
    #[error("report has no rows")]
    EmptyReport,
    #[error("i/o: {0}")]
    Io(String),
}
