use std::path::PathBuf;

use crate::corpus::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}:{line}: field `{field}`: {message}", file.display())]
    Malformed {
        file: PathBuf,
        line: usize,
        field: String,
        message: String,
    },

    #[error("referential integrity violated: {}", offenders.join("; "))]
    Referential { offenders: Vec<String> },

    #[error("corpus failed validation with {} violation(s)", .0.violations.len())]
    Invalid(ValidationReport),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("undefined statistic: {0}")]
    UndefinedStatistic(String),

    #[error("undefined disparity: {0}")]
    UndefinedDisparity(String),

    #[error("undefined conditional rate for group `{0}`: no rows with y = 1")]
    UndefinedConditional(String),

    #[error("undefined AUC{}: {reason}", group.as_ref().map(|g| format!(" for group `{g}`")).unwrap_or_default())]
    UndefinedAuc {
        group: Option<String>,
        reason: String,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dangling reference: {0}")]
    DanglingReference(String),

    #[error("logistic fit did not converge after {iterations} iterations (gradient norm {grad_norm:e})")]
    NonConvergence { iterations: usize, grad_norm: f64 },

    #[error("ill-posed fit: {0}")]
    IllPosed(String),

    #[error("feature assembly: column `{column}` has no value for submission `{id}`")]
    Assembly { column: String, id: String },

    #[error("column mismatch: {0}")]
    ColumnMismatch(String),

    #[error("clustering: {0}")]
    Clustering(String),

    #[error("config: {0}")]
    Config(String),

    #[error("parse: {0}")]
    Parse(String),

    #[error("stage `{stage}`: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("validation failed with {violations} problem(s); report at {}", report.display())]
    ValidationFailed { report: PathBuf, violations: usize },

    #[error("unknown figure `{0}`; valid figures: marginal, roc, calibration, cdf")]
    UnknownFigure(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |e| match e {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }
}
