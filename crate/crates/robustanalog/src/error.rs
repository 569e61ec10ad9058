use std::fmt;

/// Crate-wide error type. Variants carry enough context that a failure in a
/// long run can be diagnosed from the message alone.
#[derive(Debug)]
pub enum Error {
    /// Vector/matrix sizes don't line up.
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    /// A numeric computation produced NaN or infinity.
    NonFinite { context: String },
    /// A reward computation referenced a metric the vector doesn't carry.
    MissingMetric { metric: String },
    /// Task id outside the current training task set.
    InvalidTaskId { task_id: usize, task_count: usize },
    /// Sampling asked for transitions from a task with an empty buffer.
    EmptyBuffer { task_id: usize },
    /// A value fell outside its declared range.
    OutOfRange { context: String },
    /// Bad configuration, benchmark definition, or CLI usage.
    Config { message: String },
    /// Checkpoint file rejected (version, truncation, benchmark mismatch).
    Checkpoint { message: String },
    Io(std::io::Error),
    Json(serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config {
            message: message.into(),
        }
    }

    pub(crate) fn non_finite(context: impl Into<String>) -> Self {
        Error::NonFinite {
            context: context.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                context,
                expected,
                got,
            } => write!(f, "{context}: expected length {expected}, got {got}"),
            Error::NonFinite { context } => write!(f, "non-finite value in {context}"),
            Error::MissingMetric { metric } => {
                write!(f, "constraint references missing metric '{metric}'")
            }
            Error::InvalidTaskId {
                task_id,
                task_count,
            } => write!(f, "task id {task_id} out of range (task count {task_count})"),
            Error::EmptyBuffer { task_id } => {
                write!(f, "replay buffer for task {task_id} is empty")
            }
            Error::OutOfRange { context } => write!(f, "{context}"),
            Error::Config { message } => write!(f, "{message}"),
            Error::Checkpoint { message } => write!(f, "checkpoint rejected: {message}"),
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            Error::Json(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}
