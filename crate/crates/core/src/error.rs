use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KmpError {
    #[error("no connected graph on {n} vertices can be drawn with edge probability {density}")]
    UnsatisfiableDensity { n: usize, density: f64 },

    #[error("no connected graph found after {attempts} draws (n = {n}, d = {density})")]
    RetryExhausted {
        n: usize,
        density: f64,
        attempts: u32,
    },

    #[error("graph is not connected")]
    Disconnected,

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("assignment is {got_rows}x{got_cols}, instance expects {want_rows}x{want_cols}")]
    DimensionMismatch {
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("name `{0}` is longer than 8 characters; use free-format MPS")]
    NameTooLong(String),

    #[error("value `{0}` does not fit a 12-character fixed MPS field")]
    FieldTooWide(String),

    #[error("instance has {cells} key cells; brute force is limited to {limit}")]
    InstanceTooLarge { cells: usize, limit: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl KmpError {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        KmpError::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, KmpError>;
