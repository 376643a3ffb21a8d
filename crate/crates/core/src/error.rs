use thiserror::Error;

/// Errors raised by the scheduling library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid constraint box: {0}")]
    InvalidBox(String),

    #[error("constraint box {bounds} admits no schedule for U={ues}, T={slots}")]
    Infeasible {
        bounds: String,
        ues: usize,
        slots: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("UE {0} has a zero-norm channel and cannot be reached")]
    UnreachableUe(usize),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("invalid scheduling matrix: {0}")]
    InvalidMatrix(String),

    #[error("{count} feasible schedules exceed the enumeration cap of {cap}; use a smaller instance")]
    EnumerationCap { count: u64, cap: u64 },

    #[error("all {} restarts failed: {}", .0.len(), .0.join("; "))]
    AllRestartsFailed(Vec<String>),

    #[error("T={slots} does not divide U={ues}")]
    Indivisible { ues: usize, slots: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
