use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("variable count {n} outside supported range 1..={max}")]
    VariableCount { n: u32, max: u32 },

    #[error("truth table length mismatch: expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("seed size mismatch: {0}")]
    SeedShape(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("truth table format error: {0}")]
    TableFormat(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("terminal {name} out of range for context (vars={vars}, seeds={seeds})")]
    TerminalRange { name: String, vars: usize, seeds: usize },

    #[error("abstract arity {inputs} exceeds bound {max}")]
    ArityBound { inputs: usize, max: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("target nonlinearity {target} not reached for n={n} (best {best})")]
    TargetUnreached { n: u32, target: u64, best: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
