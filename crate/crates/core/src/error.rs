use std::fmt;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at {location}: {message}")]
    Parse { location: Location, message: String },

    #[error("invalid corpus: {}", join_violations(.0))]
    Validation(Vec<Violation>),

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("graph has {nodes} nodes, exhaustive search is limited to {max}")]
    SizeLimit { nodes: usize, max: usize },

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("label inventories differ: {0}")]
    InventoryMismatch(String),

    #[error("cluster count {k} out of range 1..={n}")]
    ClusterCount { k: usize, n: usize },

    #[error("contingency table is all zeros")]
    EmptyTable,

    #[error("invalid rational `{0}`")]
    InvalidRational(String),

    #[error("window must be at least 1")]
    InvalidWindow,
}

/// Where in an input file a parse error was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    /// 1-based line and column in a text input.
    Line { line: usize, column: usize },
    /// Path to a field of a structured document, e.g. `documents[2].published`.
    Field(String),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line { line, column } => write!(f, "line {line}, column {column}"),
            Location::Field(path) => f.write_str(path),
        }
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
