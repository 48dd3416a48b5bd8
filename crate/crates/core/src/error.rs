use thiserror::Error;

/// Errors produced by graph construction, estimation, and the greedy driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("exact enumeration needs {states} live-edge states, budget is {budget}")]
    EnumerationBudget { states: u128, budget: u128 },

    #[error("time step must be a unit fraction 1/K with K >= 1, got {0}")]
    InvalidTimeStep(f64),

    #[error("node {node}: assignment row sums to {sum}, expected 1 within 1e-9")]
    UnroundableAssignment { node: usize, sum: f64 },

    #[error("community count {m} exceeds node count {n}")]
    TooManyCommunities { m: usize, n: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
