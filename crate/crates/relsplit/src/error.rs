use thiserror::Error;

/// Errors produced by lattice, graph and reliability operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground sets differ: {0} vs {1}")]
    GroundMismatch(String, String),
    #[error("{0} is not a subset of the ground set")]
    NotSubset(String),
    #[error("subset must be non-empty")]
    EmptySubset,
    #[error("ground set must be non-empty")]
    EmptyGround,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("partition has no labelled block")]
    NoLabelledBlock,
    #[error("{0} does not refine {1}")]
    NotRefinement(String, String),
    #[error("state {0} is not in the state space")]
    UnknownState(String),
    #[error("probability vector belongs to a different state space")]
    SpaceMismatch,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("edge {0} is a loop at {1}")]
    LoopEdge(String, String),
    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),
    #[error("{0} does not separate the graph and no side assignment was given")]
    NotSeparating(String),
    #[error("enumeration over {edges} edges exceeds the limit of {limit}")]
    EnumerationLimit { edges: usize, limit: usize },
    #[error("invalid probability {0:?}: {1}")]
    InvalidProbability(String, String),
    #[error("invalid network file: {0}")]
    InvalidNetwork(String),
    #[error("transfer matrix factorization check failed: {0}")]
    FactorizationCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
