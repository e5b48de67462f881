use thiserror::Error;

/// Errors produced by the group-theoretic operations of this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid letter {0:?} in group word")]
    InvalidLetter(char),
    #[error("invalid binary word {0:?}")]
    InvalidBits(String),
    #[error("level {level} exceeds the supported maximum of {max}")]
    LevelTooLarge { level: usize, max: usize },

    #[error("{side} addresses do not form a dyadic partition of root {root}")]
    NotAPartition { side: &'static str, root: u32 },
    #[error("duplicate or nested {side} address {address}")]
    DuplicateAddress { side: &'static str, address: String },
    #[error("domain has {domain} cylinders but range has {range}")]
    CardinalityMismatch { domain: usize, range: usize },
    #[error("root {root} is out of range for a root set of size {size}")]
    RootOutOfRange { root: u32, size: usize },
    #[error("elements live over different root sets")]
    RootSetMismatch,
    #[error("address {0} is shorter than the matching domain cylinders; refine it first")]
    NeedsRefinement(String),
    #[error("cylinders {0} and {1} overlap")]
    OverlappingCylinders(String, String),
    #[error("expected an element over a single root")]
    NotSingleRoot,

    #[error("vertex {0} is not in the graph")]
    VertexNotInGraph(String),
    #[error("balls have different radii ({0} and {1})")]
    RadiusMismatch(usize, usize),

    #[error("normal-form hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A computation ran out of its memory budget. `partial` holds the results
/// for depths `0..=completed_depth`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("memory budget of {budget} bytes exceeded after depth {completed_depth}")]
pub struct BudgetExceeded<T: std::fmt::Debug> {
    pub budget: usize,
    pub completed_depth: usize,
    pub partial: T,
}
