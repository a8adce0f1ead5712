use thiserror::Error;

use crate::Coord;

/// Errors reported by the tree, trie and index operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("key {key:?} is not strictly between its inorder neighbours")]
    OrderingViolation { key: Vec<Coord> },
    #[error("the dummy node or a freed node cannot be the target of this operation")]
    InvalidTarget,
    #[error("key {0} is already present in the trie")]
    DuplicateKey(Coord),
    #[error("key {0} is not present in the trie")]
    NotFound(Coord),
    #[error("coordinate {value} is outside the universe [0, {universe})")]
    Domain { value: u64, universe: u64 },
    #[error("expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("malformed window in dimension {dim}: lo {lo} > hi {hi}")]
    Window { dim: usize, lo: Coord, hi: Coord },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
