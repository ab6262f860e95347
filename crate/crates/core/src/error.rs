use crate::types::ElementId;

/// Errors shared by all engines and structure-level operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("input list is empty")]
    EmptyInput,
    #[error("value {0} is the reserved sentinel and cannot be stored")]
    SentinelValue(i64),
    #[error("tree is empty")]
    EmptyTree,
    #[error("list is empty")]
    EmptyList,
    #[error("node is a leaf, not an internal node")]
    NotInternal,
    #[error("node is not a right child")]
    NotRightChild,
    #[error("node is not a left child")]
    NotLeftChild,
    #[error("node has no parent")]
    NoParent,
    #[error("unknown element {0:?}")]
    UnknownElement(ElementId),
    #[error("unknown list {0}")]
    UnknownList(u64),
    #[error("iterator was invalidated by an update")]
    Invalidated,
    #[error("principal path has no team (single-leaf path)")]
    PathTooShort,
    #[error("iterated logarithm base must be > 1, got {0}")]
    BadBase(f64),
}
