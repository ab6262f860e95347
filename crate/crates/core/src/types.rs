use serde::{Deserialize, Serialize};

/// Reserved minimum value. `ltt::cut` temporarily assigns it to the cut leaf
/// so that the leaf-to-root path collapses into one principal path; it is
/// rejected in every public input.
pub const MIN_SENTINEL: i64 = i64::MIN;

/// Stable identity of a list element. Ids are assigned at creation, are
/// unique within an engine, and survive `link`/`cut`/`changeval`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ElementId(pub u64);

impl std::fmt::Debug for ElementId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Comparison key of a node: the stored value plus the id of the element the
/// value originates from. All orderings are lexicographic on `(value,
/// tiebreak)`, which keeps every definition well-formed when user values
/// collide; ties resolve to element creation order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Key {
    pub value: i64,
    pub tiebreak: ElementId,
}

impl Key {
    pub fn new(value: i64, tiebreak: ElementId) -> Self {
        Key { value, tiebreak }
    }
}

impl std::fmt::Debug for Key {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{:?}", self.value, self.tiebreak)
    }
}
