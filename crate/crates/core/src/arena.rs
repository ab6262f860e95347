use std::num::NonZeroU32;

use crate::types::Key;

/// Handle to a node slot. Validated by `(index, generation)`, so a handle
/// kept across a `free` of its slot is detected instead of silently aliasing
/// the slot's next occupant.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    index: NonZeroU32,
    generation: u32,
}

impl NodeId {
    fn new(index: u32, generation: u32) -> Self {
        NodeId {
            index: NonZeroU32::new(index + 1).expect("arena index overflow"),
            generation,
        }
    }

    fn slot(self) -> usize {
        (self.index.get() - 1) as usize
    }
}

impl std::fmt::Debug for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n{}.{}", self.index.get() - 1, self.generation)
    }
}

/// A tree node. The same layout serves plain tournament trees and layered
/// ones: `cross` is unused by the former, and for the latter holds the
/// `down` link of an internal node or the `upp` link of a team-tree leaf
/// (the two cases are mutually exclusive).
#[derive(Clone, Debug)]
pub struct Node {
    pub parent: Option<NodeId>,
    pub left: Option<NodeId>,
    pub right: Option<NodeId>,
    pub cross: Option<NodeId>,
    pub key: Key,
    pub height: u32,
    pub n_leaves: u32,
}

impl Node {
    pub fn leaf(key: Key) -> Self {
        Node {
            parent: None,
            left: None,
            right: None,
            cross: None,
            key,
            height: 0,
            n_leaves: 1,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.left.is_none()
    }
}

struct Slot {
    generation: u32,
    node: Option<Node>,
}

/// Generational slab of nodes. Freed indices are reused LIFO; generations
/// invalidate stale handles.
#[derive(Default)]
pub struct Arena {
    slots: Vec<Slot>,
    free: Vec<u32>,
    live: usize,
}

impl Arena {
    pub fn new() -> Self {
        Arena::default()
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn alloc(&mut self, node: Node) -> NodeId {
        self.live += 1;
        if let Some(index) = self.free.pop() {
            let slot = &mut self.slots[index as usize];
            debug_assert!(slot.node.is_none());
            slot.node = Some(node);
            return NodeId::new(index, slot.generation);
        }
        let index = self.slots.len() as u32;
        self.slots.push(Slot {
            generation: 0,
            node: Some(node),
        });
        NodeId::new(index, 0)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.slots
            .get(id.slot())
            .is_some_and(|s| s.generation == id.generation && s.node.is_some())
    }

    /// Panics on a stale or foreign handle; dangling handles are bugs here,
    /// not recoverable conditions.
    pub fn node(&self, id: NodeId) -> &Node {
        let slot = &self.slots[id.slot()];
        assert_eq!(slot.generation, id.generation, "stale handle {id:?}");
        slot.node.as_ref().expect("freed handle")
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut Node {
        let slot = &mut self.slots[id.slot()];
        assert_eq!(slot.generation, id.generation, "stale handle {id:?}");
        slot.node.as_mut().expect("freed handle")
    }

    pub fn free(&mut self, id: NodeId) -> Node {
        let slot = &mut self.slots[id.slot()];
        assert_eq!(slot.generation, id.generation, "stale handle {id:?}");
        let node = slot.node.take().expect("double free");
        slot.generation = slot.generation.wrapping_add(1);
        self.free.push(id.slot() as u32);
        self.live -= 1;
        node
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{ElementId, Key};

    fn k(v: i64) -> Key {
        Key::new(v, ElementId(0))
    }

    #[test]
    fn alloc_free_reuse_bumps_generation() {
        let mut a = Arena::new();
        let n0 = a.alloc(Node::leaf(k(1)));
        let n1 = a.alloc(Node::leaf(k(2)));
        assert_eq!(a.len(), 2);
        assert_eq!(a.node(n0).key, k(1));

        a.free(n0);
        assert!(!a.contains(n0));
        assert!(a.contains(n1));

        let n0b = a.alloc(Node::leaf(k(3)));
        assert!(a.contains(n0b));
        assert!(!a.contains(n0), "old generation must stay invalid");
        assert_eq!(a.len(), 2);
    }

    #[test]
    #[should_panic(expected = "stale handle")]
    fn stale_handle_access_panics() {
        let mut a = Arena::new();
        let n = a.alloc(Node::leaf(k(1)));
        a.free(n);
        a.alloc(Node::leaf(k(2)));
        let _ = a.node(n);
    }
}
