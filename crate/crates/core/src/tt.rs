//! Dynamic partial sorting over a single tournament tree per list.
//!
//! `psort` pops nodes off a transient priority queue, enqueueing the
//! subordinates along each output's principal path. `changeval` re-minimizes
//! the leaf-to-root path. `link` splices the shorter tree into the taller
//! one's spine and rebalances with at most one rotation; `cut` splits off
//! the sibling subtrees along the leaf-to-root path and re-links them.

use std::collections::HashMap;

use crate::arena::{Arena, NodeId};
use crate::engine::{Engine, EngineKind, ListId};
use crate::error::Error;
use crate::metrics::Metrics;
use crate::pq::MinHeap;
use crate::tree::{self, Tree, ValidationReport};
use crate::types::{ElementId, Key, MIN_SENTINEL};

/// The `min(k, n)` smallest elements of `t`, ascending. Read-only: the tree
/// is never touched.
pub fn psort(
    a: &Arena,
    t: &Tree,
    k: usize,
    m: &mut Metrics,
) -> Result<Vec<(ElementId, i64)>, Error> {
    let root = t.root.ok_or(Error::EmptyTree)?;
    let mut queue: MinHeap<NodeId> = MinHeap::new();
    let mut out = Vec::with_capacity(k.min(t.leaf_count));
    let mut u = Some(root);
    for _ in 0..k {
        let Some(v) = u else { break };
        let key = a.node(v).key;
        out.push((key.tiebreak, key.value));
        // Enqueue the subordinate of every node on v's principal path.
        let mut w = v;
        while !a.node(w).is_leaf() {
            let s = tree::subordinate(a, w).expect("internal node");
            queue.insert(a.node(s).key, s, m);
            w = tree::same_key_child(a, w).expect("internal node");
        }
        u = queue.delete_min(m).map(|(_, id)| id);
    }
    Ok(out)
}

/// Set the value of `leaf` and re-minimize its ancestors. The walk stops
/// early once an ancestor's key is already consistent.
pub fn changeval(a: &mut Arena, leaf: NodeId, value: i64, m: &mut Metrics) -> Result<(), Error> {
    if value == MIN_SENTINEL {
        return Err(Error::SentinelValue(value));
    }
    debug_assert!(a.node(leaf).is_leaf());
    m.step();
    let tiebreak = a.node(leaf).key.tiebreak;
    a.node_mut(leaf).key = Key::new(value, tiebreak);
    let mut v = a.node(leaf).parent;
    while let Some(x) = v {
        m.step();
        let node = a.node(x);
        let (l, r) = (node.left.unwrap(), node.right.unwrap());
        let min = a.node(l).key.min(a.node(r).key);
        if a.node(x).key == min {
            break;
        }
        a.node_mut(x).key = min;
        v = a.node(x).parent;
    }
    Ok(())
}

/// Concatenate two trees, `t1`'s leaves first. Descends the taller tree's
/// spine to a subtree within one height of the shorter tree, splices a new
/// node over both, then walks up restoring heights and keys. The splice
/// grows the spine by at most one, so a single rebalancing event (one
/// rotation, or a double rotation when the growth lands zig-zag) restores
/// balance exactly. Inputs are consumed.
pub fn link(a: &mut Arena, t1: Tree, t2: Tree, m: &mut Metrics) -> Tree {
    let Some(r1) = t1.root else { return t2 };
    let Some(r2) = t2.root else { return t1 };
    let leaf_count = t1.leaf_count + t2.leaf_count;
    let h1 = a.node(r1).height;
    let h2 = a.node(r2).height;

    let u = if h1 >= h2 {
        let mut x = r1;
        while a.node(x).height > h2 + 1 {
            x = a.node(x).right.unwrap();
        }
        let p = a.node(x).parent;
        let u = tree::join_under_new_node(a, x, r2);
        if let Some(p) = p {
            a.node_mut(u).parent = Some(p);
            a.node_mut(p).right = Some(u);
        }
        u
    } else {
        let mut x = r2;
        while a.node(x).height > h1 + 1 {
            x = a.node(x).left.unwrap();
        }
        let p = a.node(x).parent;
        let u = tree::join_under_new_node(a, r1, x);
        if let Some(p) = p {
            a.node_mut(u).parent = Some(p);
            a.node_mut(p).left = Some(u);
        }
        u
    };

    let root = rebalance_and_fix_up(a, u, m);
    Tree {
        root: Some(root),
        leaf_count,
    }
}

/// Walk from a freshly spliced node to the root, refreshing keys, heights
/// and leaf counts, and absorbing the splice's +1 height growth with one
/// single or double rotation where it breaks balance.
fn rebalance_and_fix_up(a: &mut Arena, start: NodeId, m: &mut Metrics) -> NodeId {
    let mut y = start;
    loop {
        let Some(w) = a.node(y).parent else { break y };
        let (l, r) = {
            let wn = a.node(w);
            (wn.left.unwrap(), wn.right.unwrap())
        };
        let (hl, hr) = (a.node(l).height, a.node(r).height);
        if hl.abs_diff(hr) > 1 {
            let heavy = if hl > hr { l } else { r };
            debug_assert_eq!(heavy, y, "imbalance away from the splice path");
            y = rebalance_at(a, heavy, hl > hr, m);
            continue;
        }
        tree::recompute(a, w);
        y = w;
    }
}

/// Restore balance at the parent of `heavy`: rotate `heavy` up if it leans
/// outward, otherwise rotate its inner child up twice.
fn rebalance_at(a: &mut Arena, heavy: NodeId, heavy_is_left: bool, m: &mut Metrics) -> NodeId {
    let hn = a.node(heavy);
    let (inner, outer) = if heavy_is_left {
        (hn.right.unwrap(), hn.left.unwrap())
    } else {
        (hn.left.unwrap(), hn.right.unwrap())
    };
    if a.node(outer).height >= a.node(inner).height {
        m.rotations += 1;
        if heavy_is_left {
            tree::rotate_right(a, heavy)
        } else {
            tree::rotate_left(a, heavy)
        }
        .expect("heavy is a child")
    } else {
        m.rotations += 2;
        if heavy_is_left {
            tree::rotate_left(a, inner).expect("inner is a right child");
            tree::rotate_right(a, inner).expect("inner is now a left child")
        } else {
            tree::rotate_right(a, inner).expect("inner is a left child");
            tree::rotate_left(a, inner).expect("inner is now a right child")
        }
    }
}

/// Split `t` after `leaf`: the first tree keeps head..leaf inclusive, the
/// second the rest. Walks the leaf-to-root path, detaching each sibling
/// subtree and re-linking it on the matching side. The input is consumed.
pub fn cut(a: &mut Arena, t: Tree, leaf: NodeId, m: &mut Metrics) -> (Tree, Tree) {
    debug_assert!(a.node(leaf).is_leaf());
    let mut spine: Vec<(bool, NodeId, NodeId)> = Vec::new();
    let mut y = leaf;
    while let Some(x) = a.node(y).parent {
        let xn = a.node(x);
        let was_left = xn.left == Some(y);
        let sib = if was_left {
            xn.right.unwrap()
        } else {
            xn.left.unwrap()
        };
        spine.push((was_left, sib, x));
        y = x;
    }

    a.node_mut(leaf).parent = None;
    for &(_, sib, _) in &spine {
        a.node_mut(sib).parent = None;
    }
    for &(_, _, x) in &spine {
        a.free(x);
    }

    let mut t1 = Tree::singleton(leaf);
    let mut t2 = Tree::empty();
    for (i, &(was_left, sib, _)) in spine.iter().enumerate() {
        let detached = Tree {
            root: Some(sib),
            leaf_count: a.node(sib).n_leaves as usize,
        };
        // Balance forces the i-th detached subtree no taller than 2i-1.
        assert!(
            a.node(sib).height as usize <= 2 * (i + 1) - 1,
            "cut telescoping bound violated at step {i}"
        );
        if was_left {
            t2 = link(a, t2, detached, m);
        } else {
            t1 = link(a, detached, t1, m);
        }
    }
    debug_assert_eq!(t1.leaf_count + t2.leaf_count, t.leaf_count);
    (t1, t2)
}

/// Tournament-tree engine: a registry of trees plus the element-id index.
pub struct TtEngine {
    arena: Arena,
    lists: HashMap<ListId, Tree>,
    index: HashMap<ElementId, NodeId>,
    next_list: u64,
    next_elem: u64,
    metrics: Metrics,
}

impl Default for TtEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl TtEngine {
    pub fn new() -> Self {
        TtEngine {
            arena: Arena::new(),
            lists: HashMap::new(),
            index: HashMap::new(),
            next_list: 0,
            next_elem: 0,
            metrics: Metrics::new(),
        }
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn tree(&self, list: ListId) -> Result<Tree, Error> {
        self.lists
            .get(&list)
            .copied()
            .ok_or(Error::UnknownList(list.0))
    }

    pub fn leaf_of(&self, elem: ElementId) -> Result<NodeId, Error> {
        self.index
            .get(&elem)
            .copied()
            .ok_or(Error::UnknownElement(elem))
    }

    fn fresh_list(&mut self, tree: Tree) -> ListId {
        let id = ListId(self.next_list);
        self.next_list += 1;
        self.lists.insert(id, tree);
        id
    }

    /// Resolve an element to its leaf and require it to live in `list`.
    fn member_leaf(&self, list: ListId, elem: ElementId) -> Result<NodeId, Error> {
        let t = self.tree(list)?;
        let leaf = self.leaf_of(elem)?;
        if t.root != Some(tree::tree_root(&self.arena, leaf)) {
            return Err(Error::UnknownElement(elem));
        }
        Ok(leaf)
    }
}

impl Engine for TtEngine {
    fn kind(&self) -> EngineKind {
        EngineKind::Tt
    }

    fn new_list(&mut self, values: &[i64]) -> Result<ListId, Error> {
        let items: Vec<(ElementId, i64)> = values
            .iter()
            .map(|v| {
                let id = ElementId(self.next_elem);
                self.next_elem += 1;
                (id, *v)
            })
            .collect();
        let t = tree::build(&mut self.arena, &items)?;
        for &leaf in tree::leaves(&self.arena, t.root.unwrap()).iter() {
            self.index.insert(self.arena.node(leaf).key.tiebreak, leaf);
        }
        Ok(self.fresh_list(t))
    }

    fn psort(&mut self, list: ListId, k: usize) -> Result<Vec<(ElementId, i64)>, Error> {
        let t = self.tree(list)?;
        if t.is_empty() {
            return Err(Error::EmptyTree);
        }
        psort(&self.arena, &t, k, &mut self.metrics)
    }

    fn changeval(&mut self, list: ListId, elem: ElementId, value: i64) -> Result<(), Error> {
        let leaf = self.member_leaf(list, elem)?;
        changeval(&mut self.arena, leaf, value, &mut self.metrics)
    }

    fn link(&mut self, a: ListId, b: ListId) -> Result<ListId, Error> {
        if a == b {
            return Err(Error::UnknownList(b.0));
        }
        let ta = self.tree(a)?;
        let tb = self.tree(b)?;
        self.lists.remove(&a);
        self.lists.remove(&b);
        let linked = link(&mut self.arena, ta, tb, &mut self.metrics);
        Ok(self.fresh_list(linked))
    }

    fn cut(&mut self, list: ListId, elem: ElementId) -> Result<(ListId, ListId), Error> {
        let leaf = self.member_leaf(list, elem)?;
        let t = self.tree(list)?;
        self.lists.remove(&list);
        let (t1, t2) = cut(&mut self.arena, t, leaf, &mut self.metrics);
        let first = self.fresh_list(t1);
        let second = self.fresh_list(t2);
        Ok((first, second))
    }

    fn elements(&self, list: ListId) -> Result<Vec<(ElementId, i64)>, Error> {
        let t = self.tree(list)?;
        Ok(match t.root {
            None => Vec::new(),
            Some(root) => tree::leaves(&self.arena, root)
                .iter()
                .map(|&l| {
                    let key = self.arena.node(l).key;
                    (key.tiebreak, key.value)
                })
                .collect(),
        })
    }

    fn list_len(&self, list: ListId) -> Result<usize, Error> {
        Ok(self.tree(list)?.leaf_count)
    }

    fn validate(&self, list: ListId) -> Result<ValidationReport, Error> {
        let t = self.tree(list)?;
        Ok(tree::validate(&self.arena, &t))
    }

    fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    fn metrics_mut(&mut self) -> &mut Metrics {
        &mut self.metrics
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(out: &[(ElementId, i64)]) -> Vec<i64> {
        out.iter().map(|(_, v)| *v).collect()
    }

    fn elem_with_value(e: &TtEngine, list: ListId, value: i64) -> ElementId {
        e.elements(list)
            .unwrap()
            .into_iter()
            .find(|(_, v)| *v == value)
            .map(|(id, _)| id)
            .unwrap()
    }

    #[test]
    fn psort_seven_leaf_fixture() {
        let mut e = TtEngine::new();
        let l = e.new_list(&[3, 6, 9, 2, 4, 7, 8]).unwrap();
        assert_eq!(values(&e.psort(l, 1).unwrap()), vec![2]);
        assert_eq!(values(&e.psort(l, 3).unwrap()), vec![2, 3, 4]);
        assert_eq!(values(&e.psort(l, 10).unwrap()), vec![2, 3, 4, 6, 7, 8, 9]);
    }

    #[test]
    fn psort_insert_budget() {
        let mut e = TtEngine::new();
        let l = e.new_list(&[3, 6, 9, 2, 4, 7, 8]).unwrap();
        e.reset_metrics();
        e.psort(l, 3).unwrap();
        // Each output inserts at most one subordinate per path node.
        let log_phi_n = (7f64).ln() / ((1.0 + 5f64.sqrt()) / 2.0).ln();
        let budget = 3 * (log_phi_n.ceil() as u64 + 1);
        assert!(e.metrics().pq_inserts <= budget);
    }

    #[test]
    fn changeval_moves_minimum() {
        let mut e = TtEngine::new();
        let l = e.new_list(&[3, 6, 9, 2, 4, 7, 8]).unwrap();
        let two = elem_with_value(&e, l, 2);
        e.changeval(l, two, 10).unwrap();
        assert_eq!(values(&e.psort(l, 1).unwrap()), vec![3]);
        assert!(e.validate(l).unwrap().ok());

        let six = elem_with_value(&e, l, 6);
        e.changeval(l, six, 1).unwrap();
        assert_eq!(values(&e.psort(l, 2).unwrap()), vec![1, 3]);
    }

    #[test]
    fn changeval_noop_keeps_tree() {
        let mut e = TtEngine::new();
        let l = e.new_list(&[3, 6, 9, 2, 4, 7, 8]).unwrap();
        let before = e.elements(l).unwrap();
        let nine = elem_with_value(&e, l, 9);
        e.changeval(l, nine, 9).unwrap();
        assert_eq!(e.elements(l).unwrap(), before);
        assert!(e.validate(l).unwrap().ok());
    }

    #[test]
    fn changeval_node_budget() {
        let mut e = TtEngine::new();
        let l = e.new_list(&(0..1024).map(|i| i * 3).collect::<Vec<_>>()).unwrap();
        let elem = elem_with_value(&e, l, 512 * 3);
        e.reset_metrics();
        e.changeval(l, elem, -7).unwrap();
        let log_phi_n = (1024f64).ln() / ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!(e.metrics().nodes_visited <= log_phi_n.ceil() as u64 + 1);
    }

    #[test]
    fn link_preserves_order_and_balance() {
        let mut e = TtEngine::new();
        let a = e.new_list(&[3, 6, 9, 2]).unwrap();
        let b = e.new_list(&[4, 7, 8]).unwrap();
        let l = e.link(a, b).unwrap();
        assert_eq!(values(&e.elements(l).unwrap()), vec![3, 6, 9, 2, 4, 7, 8]);
        assert_eq!(values(&e.psort(l, 3).unwrap()), vec![2, 3, 4]);
        assert!(e.validate(l).unwrap().ok());
    }

    #[test]
    fn link_two_singletons() {
        let mut e = TtEngine::new();
        let a = e.new_list(&[5]).unwrap();
        let b = e.new_list(&[1]).unwrap();
        let l = e.link(a, b).unwrap();
        assert_eq!(values(&e.elements(l).unwrap()), vec![5, 1]);
        assert_eq!(values(&e.psort(l, 1).unwrap()), vec![1]);
        let t = e.tree(l).unwrap();
        assert_eq!(t.height(e.arena()), 1);
    }

    #[test]
    fn cut_splits_at_element() {
        let mut e = TtEngine::new();
        let l = e.new_list(&[3, 6, 9, 2, 4, 7, 8]).unwrap();
        let two = elem_with_value(&e, l, 2);
        let (x, y) = e.cut(l, two).unwrap();
        assert_eq!(values(&e.elements(x).unwrap()), vec![3, 6, 9, 2]);
        assert_eq!(values(&e.elements(y).unwrap()), vec![4, 7, 8]);
        assert!(e.validate(x).unwrap().ok());
        assert!(e.validate(y).unwrap().ok());
    }

    #[test]
    fn cut_at_last_element_yields_empty_tree() {
        let mut e = TtEngine::new();
        let l = e.new_list(&[3, 6, 9, 2, 4, 7, 8]).unwrap();
        let last = elem_with_value(&e, l, 8);
        let (x, y) = e.cut(l, last).unwrap();
        assert_eq!(e.list_len(x).unwrap(), 7);
        assert_eq!(e.list_len(y).unwrap(), 0);
        assert!(matches!(e.psort(y, 1), Err(Error::EmptyTree)));
    }

    #[test]
    fn cut_then_link_is_identity() {
        let mut e = TtEngine::new();
        let l = e.new_list(&[10, 4, 8, 1, 12, 3]).unwrap();
        let before = e.elements(l).unwrap();
        let at = elem_with_value(&e, l, 8);
        let (x, y) = e.cut(l, at).unwrap();
        let back = e.link(x, y).unwrap();
        assert_eq!(e.elements(back).unwrap(), before);
        assert!(e.validate(back).unwrap().ok());
    }

    #[test]
    fn unknown_element_and_foreign_list_rejected() {
        let mut e = TtEngine::new();
        let l1 = e.new_list(&[1, 2, 3]).unwrap();
        let l2 = e.new_list(&[4, 5]).unwrap();
        let foreign = elem_with_value(&e, l2, 4);
        assert!(matches!(
            e.changeval(l1, foreign, 9),
            Err(Error::UnknownElement(_))
        ));
        assert!(matches!(
            e.changeval(l1, ElementId(999), 9),
            Err(Error::UnknownElement(_))
        ));
    }
}
