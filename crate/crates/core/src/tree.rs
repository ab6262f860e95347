//! Tournament trees: balanced full binary trees over a list, every internal
//! node holding the minimum of its children. Nodes with equal keys form
//! *principal paths*, vertical segments each originating at exactly one leaf.
//! This module owns construction, navigation, rotations and the structural
//! validator shared by both engines.

use crate::arena::{Arena, Node, NodeId};
use crate::error::Error;
use crate::types::{ElementId, Key, MIN_SENTINEL};

/// A tournament tree by handle. `root == None` encodes the empty tree, which
/// `cut` at the last element produces.
#[derive(Debug, Clone, Copy)]
pub struct Tree {
    pub root: Option<NodeId>,
    pub leaf_count: usize,
}

impl Tree {
    pub fn empty() -> Self {
        Tree {
            root: None,
            leaf_count: 0,
        }
    }

    pub fn singleton(root: NodeId) -> Self {
        Tree {
            root: Some(root),
            leaf_count: 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn height(&self, a: &Arena) -> u32 {
        self.root.map_or(0, |r| a.node(r).height)
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub node: Option<NodeId>,
    pub rule: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, node: Option<NodeId>, rule: &'static str, detail: String) {
        self.violations.push(Violation { node, rule, detail });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

/// Build the tournament tree of `items` (element id, value) with the
/// deterministic halving shape: the left half takes `ceil(n/2)` leaves.
pub fn build(a: &mut Arena, items: &[(ElementId, i64)]) -> Result<Tree, Error> {
    if items.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some((_, v)) = items.iter().find(|(_, v)| *v == MIN_SENTINEL) {
        return Err(Error::SentinelValue(*v));
    }
    let keys: Vec<Key> = items.iter().map(|(id, v)| Key::new(*v, *id)).collect();
    let root = build_node(a, &keys);
    Ok(Tree {
        root: Some(root),
        leaf_count: items.len(),
    })
}

pub(crate) fn build_node(a: &mut Arena, keys: &[Key]) -> NodeId {
    if keys.len() == 1 {
        return a.alloc(Node::leaf(keys[0]));
    }
    let mid = keys.len().div_ceil(2);
    let left = build_node(a, &keys[..mid]);
    let right = build_node(a, &keys[mid..]);
    join_under_new_node(a, left, right)
}

/// Allocate an internal node over two existing roots and recompute its
/// derived fields.
pub(crate) fn join_under_new_node(a: &mut Arena, left: NodeId, right: NodeId) -> NodeId {
    let id = a.alloc(Node {
        parent: None,
        left: Some(left),
        right: Some(right),
        cross: None,
        key: a.node(left).key,
        height: 0,
        n_leaves: 0,
    });
    a.node_mut(left).parent = Some(id);
    a.node_mut(right).parent = Some(id);
    recompute(a, id);
    id
}

/// Recompute key, height and leaf count of an internal node from its
/// children.
pub(crate) fn recompute(a: &mut Arena, v: NodeId) {
    let node = a.node(v);
    let (l, r) = (node.left.unwrap(), node.right.unwrap());
    let (ln, rn) = (a.node(l), a.node(r));
    let key = ln.key.min(rn.key);
    let height = 1 + ln.height.max(rn.height);
    let n_leaves = ln.n_leaves + rn.n_leaves;
    let node = a.node_mut(v);
    node.key = key;
    node.height = height;
    node.n_leaves = n_leaves;
}

pub fn is_leaf(a: &Arena, v: NodeId) -> bool {
    a.node(v).is_leaf()
}

/// The child that continues `v`'s principal path (equal key), if `v` is
/// internal.
pub fn same_key_child(a: &Arena, v: NodeId) -> Option<NodeId> {
    let node = a.node(v);
    let l = node.left?;
    let r = node.right?;
    if a.node(l).key == node.key {
        Some(l)
    } else {
        debug_assert_eq!(a.node(r).key, node.key);
        Some(r)
    }
}

/// The child of `u` that does not belong to `u`'s principal path, i.e. the
/// child with the larger key.
pub fn subordinate(a: &Arena, u: NodeId) -> Result<NodeId, Error> {
    let node = a.node(u);
    let (l, r) = match (node.left, node.right) {
        (Some(l), Some(r)) => (l, r),
        _ => return Err(Error::NotInternal),
    };
    if a.node(l).key == node.key {
        Ok(r)
    } else {
        Ok(l)
    }
}

/// The unique leaf of `u`'s principal path, reached by descending through
/// equal-key children.
pub fn principal_path_origin(a: &Arena, u: NodeId) -> NodeId {
    let mut v = u;
    while let Some(c) = same_key_child(a, v) {
        v = c;
    }
    v
}

/// The highest node of `u`'s principal path.
pub fn path_top(a: &Arena, u: NodeId) -> NodeId {
    let key = a.node(u).key;
    let mut v = u;
    while let Some(p) = a.node(v).parent {
        if a.node(p).key != key {
            break;
        }
        v = p;
    }
    v
}

pub fn tree_root(a: &Arena, u: NodeId) -> NodeId {
    let mut v = u;
    while let Some(p) = a.node(v).parent {
        v = p;
    }
    v
}

/// In-order leaf handles.
pub fn leaves(a: &Arena, root: NodeId) -> Vec<NodeId> {
    let mut out = Vec::with_capacity(a.node(root).n_leaves as usize);
    collect_leaves(a, root, &mut out);
    out
}

fn collect_leaves(a: &Arena, v: NodeId, out: &mut Vec<NodeId>) {
    let node = a.node(v);
    match (node.left, node.right) {
        (Some(l), Some(r)) => {
            collect_leaves(a, l, out);
            collect_leaves(a, r, out);
        }
        _ => out.push(v),
    }
}

/// All node handles of the subtree under `root`, preorder.
pub fn nodes(a: &Arena, root: NodeId) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        out.push(v);
        let node = a.node(v);
        if let (Some(l), Some(r)) = (node.left, node.right) {
            stack.push(r);
            stack.push(l);
        }
    }
    out
}

/// Standard left rotation: `u` (a right child) takes its parent's place, the
/// parent becomes `u`'s left child, and `u`'s former left subtree becomes the
/// parent's right subtree. Keys, heights and leaf counts of the two affected
/// nodes are recomputed. Returns `u`, now rooted where the parent was.
pub fn rotate_left(a: &mut Arena, u: NodeId) -> Result<NodeId, Error> {
    let w = a.node(u).parent.ok_or(Error::NoParent)?;
    if a.node(w).right != Some(u) {
        return Err(Error::NotRightChild);
    }
    let g = a.node(w).parent;
    let c = a.node(u).left.expect("rotated node must be internal");

    a.node_mut(w).right = Some(c);
    a.node_mut(c).parent = Some(w);
    a.node_mut(u).left = Some(w);
    a.node_mut(w).parent = Some(u);
    a.node_mut(u).parent = g;
    if let Some(g) = g {
        let gn = a.node_mut(g);
        if gn.left == Some(w) {
            gn.left = Some(u);
        } else {
            gn.right = Some(u);
        }
    }
    recompute(a, w);
    recompute(a, u);
    Ok(u)
}

/// Mirror image of [`rotate_left`]: `u` must be a left child.
pub fn rotate_right(a: &mut Arena, u: NodeId) -> Result<NodeId, Error> {
    let w = a.node(u).parent.ok_or(Error::NoParent)?;
    if a.node(w).left != Some(u) {
        return Err(Error::NotLeftChild);
    }
    let g = a.node(w).parent;
    let c = a.node(u).right.expect("rotated node must be internal");

    a.node_mut(w).left = Some(c);
    a.node_mut(c).parent = Some(w);
    a.node_mut(u).right = Some(w);
    a.node_mut(w).parent = Some(u);
    a.node_mut(u).parent = g;
    if let Some(g) = g {
        let gn = a.node_mut(g);
        if gn.left == Some(w) {
            gn.left = Some(u);
        } else {
            gn.right = Some(u);
        }
    }
    recompute(a, w);
    recompute(a, u);
    Ok(u)
}

/// Least possible leaf count of a balanced full binary tree of height `h`:
/// `f(0) = 1`, `f(1) = 2`, `f(h) = f(h-1) + f(h-2)`. The exact integer form
/// of the `height <= log_phi(n)` bound.
pub fn min_leaves_for_height(h: u32) -> u128 {
    let (mut a, mut b) = (1u128, 2u128);
    for _ in 0..h {
        let next = a.saturating_add(b);
        a = b;
        b = next;
    }
    a
}

/// Check every structural invariant of a tournament tree. Violations are
/// reported, never thrown.
pub fn validate(a: &Arena, t: &Tree) -> ValidationReport {
    let mut report = ValidationReport::default();
    let Some(root) = t.root else {
        if t.leaf_count != 0 {
            report.push(
                None,
                "leaf_count",
                format!("empty tree with leaf_count {}", t.leaf_count),
            );
        }
        return report;
    };

    if a.node(root).parent.is_some() {
        report.push(Some(root), "root_parent", "root has a parent".into());
    }

    let mut leaf_keys: Vec<Key> = Vec::new();
    for v in nodes(a, root) {
        let node = a.node(v);
        match (node.left, node.right) {
            (Some(l), Some(r)) => {
                for c in [l, r] {
                    if a.node(c).parent != Some(v) {
                        report.push(
                            Some(c),
                            "parent_link",
                            format!("child of {v:?} does not point back"),
                        );
                    }
                }
                let (ln, rn) = (a.node(l), a.node(r));
                let h = 1 + ln.height.max(rn.height);
                if node.height != h {
                    report.push(
                        Some(v),
                        "height_field",
                        format!("stored {} computed {}", node.height, h),
                    );
                }
                if ln.height.abs_diff(rn.height) > 1 {
                    report.push(
                        Some(v),
                        "balance",
                        format!("child heights {} and {}", ln.height, rn.height),
                    );
                }
                if node.n_leaves != ln.n_leaves + rn.n_leaves {
                    report.push(
                        Some(v),
                        "leaf_count_field",
                        format!(
                            "stored {} computed {}",
                            node.n_leaves,
                            ln.n_leaves + rn.n_leaves
                        ),
                    );
                }
                if node.key != ln.key.min(rn.key) {
                    report.push(
                        Some(v),
                        "min_of_children",
                        format!("key {:?} children {:?} {:?}", node.key, ln.key, rn.key),
                    );
                }
                if ln.key == rn.key {
                    report.push(
                        Some(v),
                        "distinct_children",
                        format!("both children keyed {:?}", ln.key),
                    );
                }
            }
            (None, None) => {
                if node.height != 0 {
                    report.push(Some(v), "leaf_height", format!("height {}", node.height));
                }
                if node.n_leaves != 1 {
                    report.push(
                        Some(v),
                        "leaf_count_field",
                        format!("leaf with n_leaves {}", node.n_leaves),
                    );
                }
                if node.key.value == MIN_SENTINEL {
                    report.push(Some(v), "sentinel", "leaf stores the reserved value".into());
                }
                leaf_keys.push(node.key);
            }
            _ => {
                report.push(Some(v), "fullness", "internal node with one child".into());
            }
        }
    }

    let root_node = a.node(root);
    if t.leaf_count != root_node.n_leaves as usize {
        report.push(
            Some(root),
            "leaf_count",
            format!("tree says {}, root says {}", t.leaf_count, root_node.n_leaves),
        );
    }
    if leaf_keys.len() != t.leaf_count {
        report.push(
            Some(root),
            "leaf_count",
            format!("tree says {}, found {}", t.leaf_count, leaf_keys.len()),
        );
    }

    // Height bound of a balanced full tree, in exact arithmetic: a tree of
    // height h has at least f(h) leaves, so h <= log_phi(n).
    let need = min_leaves_for_height(root_node.height);
    if (root_node.n_leaves as u128) < need {
        report.push(
            Some(root),
            "height_bound",
            format!(
                "height {} needs >= {} leaves, found {}",
                root_node.height, need, root_node.n_leaves
            ),
        );
    }

    leaf_keys.sort();
    if leaf_keys.windows(2).any(|w| w[0] == w[1]) {
        report.push(Some(root), "key_uniqueness", "duplicate leaf key".into());
    }

    // Equal-key classes must form vertical paths, each containing exactly
    // one leaf. Checked directly: group nodes by key, order each group by
    // height, and require a parent chain starting at a leaf.
    let mut by_key: std::collections::HashMap<Key, Vec<NodeId>> = std::collections::HashMap::new();
    for v in nodes(a, root) {
        by_key.entry(a.node(v).key).or_default().push(v);
    }
    for (key, mut class) in by_key {
        class.sort_by_key(|&v| a.node(v).height);
        let leaves_in_class = class.iter().filter(|&&v| a.node(v).is_leaf()).count();
        if leaves_in_class != 1 {
            report.push(
                Some(class[0]),
                "path_partition",
                format!("class {key:?} contains {leaves_in_class} leaves"),
            );
        }
        for pair in class.windows(2) {
            if a.node(pair[0]).parent != Some(pair[1]) {
                report.push(
                    Some(pair[0]),
                    "path_partition",
                    format!("class {key:?} is not a vertical path"),
                );
            }
        }
    }

    report
}
