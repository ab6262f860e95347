//! Update operations on layered tournament trees.
//!
//! Everything funnels through [`expose`], the bottom-up repair walk: after a
//! child of `u` changed, each node on the walk re-evaluates its minimum,
//! splits its old team tree at its own down leaf, absorbs the team of the
//! new continuation below, and rewrites its down leaf to the demoted
//! child's key (recursing one layer down for all of those). `link` splices
//! and rebalances like the single-tree engine but with a fresh down leaf for
//! the spliced node; `cut` first drives the cut leaf to the reserved minimum
//! so the leaf-to-root path becomes one principal path whose team closure
//! can be discarded wholesale.

use std::collections::BTreeSet;

use crate::arena::{Arena, Node, NodeId};
use crate::error::Error;
use crate::metrics::Metrics;
use crate::tree::{self, Tree};
use crate::types::{Key, MIN_SENTINEL};

use super::{is_path_top, path_tops};

fn team_root_of_internal(a: &Arena, v: NodeId) -> NodeId {
    tree::tree_root(a, a.node(v).cross.expect("internal node has a down link"))
}

fn tree_at(a: &Arena, root: NodeId) -> Tree {
    Tree {
        root: Some(root),
        leaf_count: a.node(root).n_leaves as usize,
    }
}

/// Recompute height and leaf count from `v` to its tree's root. Keys along
/// the walk are refreshed too, but callers that change principal paths must
/// still run [`expose`] to repartition the teams.
fn fix_sizes_upward(a: &mut Arena, from: NodeId, m: &mut Metrics) {
    let mut v = Some(from);
    while let Some(x) = v {
        m.step();
        if !a.node(x).is_leaf() {
            tree::recompute(a, x);
        }
        v = a.node(x).parent;
    }
}

/// Repair walk from `u` to its tree's root. Returns the number of
/// iterations, which equals the walk length.
pub fn expose(a: &mut Arena, u: NodeId, m: &mut Metrics) -> Result<u64, Error> {
    if a.node(u).is_leaf() {
        return Err(Error::NotInternal);
    }
    let mut iterations = 0u64;
    let mut x = Some(u);
    while let Some(v) = x {
        iterations += 1;
        m.expose_iterations += 1;
        m.step();

        let node = a.node(v);
        let (l, r) = (node.left.unwrap(), node.right.unwrap());
        let (z, z_demoted) = if a.node(l).key < a.node(r).key {
            (l, r)
        } else {
            (r, l)
        };
        let demoted_key = a.node(z_demoted).key;
        a.node_mut(v).key = a.node(z).key;

        // Split our team at down(v). The right part stays behind as the team
        // of the old continuation below v; its down links already point
        // there, so no rewiring is needed.
        let dv = a.node(v).cross.expect("internal node has a down link");
        let team = tree_at(a, tree::tree_root(a, dv));
        let (upper, _below) = cut_at(a, team, dv, m)?;

        // Absorb the new continuation's team below ours.
        if !a.node(z).is_leaf() {
            let z_team = tree_at(a, team_root_of_internal(a, z));
            link(a, upper, z_team, m);
        }

        // down(v) now mirrors the demoted child.
        changeval_leaf(a, dv, demoted_key, m)?;

        x = a.node(v).parent;
    }
    Ok(iterations)
}

/// Set a leaf's key and restore the layered invariants above it. Returns
/// the expose iteration count (0 for a root leaf). Updates on team trees
/// enter here with the mirrored key of the new subordinate.
pub fn changeval_leaf(
    a: &mut Arena,
    leaf: NodeId,
    key: Key,
    m: &mut Metrics,
) -> Result<u64, Error> {
    debug_assert!(a.node(leaf).is_leaf());
    m.step();
    a.node_mut(leaf).key = key;
    match a.node(leaf).parent {
        Some(p) => expose(a, p, m),
        None => Ok(0),
    }
}

/// Public changeval: new value, same element identity.
pub fn changeval(a: &mut Arena, t: &Tree, leaf: NodeId, value: i64, m: &mut Metrics) -> Result<(), Error> {
    if value == MIN_SENTINEL {
        return Err(Error::SentinelValue(value));
    }
    let tiebreak = a.node(leaf).key.tiebreak;
    let iterations = changeval_leaf(a, leaf, Key::new(value, tiebreak), m)?;
    debug_assert!(
        iterations <= u64::from(t.height(a)),
        "expose walked further than the tree height"
    );
    Ok(())
}

/// Layered rotation: separate the two affected nodes from their principal
/// paths, rotate as in a plain binary tree, then expose the demoted parent.
pub fn rotate_left(a: &mut Arena, u: NodeId, m: &mut Metrics) -> Result<(), Error> {
    let y = a.node(u).parent.ok_or(Error::NoParent)?;
    if a.node(y).right != Some(u) {
        return Err(Error::NotRightChild);
    }
    if a.node(u).is_leaf() {
        return Err(Error::NotInternal);
    }
    separate_for_rotation(a, y, u, m)?;
    tree::rotate_left(a, u)?;
    m.rotations += 1;
    fix_sizes_upward(a, y, m);
    expose(a, y, m)?;
    Ok(())
}

pub fn rotate_right(a: &mut Arena, u: NodeId, m: &mut Metrics) -> Result<(), Error> {
    let y = a.node(u).parent.ok_or(Error::NoParent)?;
    if a.node(y).left != Some(u) {
        return Err(Error::NotLeftChild);
    }
    if a.node(u).is_leaf() {
        return Err(Error::NotInternal);
    }
    separate_for_rotation(a, y, u, m)?;
    tree::rotate_right(a, u)?;
    m.rotations += 1;
    fix_sizes_upward(a, y, m);
    expose(a, y, m)?;
    Ok(())
}

fn separate_for_rotation(a: &mut Arena, y: NodeId, u: NodeId, m: &mut Metrics) -> Result<(), Error> {
    if let Some(py) = a.node(y).parent {
        cut_team_at_down(a, py, m)?;
    }
    cut_team_at_down(a, y, m)?;
    cut_team_at_down(a, u, m)?;
    Ok(())
}

/// Split the team tree of `v`'s path right after `v`'s own down leaf,
/// leaving `v` as the lowest member of its path segment.
fn cut_team_at_down(a: &mut Arena, v: NodeId, m: &mut Metrics) -> Result<(), Error> {
    let d = a.node(v).cross.expect("internal node has a down link");
    let team = tree_at(a, tree::tree_root(a, d));
    cut_at(a, team, d, m)?;
    Ok(())
}

/// Concatenate two layered trees, `t1`'s leaves first. Splices within
/// one height of the shorter tree with a fresh down leaf for the new node,
/// exposes it, then applies one rebalancing event (a rotation, doubled for
/// the zig-zag case) to restore balance. Inputs are consumed.
pub fn link(a: &mut Arena, t1: Tree, t2: Tree, m: &mut Metrics) -> Tree {
    let Some(r1) = t1.root else { return t2 };
    let Some(r2) = t2.root else { return t1 };
    let leaf_count = t1.leaf_count + t2.leaf_count;
    let h1 = a.node(r1).height;
    let h2 = a.node(r2).height;

    let v = if h1 >= h2 {
        let mut x = r1;
        while a.node(x).height > h2 + 1 {
            m.step();
            x = a.node(x).right.unwrap();
        }
        let p = a.node(x).parent;
        if let Some(p) = p {
            // The new node lands between p and x. If x continued p's
            // principal path, x's team tree still lists the downs of the
            // segment above it; sever them so the expose below only ever
            // merges teams that start at their own node.
            cut_team_at_down(a, p, m).expect("p is internal");
        }
        let v = tree::join_under_new_node(a, x, r2);
        if let Some(p) = p {
            a.node_mut(v).parent = Some(p);
            a.node_mut(p).right = Some(v);
        }
        v
    } else {
        let mut x = r2;
        while a.node(x).height > h1 + 1 {
            m.step();
            x = a.node(x).left.unwrap();
        }
        let p = a.node(x).parent;
        if let Some(p) = p {
            cut_team_at_down(a, p, m).expect("p is internal");
        }
        let v = tree::join_under_new_node(a, r1, x);
        if let Some(p) = p {
            a.node_mut(v).parent = Some(p);
            a.node_mut(p).left = Some(v);
        }
        v
    };

    // Fresh singleton team for the new node, keyed by its subordinate; the
    // expose below merges it into the surrounding teams.
    m.step();
    let sub = tree::subordinate(a, v).expect("v is internal");
    let down = a.alloc(Node::leaf(a.node(sub).key));
    a.node_mut(down).cross = Some(v);
    a.node_mut(v).cross = Some(down);

    fix_sizes_upward(a, v, m);
    expose(a, v, m).expect("v is internal");

    // Single rebalancing event: the splice grew the spine by at most one.
    let mut y = v;
    while let Some(w) = a.node(y).parent {
        m.step();
        let (l, r) = (a.node(w).left.unwrap(), a.node(w).right.unwrap());
        let (hl, hr) = (a.node(l).height, a.node(r).height);
        if hl.abs_diff(hr) > 1 {
            let heavy = if hl > hr { l } else { r };
            let hn = a.node(heavy);
            let (inner, outer) = if hl > hr {
                (hn.right.unwrap(), hn.left.unwrap())
            } else {
                (hn.left.unwrap(), hn.right.unwrap())
            };
            if a.node(outer).height >= a.node(inner).height {
                if hl > hr {
                    rotate_right(a, heavy, m).expect("heavy is a left child");
                } else {
                    rotate_left(a, heavy, m).expect("heavy is a right child");
                }
            } else if hl > hr {
                rotate_left(a, inner, m).expect("inner is a right child");
                rotate_right(a, inner, m).expect("inner is now a left child");
            } else {
                rotate_right(a, inner, m).expect("inner is a left child");
                rotate_left(a, inner, m).expect("inner is now a right child");
            }
            break;
        }
        y = w;
    }

    let root = tree::tree_root(a, v);
    Tree {
        root: Some(root),
        leaf_count,
    }
}

/// Split after `leaf`. The leaf temporarily takes the reserved
/// minimum so the leaf-to-root path becomes one principal path; the path's
/// team closure is then dead and freed, the sibling subtrees are re-linked
/// on their sides, and the restored leaf joins the head part. The input is
/// consumed.
pub fn cut_at(a: &mut Arena, t: Tree, leaf: NodeId, m: &mut Metrics) -> Result<(Tree, Tree), Error> {
    debug_assert!(a.node(leaf).is_leaf());
    if a.node(leaf).parent.is_none() {
        debug_assert_eq!(t.root, Some(leaf));
        return Ok((t, Tree::empty()));
    }

    let saved = a.node(leaf).key;
    changeval_leaf(a, leaf, Key::new(MIN_SENTINEL, saved.tiebreak), m)?;
    debug_assert_eq!(
        a.node(tree::tree_root(a, leaf)).key.value,
        MIN_SENTINEL,
        "the cut path must own the root after the sentinel update"
    );

    // The whole leaf-to-root path is now one principal path; its team tree
    // (and everything hanging below it) mirrors nodes that are about to be
    // dismantled.
    let lowest = a.node(leaf).parent.unwrap();
    let path_team = team_root_of_internal(a, lowest);
    free_tree_recursive(a, path_team, m);

    let mut spine: Vec<(bool, NodeId, NodeId)> = Vec::new();
    let mut y = leaf;
    while let Some(x) = a.node(y).parent {
        m.step();
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
        m.step();
        a.free(x);
    }

    let mut t1 = Tree::empty();
    let mut t2 = Tree::empty();
    for &(was_left, sib, _) in &spine {
        let detached = tree_at(a, sib);
        if was_left {
            t2 = link(a, t2, detached, m);
        } else {
            t1 = link(a, detached, t1, m);
        }
    }

    m.step();
    a.node_mut(leaf).key = saved;
    t1 = link(a, t1, Tree::singleton(leaf), m);
    debug_assert_eq!(t1.leaf_count + t2.leaf_count, t.leaf_count);
    Ok((t1, t2))
}

/// Free a team tree and, recursively, the team trees of all its paths.
fn free_tree_recursive(a: &mut Arena, root: NodeId, m: &mut Metrics) {
    for top in path_tops(a, root) {
        let team_root = team_root_of_internal(a, top);
        free_tree_recursive(a, team_root, m);
    }
    for v in tree::nodes(a, root) {
        m.step();
        a.free(v);
    }
}

/// Minimal set containing `v` and closed under parent and down edges; the
/// region an expose from `v` is allowed to touch.
pub fn pd_closure_bruteforce(a: &Arena, v: NodeId) -> BTreeSet<NodeId> {
    let mut set = BTreeSet::new();
    let mut work = vec![v];
    while let Some(w) = work.pop() {
        if !set.insert(w) {
            continue;
        }
        if let Some(p) = a.node(w).parent {
            work.push(p);
        }
        if !a.node(w).is_leaf() {
            work.push(a.node(w).cross.expect("internal node has a down link"));
        }
    }
    set
}

/// Does `v` head a principal path (and so name a team tree)? Exposed for
/// tests that walk the layer structure.
pub fn heads_path(a: &Arena, v: NodeId) -> bool {
    is_path_top(a, v)
}
