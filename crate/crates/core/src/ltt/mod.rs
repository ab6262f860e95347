//! Layered tournament trees.
//!
//! Layer 0 is the tournament tree of the list. Every principal path with at
//! least one internal node is mirrored by a *team tree* one layer down whose
//! leaves are the path's subordinate keys, topmost first. Cross links tie
//! the layers together: an internal node's `down` is the team-tree leaf
//! carrying its subordinate's key, and that leaf's `upp` points back. Teams
//! of teams continue recursively until the trees are single nodes, which by
//! the balance bound happens within an iterated-logarithm number of layers.
//!
//! Team trees are never stored explicitly: they are discovered through the
//! cross links, so re-cutting and re-linking them during updates needs no
//! extra bookkeeping.

mod engine;
pub mod query;
pub mod update;

pub use engine::LttEngine;

use crate::arena::{Arena, NodeId};
use crate::error::Error;
use crate::tree::{self, Tree, ValidationReport};
use crate::types::{ElementId, Key};

/// (sqrt(5) + 1) / 2, the base of every height and layer bound here.
pub const GOLDEN_RATIO: f64 = 1.618033988749895;

pub fn log_phi(n: f64) -> f64 {
    n.ln() / GOLDEN_RATIO.ln()
}

/// Build the layered tournament tree of `items`: the layer-0 tree plus,
/// recursively, a team tree per principal path.
pub fn build(a: &mut Arena, items: &[(ElementId, i64)]) -> Result<Tree, Error> {
    let t = tree::build(a, items)?;
    wire_teams(a, t.root.unwrap());
    Ok(t)
}

/// True for an internal node that is the highest node of its principal path.
pub(crate) fn is_path_top(a: &Arena, v: NodeId) -> bool {
    let node = a.node(v);
    if node.is_leaf() {
        return false;
    }
    node.parent.is_none_or(|p| a.node(p).key != node.key)
}

/// Internal nodes of the principal path whose top is `top`, top to bottom.
pub(crate) fn path_internals(a: &Arena, top: NodeId) -> Vec<NodeId> {
    let mut path = vec![top];
    let mut w = top;
    while let Some(c) = tree::same_key_child(a, w) {
        if a.node(c).is_leaf() {
            break;
        }
        path.push(c);
        w = c;
    }
    path
}

pub(crate) fn path_tops(a: &Arena, root: NodeId) -> Vec<NodeId> {
    tree::nodes(a, root)
        .into_iter()
        .filter(|&v| is_path_top(a, v))
        .collect()
}

fn wire_teams(a: &mut Arena, root: NodeId) {
    for top in path_tops(a, root) {
        let path = path_internals(a, top);
        let team: Vec<Key> = path
            .iter()
            .map(|&u| a.node(tree::subordinate(a, u).expect("internal")).key)
            .collect();
        let team_root = tree::build_node(a, &team);
        let team_leaves = tree::leaves(a, team_root);
        debug_assert_eq!(team_leaves.len(), path.len());
        for (&u, &leaf) in path.iter().zip(team_leaves.iter()) {
            a.node_mut(u).cross = Some(leaf);
            a.node_mut(leaf).cross = Some(u);
        }
        wire_teams(a, team_root);
    }
}

/// The subordinate values along `u`'s principal path, topmost first; equal
/// to the team tree's leaf values left to right.
pub fn team_of(a: &Arena, u: NodeId) -> Result<Vec<i64>, Error> {
    let top = tree::path_top(a, u);
    if a.node(top).is_leaf() {
        return Err(Error::PathTooShort);
    }
    Ok(path_internals(a, top)
        .iter()
        .map(|&v| a.node(tree::subordinate(a, v).expect("internal")).key.value)
        .collect())
}

/// Root of the team tree of `u`'s principal path, if the path has one.
pub fn team_tree_root(a: &Arena, u: NodeId) -> Option<NodeId> {
    let top = tree::path_top(a, u);
    if a.node(top).is_leaf() {
        return None;
    }
    Some(tree::tree_root(a, a.node(top).cross.expect("internal has down")))
}

/// Iterated logarithm: the smallest `i >= 0` such that `log_base` applied
/// `i` times to `n` is at most 1. Computed against the power tower
/// `base^^i`, which sidesteps accumulated rounding in repeated logs. For
/// bases whose tower converges below `n` (possible when `base < e^(1/e)`)
/// the function saturates at `u32::MAX`.
pub fn iterated_log(base: f64, n: f64) -> Result<u32, Error> {
    if !(base > 1.0) {
        return Err(Error::BadBase(base));
    }
    if n <= 1.0 {
        return Ok(0);
    }
    let mut tower = base;
    let mut i = 1u32;
    while tower < n {
        let next = base.powf(tower);
        if !(next > tower) {
            return Ok(u32::MAX);
        }
        tower = next;
        i += 1;
    }
    Ok(i)
}

/// Deepest layer index reachable through down links. A single tree with no
/// teams is layer 0.
pub fn layer_number(a: &Arena, t: &Tree) -> u32 {
    match t.root {
        None => 0,
        Some(root) => deepest_layer(a, root),
    }
}

fn deepest_layer(a: &Arena, root: NodeId) -> u32 {
    let mut deepest = 0;
    for top in path_tops(a, root) {
        let team_root = tree::tree_root(a, a.node(top).cross.expect("internal has down"));
        deepest = deepest.max(1 + deepest_layer(a, team_root));
    }
    deepest
}

/// Per-layer aggregates: tree count, total leaves, and the largest team
/// (`max_team_size[0]` is the list size itself, deeper entries shrink by a
/// log each).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerStats {
    pub trees: usize,
    pub total_leaves: usize,
    pub max_team_size: usize,
}

pub fn layer_stats(a: &Arena, t: &Tree) -> Vec<LayerStats> {
    let mut out = Vec::new();
    let mut current = match t.root {
        None => return out,
        Some(r) => vec![r],
    };
    while !current.is_empty() {
        let mut next = Vec::new();
        let mut stats = LayerStats {
            trees: current.len(),
            total_leaves: 0,
            max_team_size: 0,
        };
        for &r in &current {
            let size = a.node(r).n_leaves as usize;
            stats.total_leaves += size;
            stats.max_team_size = stats.max_team_size.max(size);
            for top in path_tops(a, r) {
                next.push(tree::tree_root(a, a.node(top).cross.expect("down")));
            }
        }
        out.push(stats);
        current = next;
    }
    out
}

/// Check the layered invariants on top of the per-tree tournament checks:
/// cross links are mutual inverses, every `down` carries its node's
/// subordinate key, team trees list each path's downs left to right in
/// top-down path order, and the layer/team-size bounds hold.
pub fn validate(a: &Arena, t: &Tree) -> ValidationReport {
    let mut report = ValidationReport::default();
    let Some(root) = t.root else {
        return report;
    };
    let n = t.leaf_count as f64;

    let mut layer = 0usize;
    // Bound on team sizes at the current layer: layer-i teams hold at most
    // the i-fold log_phi of n elements.
    let mut size_bound = n;
    let mut prev_max_team: Option<usize> = None;
    let mut current = vec![root];
    while !current.is_empty() {
        let mut next = Vec::new();
        let mut max_team = 0usize;
        for &r in &current {
            let as_tree = Tree {
                root: Some(r),
                leaf_count: a.node(r).n_leaves as usize,
            };
            report.merge(tree::validate(a, &as_tree));
            max_team = max_team.max(as_tree.leaf_count);

            for v in tree::nodes(a, r) {
                let node = a.node(v);
                if node.is_leaf() {
                    match (layer, node.cross) {
                        (0, Some(_)) => {
                            report.push(Some(v), "cross", "layer-0 leaf has an upp link".into())
                        }
                        (0, None) => {}
                        (_, None) => {
                            report.push(Some(v), "cross", "team leaf without upp link".into())
                        }
                        (_, Some(up)) => {
                            if !a.contains(up) || a.node(up).cross != Some(v) {
                                report.push(Some(v), "cross_inverse", "upp(down) mismatch".into());
                            }
                        }
                    }
                } else {
                    match node.cross {
                        None => {
                            report.push(Some(v), "cross", "internal node without down".into())
                        }
                        Some(d) => {
                            if !a.contains(d) {
                                report.push(Some(v), "cross", "down link is dangling".into());
                            } else {
                                let dn = a.node(d);
                                if !dn.is_leaf() || dn.cross != Some(v) {
                                    report.push(
                                        Some(v),
                                        "cross_inverse",
                                        "down must be a leaf pointing back".into(),
                                    );
                                }
                                let sub = tree::subordinate(a, v).expect("internal");
                                if dn.key != a.node(sub).key {
                                    report.push(
                                        Some(v),
                                        "down_key",
                                        format!(
                                            "down keyed {:?}, subordinate {:?}",
                                            dn.key,
                                            a.node(sub).key
                                        ),
                                    );
                                }
                            }
                        }
                    }
                }
            }

            // Team reconstruction: the team tree of each path lists
            // the path's downs left to right, topmost path node first.
            for top in path_tops(a, r) {
                let path = path_internals(a, top);
                let team_root = tree::tree_root(a, a.node(top).cross.expect("down"));
                let team_leaves = tree::leaves(a, team_root);
                if team_leaves.len() != path.len() {
                    report.push(
                        Some(top),
                        "team_size",
                        format!(
                            "path of {} internal nodes, team tree of {} leaves",
                            path.len(),
                            team_leaves.len()
                        ),
                    );
                } else {
                    for (&u, &leaf) in path.iter().zip(team_leaves.iter()) {
                        if a.node(u).cross != Some(leaf) {
                            report.push(
                                Some(u),
                                "team_order",
                                "downs out of order in the team tree".into(),
                            );
                            break;
                        }
                    }
                }
                next.push(team_root);
            }
        }

        if layer >= 1 {
            if (max_team as f64) > size_bound + 1e-9 {
                report.push(
                    None,
                    "team_size_bound",
                    format!("layer {layer} max team {max_team} exceeds {size_bound:.3}"),
                );
            }
            if let Some(prev) = prev_max_team {
                if (max_team as f64) > log_phi(prev as f64) + 1e-9 {
                    report.push(
                        None,
                        "size_chain",
                        format!(
                            "layer {layer} max team {max_team} exceeds log_phi({prev})"
                        ),
                    );
                }
            }
        }
        prev_max_team = Some(max_team);
        size_bound = log_phi(size_bound);
        layer += 1;
        current = next;
    }

    let layers = (layer - 1) as u32;
    let bound = iterated_log(GOLDEN_RATIO, n).expect("phi > 1");
    if layers > bound {
        report.push(
            None,
            "layer_bound",
            format!("layer number {layers} exceeds log*({n}) = {bound}"),
        );
    }
    report
}
