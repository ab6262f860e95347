//! Lazy enumeration over layered tournament trees.
//!
//! An iterator per tree yields that tree's origin leaves in ascending key
//! order. The first call returns the root's origin directly; afterwards the
//! iterator keeps a priority queue of *superordinates* — internal nodes
//! whose subordinate heads the principal path of the next candidates — and
//! advances the team iterators one layer down to refill it. Between calls
//! the queue holds exactly the candidate set of the outputs so far.

use std::collections::HashMap;

use crate::arena::{Arena, NodeId};
use crate::error::Error;
use crate::metrics::Metrics;
use crate::pq::MinHeap;
use crate::tree::{self, Tree};
use crate::types::ElementId;

/// Per-team lazy enumerator. Child iterators for lower-layer teams are
/// memoized for the iterator's lifetime, keyed by team tree root.
pub struct PsortIter {
    root: NodeId,
    calls: u64,
    last: Option<NodeId>,
    queue: MinHeap<NodeId>,
    children: HashMap<NodeId, Box<PsortIter>>,
    capture: bool,
    captured: Option<Vec<NodeId>>,
}

impl PsortIter {
    pub fn new(root: NodeId) -> Self {
        PsortIter {
            root,
            calls: 0,
            last: None,
            queue: MinHeap::new(),
            children: HashMap::new(),
            capture: false,
            captured: None,
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    /// Record the queue contents at the checkpoint between refill and pop on
    /// every subsequent call; test support for the candidate-set invariant.
    pub fn enable_capture(&mut self) {
        self.capture = true;
    }

    /// Queue snapshot taken during the last call, if capturing. The first
    /// call has no checkpoint (nothing has been enqueued yet).
    pub fn captured_queue(&self) -> Option<&[NodeId]> {
        self.captured.as_deref()
    }

    /// Most calls made to any single lower-layer team iterator, bootstrap
    /// calls included.
    pub fn max_descendant_calls(&self) -> u64 {
        self.children
            .values()
            .map(|c| c.calls.max(c.max_descendant_calls()))
            .max()
            .unwrap_or(0)
    }

    fn largest_queue(&self) -> usize {
        let mine = self.queue.len();
        self.children
            .values()
            .map(|c| c.largest_queue())
            .max()
            .unwrap_or(0)
            .max(mine)
    }

    /// The next origin leaf of this tree in ascending key order, or `None`
    /// once exhausted.
    pub fn nxt(&mut self, a: &Arena, m: &mut Metrics) -> Option<NodeId> {
        self.calls += 1;
        if self.calls == 1 {
            let origin = tree::principal_path_origin(a, self.root);
            self.last = Some(origin);
            return Some(origin);
        }

        // Refill: open the team of the previous output and enqueue the
        // superordinate of its smallest member.
        if let Some(prev) = self.last.take() {
            if let Some(team_root) = team_root_of_leaf(a, prev) {
                let child = self
                    .children
                    .entry(team_root)
                    .or_insert_with(|| Box::new(PsortIter::new(team_root)));
                if let Some(first) = child.nxt(a, m) {
                    let up = a.node(first).cross.expect("team leaf has an upp link");
                    self.queue.insert(a.node(first).key, up, m);
                }
            }
        }

        if self.capture {
            self.captured = Some(self.queue.payloads().copied().collect());
        }

        let (_, x) = self.queue.delete_min(m)?;

        // The popped superordinate's subordinate heads the next output's
        // principal path.
        let sub = tree::subordinate(a, x).expect("queued nodes are internal");
        let out = tree::principal_path_origin(a, sub);

        // Advance the popped node's own team iterator and enqueue the
        // superordinate of what it yields.
        let x_team = tree::tree_root(a, a.node(x).cross.expect("internal node has a down link"));
        let child = self
            .children
            .get_mut(&x_team)
            .expect("popped node's team iterator was created when its path opened");
        if let Some(next) = child.nxt(a, m) {
            let up = a.node(next).cross.expect("team leaf has an upp link");
            self.queue.insert(a.node(next).key, up, m);
        }

        self.last = Some(out);
        Some(out)
    }
}

/// Team tree root of the principal path of leaf `u`, if the path has
/// internal nodes.
pub(crate) fn team_root_of_leaf(a: &Arena, u: NodeId) -> Option<NodeId> {
    let p = a.node(u).parent?;
    if a.node(p).key != a.node(u).key {
        return None;
    }
    Some(tree::tree_root(a, a.node(p).cross.expect("internal node has a down link")))
}

/// The `min(k, n)` smallest elements, ascending: create an iterator, call
/// it `k` times, discard it. Read-only.
pub fn psort(a: &Arena, t: &Tree, k: usize, m: &mut Metrics) -> Result<Vec<(ElementId, i64)>, Error> {
    let root = t.root.ok_or(Error::EmptyList)?;
    let mut it = PsortIter::new(root);
    let out = psort_with(&mut it, a, t, k, m);
    Ok(out)
}

pub(crate) fn psort_with(
    it: &mut PsortIter,
    a: &Arena,
    t: &Tree,
    k: usize,
    m: &mut Metrics,
) -> Vec<(ElementId, i64)> {
    let mut out = Vec::with_capacity(k.min(t.leaf_count));
    for _ in 0..k {
        match it.nxt(a, m) {
            Some(leaf) => {
                let key = a.node(leaf).key;
                out.push((key.tiebreak, key.value));
            }
            None => break,
        }
    }
    out
}

/// Brute-force candidate set: scan the principal paths of the output leaves
/// and keep each node whose subordinate-key comparisons against its path
/// agree exactly with superordinate membership. Test oracle for the queue
/// invariant; independent of the iterator.
pub fn candidate_set_bruteforce(a: &Arena, outputs: &[NodeId]) -> std::collections::BTreeSet<NodeId> {
    let mut sup_set = std::collections::BTreeSet::new();
    for &u in outputs {
        let top = tree::path_top(a, u);
        if let Some(p) = a.node(top).parent {
            sup_set.insert(p);
        }
    }

    let mut candidates = std::collections::BTreeSet::new();
    for &u in outputs {
        let key = a.node(u).key;
        let mut path_internals = Vec::new();
        let mut v = a.node(u).parent;
        while let Some(x) = v {
            if a.node(x).key != key {
                break;
            }
            path_internals.push(x);
            v = a.node(x).parent;
        }
        for &v in &path_internals {
            let kv = a.node(tree::subordinate(a, v).expect("internal")).key;
            let agrees = path_internals.iter().all(|&w| {
                let kw = a.node(tree::subordinate(a, w).expect("internal")).key;
                (kw < kv) == sup_set.contains(&w)
            });
            if agrees {
                candidates.insert(v);
            }
        }
    }
    candidates
}

/// Largest queue length across an iterator and all its descendants.
pub fn deepest_queue_len(it: &PsortIter) -> usize {
    it.largest_queue()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltt;

    fn ltt_of(a: &mut Arena, values: &[i64]) -> Tree {
        let items: Vec<(ElementId, i64)> = values
            .iter()
            .enumerate()
            .map(|(i, v)| (ElementId(i as u64), *v))
            .collect();
        ltt::build(a, &items).unwrap()
    }

    fn leaf_with_value(a: &Arena, t: &Tree, value: i64) -> NodeId {
        tree::leaves(a, t.root.unwrap())
            .into_iter()
            .find(|&l| a.node(l).key.value == value)
            .unwrap()
    }

    #[test]
    fn fresh_iterator_starts_empty_and_yields_the_root_origin() {
        let mut a = Arena::new();
        let t = ltt_of(&mut a, &[3, 9, 5, 7, 8, 4, 6]);
        let mut m = Metrics::new();
        let mut it = PsortIter::new(t.root.unwrap());
        assert_eq!(it.queue_len(), 0);
        let first = it.nxt(&a, &mut m).unwrap();
        assert_eq!(a.node(first).key.value, 3);
    }

    #[test]
    fn singleton_iterator_exhausts_after_one() {
        let mut a = Arena::new();
        let t = ltt_of(&mut a, &[5]);
        let mut m = Metrics::new();
        let mut it = PsortIter::new(t.root.unwrap());
        assert_eq!(a.node(it.nxt(&a, &mut m).unwrap()).key.value, 5);
        assert_eq!(it.nxt(&a, &mut m), None);
        assert_eq!(it.nxt(&a, &mut m), None);
    }

    #[test]
    fn fixture_first_three_calls() {
        let mut a = Arena::new();
        let t = ltt_of(&mut a, &[3, 9, 5, 7, 8, 4, 6]);
        let mut m = Metrics::new();
        let mut it = PsortIter::new(t.root.unwrap());
        let got: Vec<i64> = (0..3)
            .map(|_| a.node(it.nxt(&a, &mut m).unwrap()).key.value)
            .collect();
        assert_eq!(got, vec![3, 4, 5]);
    }

    #[test]
    fn full_enumeration_matches_sorted_order() {
        let mut a = Arena::new();
        let values = [31i64, 4, 159, 26, 53, 58, 97, 93, 23, 84, 62, 64, 33, 83, 27, 95];
        let t = ltt_of(&mut a, &values);
        let mut m = Metrics::new();
        let mut it = PsortIter::new(t.root.unwrap());
        let mut got = Vec::new();
        while let Some(leaf) = it.nxt(&a, &mut m) {
            got.push(a.node(leaf).key.value);
        }
        let mut expected = values.to_vec();
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn psort_prefixes_and_overlong_k() {
        let mut a = Arena::new();
        let t = ltt_of(&mut a, &[3, 9, 5, 7, 8, 4, 6]);
        let mut m = Metrics::new();
        let vals = |out: Vec<(ElementId, i64)>| out.into_iter().map(|(_, v)| v).collect::<Vec<_>>();
        assert_eq!(vals(psort(&a, &t, 3, &mut m).unwrap()), vec![3, 4, 5]);
        assert_eq!(
            vals(psort(&a, &t, 7, &mut m).unwrap()),
            vec![3, 4, 5, 6, 7, 8, 9]
        );
        assert_eq!(
            vals(psort(&a, &t, 99, &mut m).unwrap()),
            vec![3, 4, 5, 6, 7, 8, 9]
        );
    }

    #[test]
    fn candidate_set_after_first_output_is_the_superordinate_of_the_second() {
        let mut a = Arena::new();
        let t = ltt_of(&mut a, &[3, 9, 5, 7, 8, 4, 6]);
        let root = t.root.unwrap();
        let leaf3 = leaf_with_value(&a, &t, 3);

        let can = candidate_set_bruteforce(&a, &[leaf3]);
        // sup(leaf 4): its path tops at the node valued 4 whose parent is
        // the root; the root is the only candidate after one output.
        assert_eq!(can.len(), 1);
        assert!(can.contains(&root));

        // After all outputs the candidate set is empty.
        let all = tree::leaves(&a, root);
        assert!(candidate_set_bruteforce(&a, &all).is_empty());
    }

    #[test]
    fn queue_matches_candidates_at_every_step() {
        let mut a = Arena::new();
        let values = [41i64, 12, 93, 7, 55, 68, 21, 80, 3, 36, 47, 14, 29];
        let t = ltt_of(&mut a, &values);
        let mut m = Metrics::new();
        let mut it = PsortIter::new(t.root.unwrap());
        it.enable_capture();
        let mut outputs = Vec::new();
        for _ in 0..values.len() + 2 {
            let before = outputs.clone();
            let out = it.nxt(&a, &mut m);
            if let Some(snapshot) = it.captured_queue() {
                let queue: std::collections::BTreeSet<NodeId> =
                    snapshot.iter().copied().collect();
                assert_eq!(queue, candidate_set_bruteforce(&a, &before));
            }
            match out {
                Some(leaf) => outputs.push(leaf),
                None => break,
            }
        }
        assert_eq!(outputs.len(), values.len());
    }

    #[test]
    fn queue_and_team_call_budgets() {
        let mut a = Arena::new();
        let values: Vec<i64> = (0..128).map(|i| (i * 37) % 1009).collect();
        let t = ltt_of(&mut a, &values);
        for k in [1usize, 2, 8, 32] {
            let mut m = Metrics::new();
            let mut it = PsortIter::new(t.root.unwrap());
            for _ in 0..k {
                it.nxt(&a, &mut m);
            }
            assert!(
                deepest_queue_len(&it) <= 2 * k,
                "queue exceeded 2k at k={k}"
            );
            // Bootstrap calls excluded, any single team sees at most k-1.
            assert!(it.max_descendant_calls() <= k as u64, "team calls at k={k}");
        }
    }

    #[test]
    fn psort_errors_on_empty() {
        let a = Arena::new();
        let mut m = Metrics::new();
        assert!(matches!(
            psort(&a, &Tree::empty(), 1, &mut m),
            Err(Error::EmptyList)
        ));
    }

    #[test]
    fn duplicate_values_enumerate_in_creation_order() {
        let mut a = Arena::new();
        let items = vec![
            (ElementId(0), 5),
            (ElementId(1), 5),
            (ElementId(2), 1),
            (ElementId(3), 5),
        ];
        let t = ltt::build(&mut a, &items).unwrap();
        let mut m = Metrics::new();
        let out = psort(&a, &t, 4, &mut m).unwrap();
        assert_eq!(
            out,
            vec![
                (ElementId(2), 1),
                (ElementId(0), 5),
                (ElementId(1), 5),
                (ElementId(3), 5)
            ]
        );
    }
}
