use std::collections::HashMap;

use crate::arena::{Arena, NodeId};
use crate::engine::{Engine, EngineKind, ListId};
use crate::error::Error;
use crate::metrics::Metrics;
use crate::tree::{self, Tree, ValidationReport};
use crate::types::ElementId;

use super::query::{self, PsortIter};
use super::update;

/// Layered-tournament-tree engine. Every public update bumps `version`,
/// which invalidates outstanding iterators; the structures themselves never
/// define iteration across mutation.
pub struct LttEngine {
    arena: Arena,
    lists: HashMap<ListId, Tree>,
    index: HashMap<ElementId, NodeId>,
    next_list: u64,
    next_elem: u64,
    version: u64,
    metrics: Metrics,
}

/// An engine-issued iterator: the underlying enumerator plus the engine
/// version it was created against.
pub struct ListIter {
    inner: PsortIter,
    version: u64,
}

impl ListIter {
    pub fn inner(&self) -> &PsortIter {
        &self.inner
    }

    pub fn inner_mut(&mut self) -> &mut PsortIter {
        &mut self.inner
    }
}

impl Default for LttEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl LttEngine {
    pub fn new() -> Self {
        LttEngine {
            arena: Arena::new(),
            lists: HashMap::new(),
            index: HashMap::new(),
            next_list: 0,
            next_elem: 0,
            version: 0,
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

    fn member_leaf(&self, list: ListId, elem: ElementId) -> Result<NodeId, Error> {
        let t = self.tree(list)?;
        let leaf = self.leaf_of(elem)?;
        if t.root != Some(tree::tree_root(&self.arena, leaf)) {
            return Err(Error::UnknownElement(elem));
        }
        Ok(leaf)
    }

    /// Fresh iterator over a list. Invalidated by any subsequent update.
    pub fn make_iterator(&self, list: ListId) -> Result<ListIter, Error> {
        let t = self.tree(list)?;
        let root = t.root.ok_or(Error::EmptyTree)?;
        Ok(ListIter {
            inner: PsortIter::new(root),
            version: self.version,
        })
    }

    /// Advance an iterator. Errors if the engine has been updated since the
    /// iterator was created.
    pub fn iter_next(&mut self, it: &mut ListIter) -> Result<Option<(ElementId, i64)>, Error> {
        if it.version != self.version {
            return Err(Error::Invalidated);
        }
        Ok(it.inner.nxt(&self.arena, &mut self.metrics).map(|leaf| {
            let key = self.arena.node(leaf).key;
            (key.tiebreak, key.value)
        }))
    }

    /// Subordinate values along the principal path of `elem`'s leaf,
    /// topmost first.
    pub fn team_of_element(&self, list: ListId, elem: ElementId) -> Result<Vec<i64>, Error> {
        let leaf = self.member_leaf(list, elem)?;
        super::team_of(&self.arena, leaf)
    }

    pub fn layer_number_of(&self, list: ListId) -> Result<u32, Error> {
        let t = self.tree(list)?;
        Ok(super::layer_number(&self.arena, &t))
    }

    pub fn layer_stats_of(&self, list: ListId) -> Result<Vec<super::LayerStats>, Error> {
        let t = self.tree(list)?;
        Ok(super::layer_stats(&self.arena, &t))
    }
}

impl Engine for LttEngine {
    fn kind(&self) -> EngineKind {
        EngineKind::Ltt
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
        let t = super::build(&mut self.arena, &items)?;
        for &leaf in tree::leaves(&self.arena, t.root.unwrap()).iter() {
            self.index.insert(self.arena.node(leaf).key.tiebreak, leaf);
        }
        Ok(self.fresh_list(t))
    }

    fn psort(&mut self, list: ListId, k: usize) -> Result<Vec<(ElementId, i64)>, Error> {
        let t = self.tree(list)?;
        if t.is_empty() {
            return Err(Error::EmptyList);
        }
        query::psort(&self.arena, &t, k, &mut self.metrics)
    }

    fn changeval(&mut self, list: ListId, elem: ElementId, value: i64) -> Result<(), Error> {
        let leaf = self.member_leaf(list, elem)?;
        let t = self.tree(list)?;
        self.version += 1;
        update::changeval(&mut self.arena, &t, leaf, value, &mut self.metrics)
    }

    fn link(&mut self, a: ListId, b: ListId) -> Result<ListId, Error> {
        if a == b {
            return Err(Error::UnknownList(b.0));
        }
        let ta = self.tree(a)?;
        let tb = self.tree(b)?;
        self.version += 1;
        self.lists.remove(&a);
        self.lists.remove(&b);
        let linked = update::link(&mut self.arena, ta, tb, &mut self.metrics);
        Ok(self.fresh_list(linked))
    }

    fn cut(&mut self, list: ListId, elem: ElementId) -> Result<(ListId, ListId), Error> {
        let leaf = self.member_leaf(list, elem)?;
        let t = self.tree(list)?;
        self.version += 1;
        self.lists.remove(&list);
        let (t1, t2) = update::cut_at(&mut self.arena, t, leaf, &mut self.metrics)?;
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
        Ok(super::validate(&self.arena, &t))
    }

    fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    fn metrics_mut(&mut self) -> &mut Metrics {
        &mut self.metrics
    }
}
