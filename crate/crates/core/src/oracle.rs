//! Ground-truth engine for differential testing: each list is a plain
//! vector of `(id, value)` pairs, and every operation is direct sequence
//! manipulation. `psort` is additionally recomputed through a second naive
//! route (a priority queue drained and refilled) and the two answers are
//! compared on every call; a disagreement panics, since it would mean the
//! oracle itself is wrong.

use std::collections::BinaryHeap;
use std::collections::HashMap;

use crate::engine::{Engine, EngineKind, ListId};
use crate::error::Error;
use crate::metrics::Metrics;
use crate::tree::ValidationReport;
use crate::types::{ElementId, Key, MIN_SENTINEL};

#[derive(Debug, Clone, Default)]
struct NaiveList {
    elems: Vec<(ElementId, i64)>,
}

pub struct OracleEngine {
    lists: HashMap<ListId, NaiveList>,
    next_list: u64,
    next_elem: u64,
    metrics: Metrics,
}

impl Default for OracleEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl OracleEngine {
    pub fn new() -> Self {
        OracleEngine {
            lists: HashMap::new(),
            next_list: 0,
            next_elem: 0,
            metrics: Metrics::new(),
        }
    }

    fn list(&self, id: ListId) -> Result<&NaiveList, Error> {
        self.lists.get(&id).ok_or(Error::UnknownList(id.0))
    }

    fn fresh_list(&mut self, elems: Vec<(ElementId, i64)>) -> ListId {
        let id = ListId(self.next_list);
        self.next_list += 1;
        self.lists.insert(id, NaiveList { elems });
        id
    }

    /// Full sort by `(value, id)`, prefix of length `min(k, n)`.
    fn psort_by_sort(list: &NaiveList, k: usize) -> Vec<(ElementId, i64)> {
        let mut sorted: Vec<(ElementId, i64)> = list.elems.clone();
        sorted.sort_by_key(|(id, v)| Key::new(*v, *id));
        sorted.truncate(k.min(list.elems.len()));
        sorted
    }

    /// Same answer through a min-priority queue: pop the minimum `min(k, n)`
    /// times (re-inserting afterwards is moot on a scratch copy).
    fn psort_by_queue(list: &NaiveList, k: usize) -> Vec<(ElementId, i64)> {
        let mut heap: BinaryHeap<std::cmp::Reverse<Key>> = list
            .elems
            .iter()
            .map(|(id, v)| std::cmp::Reverse(Key::new(*v, *id)))
            .collect();
        let mut out = Vec::new();
        for _ in 0..k {
            let Some(std::cmp::Reverse(key)) = heap.pop() else {
                break;
            };
            out.push((key.tiebreak, key.value));
        }
        out
    }
}

impl Engine for OracleEngine {
    fn kind(&self) -> EngineKind {
        EngineKind::Oracle
    }

    fn new_list(&mut self, values: &[i64]) -> Result<ListId, Error> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(v) = values.iter().find(|v| **v == MIN_SENTINEL) {
            return Err(Error::SentinelValue(*v));
        }
        let elems: Vec<(ElementId, i64)> = values
            .iter()
            .map(|v| {
                let id = ElementId(self.next_elem);
                self.next_elem += 1;
                (id, *v)
            })
            .collect();
        Ok(self.fresh_list(elems))
    }

    fn psort(&mut self, list: ListId, k: usize) -> Result<Vec<(ElementId, i64)>, Error> {
        let l = self.list(list)?;
        if l.elems.is_empty() {
            return Err(Error::EmptyList);
        }
        let by_sort = Self::psort_by_sort(l, k);
        let by_queue = Self::psort_by_queue(l, k);
        assert_eq!(by_sort, by_queue, "oracle cross-check diverged");
        Ok(by_sort)
    }

    fn changeval(&mut self, list: ListId, elem: ElementId, value: i64) -> Result<(), Error> {
        if value == MIN_SENTINEL {
            return Err(Error::SentinelValue(value));
        }
        if !self.lists.contains_key(&list) {
            return Err(Error::UnknownList(list.0));
        }
        let l = self.lists.get_mut(&list).unwrap();
        let slot = l
            .elems
            .iter_mut()
            .find(|(id, _)| *id == elem)
            .ok_or(Error::UnknownElement(elem))?;
        slot.1 = value;
        Ok(())
    }

    fn link(&mut self, a: ListId, b: ListId) -> Result<ListId, Error> {
        if a == b {
            return Err(Error::UnknownList(b.0));
        }
        if !self.lists.contains_key(&a) {
            return Err(Error::UnknownList(a.0));
        }
        if !self.lists.contains_key(&b) {
            return Err(Error::UnknownList(b.0));
        }
        let mut first = self.lists.remove(&a).unwrap();
        let second = self.lists.remove(&b).unwrap();
        first.elems.extend(second.elems);
        Ok(self.fresh_list(first.elems))
    }

    fn cut(&mut self, list: ListId, elem: ElementId) -> Result<(ListId, ListId), Error> {
        let l = self.list(list)?;
        let pos = l
            .elems
            .iter()
            .position(|(id, _)| *id == elem)
            .ok_or(Error::UnknownElement(elem))?;
        let mut head = self.lists.remove(&list).unwrap();
        let tail = head.elems.split_off(pos + 1);
        let first = self.fresh_list(head.elems);
        let second = self.fresh_list(tail);
        Ok((first, second))
    }

    fn elements(&self, list: ListId) -> Result<Vec<(ElementId, i64)>, Error> {
        Ok(self.list(list)?.elems.clone())
    }

    fn list_len(&self, list: ListId) -> Result<usize, Error> {
        Ok(self.list(list)?.elems.len())
    }

    fn validate(&self, list: ListId) -> Result<ValidationReport, Error> {
        let l = self.list(list)?;
        let mut report = ValidationReport::default();
        let mut ids: Vec<ElementId> = l.elems.iter().map(|(id, _)| *id).collect();
        ids.sort();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            report.push(None, "id_uniqueness", "duplicate element id".into());
        }
        Ok(report)
    }

    fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    fn metrics_mut(&mut self) -> &mut Metrics {
        &mut self.metrics
    }
}
