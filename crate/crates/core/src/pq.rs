use crate::metrics::Metrics;
use crate::types::Key;

/// Binary min-heap of `(Key, payload)` entries that reports its comparisons,
/// inserts and deletions to [`Metrics`]. Keys are unique wherever the engines
/// use the queue, so pop order is deterministic.
#[derive(Debug, Clone, Default)]
pub struct MinHeap<T> {
    entries: Vec<(Key, T)>,
}

impl<T: Copy> MinHeap<T> {
    pub fn new() -> Self {
        MinHeap {
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, key: Key, payload: T, m: &mut Metrics) {
        self.entries.push((key, payload));
        m.pq_inserts += 1;
        m.record_pq_len(self.entries.len());
        let mut i = self.entries.len() - 1;
        while i > 0 {
            let p = (i - 1) / 2;
            m.comparisons += 1;
            if self.entries[i].0 < self.entries[p].0 {
                self.entries.swap(i, p);
                i = p;
            } else {
                break;
            }
        }
    }

    pub fn delete_min(&mut self, m: &mut Metrics) -> Option<(Key, T)> {
        if self.entries.is_empty() {
            return None;
        }
        m.pq_deletes += 1;
        let last = self.entries.len() - 1;
        self.entries.swap(0, last);
        let out = self.entries.pop();
        let mut i = 0;
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut min = i;
            if l < self.entries.len() {
                m.comparisons += 1;
                if self.entries[l].0 < self.entries[min].0 {
                    min = l;
                }
            }
            if r < self.entries.len() {
                m.comparisons += 1;
                if self.entries[r].0 < self.entries[min].0 {
                    min = r;
                }
            }
            if min == i {
                break;
            }
            self.entries.swap(i, min);
            i = min;
        }
        out
    }

    /// Current contents, in heap order (not sorted).
    pub fn payloads(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|(_, p)| p)
    }
}
