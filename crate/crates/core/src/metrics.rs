use serde::Serialize;

/// Operation counters. Instrumentation is always compiled in; the harness
/// resets the counters between measured operations and asserts the
/// per-operation cost bounds against them.
///
/// `nodes_visited` doubles as the elementary-step counter of the layered
/// engine's update operations: every node walked, allocated, freed or
/// re-wired during an update increments it once.
#[derive(Debug, Default, Clone, Serialize)]
pub struct Metrics {
    pub comparisons: u64,
    pub pq_inserts: u64,
    pub pq_deletes: u64,
    pub nodes_visited: u64,
    pub rotations: u64,
    pub expose_iterations: u64,
    /// High-water mark over all priority queues since the last reset.
    pub pq_max_len: u64,
    /// Maximum team size observed per layer (`team_size_max[i]` is the
    /// layer-i maximum; layer 0 is the list itself).
    pub team_size_max: Vec<u64>,
    pub wall_time_ns: u128,
}

impl Metrics {
    pub fn new() -> Self {
        Metrics::default()
    }

    pub fn reset(&mut self) {
        *self = Metrics::default();
    }

    pub fn pq_ops(&self) -> u64 {
        self.pq_inserts + self.pq_deletes
    }

    pub(crate) fn record_pq_len(&mut self, len: usize) {
        self.pq_max_len = self.pq_max_len.max(len as u64);
    }

    pub(crate) fn step(&mut self) {
        self.nodes_visited += 1;
    }
}
