//! Shared setup for the criterion benches: engines preloaded with seeded
//! random lists.

use dps_core::engine::{Engine, EngineKind, ListId};
use dps_core::harness::bench::random_values;

pub struct Prepared {
    pub engine: Box<dyn Engine>,
    pub list: ListId,
    pub n: usize,
}

pub fn prepare(kind: EngineKind, n: usize, seed: u64) -> Prepared {
    let mut engine = kind.build();
    let list = engine
        .new_list(&random_values(seed, n))
        .expect("non-empty benchmark list");
    Prepared { engine, list, n }
}
