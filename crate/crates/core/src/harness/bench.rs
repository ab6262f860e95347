//! Counter benchmarks: for each (n, k) grid point, build a seeded random
//! list and measure psort, changeval, cut and link with full metrics,
//! emitting one CSV row per (op, n, k, repeat).

use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};
use serde::Serialize;

use crate::engine::EngineKind;
use crate::metrics::Metrics;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub ks: Vec<usize>,
    pub engine: EngineKind,
    pub repeats: usize,
    pub seed: u64,
}

pub const CSV_HEADER: &str = "op,engine,n,k,repeat,comparisons,pq_inserts,pq_deletes,nodes_visited,rotations,expose_iterations,wall_time_ns";

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub op: &'static str,
    pub engine: &'static str,
    pub n: usize,
    pub k: usize,
    pub repeat: usize,
    pub comparisons: u64,
    pub pq_inserts: u64,
    pub pq_deletes: u64,
    pub nodes_visited: u64,
    pub rotations: u64,
    pub expose_iterations: u64,
    pub wall_time_ns: u128,
}

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.op,
            self.engine,
            self.n,
            self.k,
            self.repeat,
            self.comparisons,
            self.pq_inserts,
            self.pq_deletes,
            self.nodes_visited,
            self.rotations,
            self.expose_iterations,
            self.wall_time_ns
        )
    }

    fn from_metrics(
        op: &'static str,
        engine: EngineKind,
        n: usize,
        k: usize,
        repeat: usize,
        m: &Metrics,
        wall_time_ns: u128,
    ) -> Self {
        BenchRow {
            op,
            engine: engine.name(),
            n,
            k,
            repeat,
            comparisons: m.comparisons,
            pq_inserts: m.pq_inserts,
            pq_deletes: m.pq_deletes,
            nodes_visited: m.nodes_visited,
            rotations: m.rotations,
            expose_iterations: m.expose_iterations,
            wall_time_ns,
        }
    }
}

/// Seeded random permutation of `0..n`, scaled to spread values out.
pub fn random_values(seed: u64, n: usize) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<i64> = (0..n as i64).map(|v| v * 8).collect();
    for i in (1..values.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        values.swap(i, j);
    }
    values
}

pub fn bench(cfg: &BenchConfig) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        for &k in &cfg.ks {
            for repeat in 0..cfg.repeats {
                let seed = cfg
                    .seed
                    .wrapping_add((n as u64) << 32)
                    .wrapping_add((k as u64) << 16)
                    .wrapping_add(repeat as u64);
                rows.extend(bench_point(cfg.engine, n, k, repeat, seed));
            }
        }
    }
    rows
}

fn bench_point(
    kind: EngineKind,
    n: usize,
    k: usize,
    repeat: usize,
    seed: u64,
) -> Vec<BenchRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let mut engine = kind.build();
    let list = engine
        .new_list(&random_values(seed, n))
        .expect("non-empty benchmark list");
    let mut rows = Vec::with_capacity(4);

    engine.reset_metrics();
    let t0 = Instant::now();
    engine.psort(list, k).expect("psort");
    let dt = t0.elapsed().as_nanos();
    rows.push(BenchRow::from_metrics(
        "psort",
        kind,
        n,
        k,
        repeat,
        engine.metrics(),
        dt,
    ));

    // changeval of a random element to a fresh value outside 8*(0..n)
    let elems = engine.elements(list).expect("list exists");
    let target = elems[(rng.next_u64() % n as u64) as usize].0;
    let fresh = 8 * n as i64 + 1 + (rng.next_u64() % 1000) as i64;
    engine.reset_metrics();
    let t0 = Instant::now();
    engine.changeval(list, target, fresh).expect("changeval");
    let dt = t0.elapsed().as_nanos();
    rows.push(BenchRow::from_metrics(
        "changeval",
        kind,
        n,
        k,
        repeat,
        engine.metrics(),
        dt,
    ));

    let at = elems[(rng.next_u64() % n as u64) as usize].0;
    engine.reset_metrics();
    let t0 = Instant::now();
    let (a, b) = engine.cut(list, at).expect("cut");
    let dt = t0.elapsed().as_nanos();
    rows.push(BenchRow::from_metrics(
        "cut",
        kind,
        n,
        k,
        repeat,
        engine.metrics(),
        dt,
    ));

    engine.reset_metrics();
    let t0 = Instant::now();
    engine.link(a, b).expect("link");
    let dt = t0.elapsed().as_nanos();
    rows.push(BenchRow::from_metrics(
        "link",
        kind,
        n,
        k,
        repeat,
        engine.metrics(),
        dt,
    ));

    rows
}
