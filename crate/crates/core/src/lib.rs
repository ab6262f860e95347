//! Dynamic partial sorting engines.
//!
//! This crate maintains collections of integer lists under `link`, `cut` and
//! `changeval` updates while answering `psort(l, k)` queries: the `k` smallest
//! values of a list, in increasing order. Three interchangeable engines back
//! the same [`engine::Engine`] interface:
//!
//! * [`tt`] — a single tournament tree per list. Queries cost `O(k log n)`,
//!   updates `O(log n)`.
//! * [`ltt`] — layered tournament trees: each principal path of a tree is
//!   mirrored by a smaller tree one layer down, recursively. Queries cost
//!   `O(log*(n) k log k)`, updates `O(log n (log log n)^2)`.
//! * [`oracle`] — a plain vector kept as ground truth for differential tests.
//!
//! The [`harness`] module executes operation traces against any engine,
//! fuzzes engine pairs differentially, and benchmarks with operation
//! counters. Structural validators live next to each engine.

pub mod arena;
pub mod engine;
pub mod error;
pub mod harness;
pub mod ltt;
pub mod metrics;
pub mod oracle;
pub mod pq;
pub mod tree;
pub mod tt;
pub mod types;

pub use arena::{Arena, Node, NodeId};
pub use engine::{Engine, EngineKind, ListId};
pub use error::Error;
pub use metrics::Metrics;
pub use tree::{Tree, ValidationReport, Violation};
pub use types::{ElementId, Key, MIN_SENTINEL};
