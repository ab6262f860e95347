//! Trace execution, differential fuzzing and counter benchmarks over the
//! three engines.

pub mod bench;
pub mod fuzz;
pub mod trace;

pub use bench::{bench, BenchConfig, BenchRow, CSV_HEADER};
pub use fuzz::{fuzz, generate_trace, FuzzConfig, FuzzReport};
pub use trace::{parse_trace, run_trace, trace_to_string, HarnessError, OpReport, RunReport, TraceOp};
