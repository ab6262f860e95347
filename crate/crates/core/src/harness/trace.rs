//! Operation traces: one JSON object per line, executed against a chosen
//! engine, optionally shadow-verified against the oracle.
//!
//! Element selectors in traces are *values*, which harness-generated traces
//! keep unique within a list; they are resolved to element ids at execution
//! time.

use serde::{Deserialize, Serialize};

use crate::engine::{Engine, EngineKind, ListId};
use crate::metrics::Metrics;
use crate::oracle::OracleEngine;
use crate::types::ElementId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum TraceOp {
    New {
        list: String,
        values: Vec<i64>,
    },
    Psort {
        list: String,
        k: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        expect: Option<Vec<i64>>,
    },
    Changeval {
        list: String,
        elem: i64,
        value: i64,
    },
    Link {
        a: String,
        b: String,
        out: String,
    },
    Cut {
        list: String,
        elem: i64,
        out: [String; 2],
    },
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum HarnessError {
    #[error("trace error at op {index}: {detail}")]
    Trace { index: usize, detail: String },
    #[error("mismatch at op {index}: {detail}")]
    Mismatch { index: usize, detail: String },
    #[error("trace parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
}

/// Per-operation slice of a run report.
#[derive(Debug, Clone, Serialize)]
pub struct OpReport {
    pub index: usize,
    pub op: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Vec<i64>>,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub engine: &'static str,
    pub verified: bool,
    pub ops: Vec<OpReport>,
}

/// Parse a JSON-lines trace. Blank lines are skipped.
pub fn parse_trace(text: &str) -> Result<Vec<TraceOp>, HarnessError> {
    let mut ops = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let op: TraceOp = serde_json::from_str(line).map_err(|e| HarnessError::Parse {
            line: i + 1,
            detail: e.to_string(),
        })?;
        ops.push(op);
    }
    Ok(ops)
}

pub fn trace_to_string(ops: &[TraceOp]) -> String {
    let mut out = String::new();
    for op in ops {
        out.push_str(&serde_json::to_string(op).expect("trace ops serialize"));
        out.push('\n');
    }
    out
}

/// Executes a trace against one engine, tracking label bindings and
/// resolving value selectors. When `shadow` is set, every operation also
/// runs on it and outputs and final sequences must agree.
struct Executor {
    engine: Box<dyn Engine>,
    shadow: Option<Box<dyn Engine>>,
    labels: Vec<(String, ListId)>,
}

impl Executor {
    fn new(kind: EngineKind, verify: bool) -> Self {
        Executor {
            engine: kind.build(),
            shadow: verify.then(|| Box::new(OracleEngine::new()) as Box<dyn Engine>),
            labels: Vec::new(),
        }
    }

    fn resolve_label(&self, index: usize, label: &str) -> Result<ListId, HarnessError> {
        self.labels
            .iter()
            .rev()
            .find(|(l, _)| l == label)
            .map(|(_, id)| *id)
            .ok_or_else(|| HarnessError::Trace {
                index,
                detail: format!("unknown list label {label:?}"),
            })
    }

    fn bind(&mut self, label: &str, id: ListId) {
        self.labels.retain(|(l, _)| l != label);
        self.labels.push((label.to_string(), id));
    }

    fn unbind(&mut self, label: &str) {
        self.labels.retain(|(l, _)| l != label);
    }

    /// Resolve a value selector to an element id through the primary engine.
    fn resolve_elem(
        &self,
        index: usize,
        list: ListId,
        value: i64,
    ) -> Result<ElementId, HarnessError> {
        let elems = self.engine.elements(list).map_err(|e| HarnessError::Trace {
            index,
            detail: e.to_string(),
        })?;
        let mut hits = elems.iter().filter(|(_, v)| *v == value);
        let hit = hits.next().ok_or_else(|| HarnessError::Trace {
            index,
            detail: format!("no element with value {value}"),
        })?;
        if hits.next().is_some() {
            return Err(HarnessError::Trace {
                index,
                detail: format!("value selector {value} is ambiguous"),
            });
        }
        Ok(hit.0)
    }

    fn trace_err(&self, index: usize, e: impl std::fmt::Display) -> HarnessError {
        HarnessError::Trace {
            index,
            detail: e.to_string(),
        }
    }

    /// Run one op on the primary engine and the shadow, comparing outputs.
    fn step(&mut self, index: usize, op: &TraceOp) -> Result<Option<Vec<i64>>, HarnessError> {
        match op {
            TraceOp::New { list, values } => {
                let id = self
                    .engine
                    .new_list(values)
                    .map_err(|e| self.trace_err(index, e))?;
                if let Some(shadow) = self.shadow.as_mut() {
                    let sid = shadow
                        .new_list(values)
                        .map_err(|e| self.trace_err(index, e))?;
                    debug_assert_eq!(id, sid, "engines must assign ids in lockstep");
                }
                self.bind(list, id);
                Ok(None)
            }
            TraceOp::Psort { list, k, expect } => {
                let id = self.resolve_label(index, list)?;
                let out = self
                    .engine
                    .psort(id, *k)
                    .map_err(|e| self.trace_err(index, e))?;
                if let Some(shadow) = self.shadow.as_mut() {
                    let sout = shadow.psort(id, *k).map_err(|e| self.trace_err(index, e))?;
                    if out != sout {
                        return Err(HarnessError::Mismatch {
                            index,
                            detail: format!("psort disagreed: engine {out:?}, oracle {sout:?}"),
                        });
                    }
                }
                let values: Vec<i64> = out.iter().map(|(_, v)| *v).collect();
                if let Some(expect) = expect {
                    if &values != expect {
                        return Err(HarnessError::Mismatch {
                            index,
                            detail: format!("expected {expect:?}, got {values:?}"),
                        });
                    }
                }
                Ok(Some(values))
            }
            TraceOp::Changeval { list, elem, value } => {
                let id = self.resolve_label(index, list)?;
                let eid = self.resolve_elem(index, id, *elem)?;
                self.engine
                    .changeval(id, eid, *value)
                    .map_err(|e| self.trace_err(index, e))?;
                if let Some(shadow) = self.shadow.as_mut() {
                    shadow
                        .changeval(id, eid, *value)
                        .map_err(|e| self.trace_err(index, e))?;
                }
                self.compare_sequences(index, &[id])?;
                Ok(None)
            }
            TraceOp::Link { a, b, out } => {
                let ia = self.resolve_label(index, a)?;
                let ib = self.resolve_label(index, b)?;
                let id = self
                    .engine
                    .link(ia, ib)
                    .map_err(|e| self.trace_err(index, e))?;
                if let Some(shadow) = self.shadow.as_mut() {
                    let sid = shadow.link(ia, ib).map_err(|e| self.trace_err(index, e))?;
                    debug_assert_eq!(id, sid);
                }
                self.unbind(a);
                self.unbind(b);
                self.bind(out, id);
                self.compare_sequences(index, &[id])?;
                Ok(None)
            }
            TraceOp::Cut { list, elem, out } => {
                let id = self.resolve_label(index, list)?;
                let eid = self.resolve_elem(index, id, *elem)?;
                let (x, y) = self
                    .engine
                    .cut(id, eid)
                    .map_err(|e| self.trace_err(index, e))?;
                if let Some(shadow) = self.shadow.as_mut() {
                    let (sx, sy) = shadow.cut(id, eid).map_err(|e| self.trace_err(index, e))?;
                    debug_assert_eq!((x, y), (sx, sy));
                }
                self.unbind(list);
                self.bind(&out[0], x);
                self.bind(&out[1], y);
                self.compare_sequences(index, &[x, y])?;
                Ok(None)
            }
        }
    }

    fn compare_sequences(&self, index: usize, lists: &[ListId]) -> Result<(), HarnessError> {
        let Some(shadow) = self.shadow.as_ref() else {
            return Ok(());
        };
        for &id in lists {
            let ours = self
                .engine
                .elements(id)
                .map_err(|e| self.trace_err(index, e))?;
            let theirs = shadow
                .elements(id)
                .map_err(|e| self.trace_err(index, e))?;
            if ours != theirs {
                return Err(HarnessError::Mismatch {
                    index,
                    detail: format!(
                        "list {id:?} diverged: engine {ours:?}, oracle {theirs:?}"
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Execute `ops` in order on the chosen engine. With `verify`, every
/// operation is shadow-executed on the oracle and compared. The report
/// carries per-op outputs and metrics.
pub fn run_trace(
    ops: &[TraceOp],
    kind: EngineKind,
    verify: bool,
) -> Result<RunReport, HarnessError> {
    let mut exec = Executor::new(kind, verify);
    let mut reports = Vec::with_capacity(ops.len());
    for (index, op) in ops.iter().enumerate() {
        exec.engine.reset_metrics();
        let output = exec.step(index, op)?;
        reports.push(OpReport {
            index,
            op: op_name(op).to_string(),
            output,
            metrics: exec.engine.metrics().clone(),
        });
    }
    Ok(RunReport {
        engine: kind.name(),
        verified: verify,
        ops: reports,
    })
}

fn op_name(op: &TraceOp) -> &'static str {
    match op {
        TraceOp::New { .. } => "new",
        TraceOp::Psort { .. } => "psort",
        TraceOp::Changeval { .. } => "changeval",
        TraceOp::Link { .. } => "link",
        TraceOp::Cut { .. } => "cut",
    }
}
