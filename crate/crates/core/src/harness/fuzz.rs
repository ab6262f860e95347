//! Deterministic differential fuzzing.
//!
//! A seeded generator produces a valid operation trace against a model of
//! the list pool (sizes and values only), keeping values globally unique so
//! traces can address elements by value. The trace then runs on a pair of
//! engines in lockstep; psort outputs, post-update sequences, validator
//! verdicts and counter budgets must all agree. On a mismatch the trace is
//! truncated at the failing op and greedily shrunk to a minimal reproducer.

use std::collections::HashSet;

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};
use serde::Serialize;

use super::trace::{trace_to_string, TraceOp};
use crate::engine::{Engine, EngineKind, ListId};
use crate::ltt::{iterated_log, GOLDEN_RATIO};
use crate::metrics::Metrics;
use crate::types::ElementId;

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub seed: u64,
    pub ops: usize,
    pub max_size: usize,
    pub pair: (EngineKind, EngineKind),
    pub shrink: bool,
    /// Run the structural validators on touched lists every n-th update
    /// (1 = every update, 0 = never).
    pub validate_every: usize,
}

impl FuzzConfig {
    pub fn new(seed: u64, ops: usize, max_size: usize, pair: (EngineKind, EngineKind)) -> Self {
        FuzzConfig {
            seed,
            ops,
            max_size,
            pair,
            shrink: true,
            validate_every: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FuzzMismatch {
    pub op_index: usize,
    pub detail: String,
    /// JSON-lines rendering of the trace up to and including the failure.
    pub trace: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimized: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimized_ops: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub ops: usize,
    pub max_size: usize,
    pub pair: [String; 2],
    pub executed_ops: usize,
    pub mismatch: Option<FuzzMismatch>,
}

impl FuzzReport {
    pub fn clean(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Model list used only for generation.
struct GenList {
    label: String,
    values: Vec<i64>,
}

struct Generator {
    rng: ChaCha8Rng,
    lists: Vec<GenList>,
    used_values: HashSet<i64>,
    next_label: usize,
    max_size: usize,
}

impl Generator {
    fn new(seed: u64, max_size: usize) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            lists: Vec::new(),
            used_values: HashSet::new(),
            next_label: 0,
            max_size: max_size.max(1),
        }
    }

    fn pick(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.rng.next_u64() % n as u64) as usize
    }

    fn fresh_value(&mut self) -> i64 {
        loop {
            let v = (self.rng.next_u64() % (1 << 40)) as i64;
            if self.used_values.insert(v) {
                return v;
            }
        }
    }

    fn fresh_label(&mut self) -> String {
        let label = format!("L{}", self.next_label);
        self.next_label += 1;
        label
    }

    fn nonempty(&self) -> Vec<usize> {
        (0..self.lists.len())
            .filter(|&i| !self.lists[i].values.is_empty())
            .collect()
    }

    fn gen_new(&mut self) -> TraceOp {
        let size = 1 + self.pick(self.max_size.div_ceil(4));
        let values: Vec<i64> = (0..size).map(|_| self.fresh_value()).collect();
        let label = self.fresh_label();
        self.lists.push(GenList {
            label: label.clone(),
            values: values.clone(),
        });
        TraceOp::New {
            list: label,
            values,
        }
    }

    fn gen_op(&mut self) -> TraceOp {
        let roll = self.rng.next_u64() % 100;
        let nonempty = self.nonempty();
        // Keep a couple of lists alive so link and cut stay reachable.
        if self.lists.len() < 2 || nonempty.is_empty() {
            return self.gen_new();
        }
        if roll < 40 {
            // psort, k drawn from [1, 2 * size] to exercise the k > n branch
            let li = nonempty[self.pick(nonempty.len())];
            let n = self.lists[li].values.len();
            let k = 1 + self.pick(2 * n);
            TraceOp::Psort {
                list: self.lists[li].label.clone(),
                k,
                expect: None,
            }
        } else if roll < 70 {
            let li = nonempty[self.pick(nonempty.len())];
            let pos = self.pick(self.lists[li].values.len());
            let old = self.lists[li].values[pos];
            let new = self.fresh_value();
            self.lists[li].values[pos] = new;
            TraceOp::Changeval {
                list: self.lists[li].label.clone(),
                elem: old,
                value: new,
            }
        } else if roll < 85 {
            // link: any ordered pair whose combined size fits
            let mut tries = 0;
            loop {
                tries += 1;
                if tries > 8 {
                    return self.gen_new();
                }
                let ia = self.pick(self.lists.len());
                let ib = self.pick(self.lists.len());
                if ia == ib {
                    continue;
                }
                if self.lists[ia].values.len() + self.lists[ib].values.len() > self.max_size {
                    continue;
                }
                let out = self.fresh_label();
                let (first, second) = (ia.min(ib), ia.max(ib));
                let b_list = self.lists.remove(second);
                let a_list = self.lists.remove(first);
                let (a_list, b_list) = if first == ia {
                    (a_list, b_list)
                } else {
                    (b_list, a_list)
                };
                let mut values = a_list.values;
                values.extend(b_list.values);
                self.lists.push(GenList {
                    label: out.clone(),
                    values,
                });
                return TraceOp::Link {
                    a: a_list.label,
                    b: b_list.label,
                    out,
                };
            }
        } else {
            let li = nonempty[self.pick(nonempty.len())];
            let pos = self.pick(self.lists[li].values.len());
            let at = self.lists[li].values[pos];
            let list = self.lists.remove(li);
            let head = list.values[..=pos].to_vec();
            let tail = list.values[pos + 1..].to_vec();
            let out0 = self.fresh_label();
            let out1 = self.fresh_label();
            self.lists.push(GenList {
                label: out0.clone(),
                values: head,
            });
            self.lists.push(GenList {
                label: out1.clone(),
                values: tail,
            });
            TraceOp::Cut {
                list: list.label,
                elem: at,
                out: [out0, out1],
            }
        }
    }
}

/// Deterministically generate a valid trace: 40% psort, 30% changeval,
/// 15% link, 15% cut, with `new` interleaved to keep the pool workable.
pub fn generate_trace(seed: u64, ops: usize, max_size: usize) -> Vec<TraceOp> {
    let mut generator = Generator::new(seed, max_size);
    (0..ops).map(|_| generator.gen_op()).collect()
}

pub(crate) enum ExecOutcome {
    Clean,
    Mismatch { op_index: usize, detail: String },
    /// The trace itself is unexecutable (dangling label or selector); used
    /// to reject shrink candidates, never expected from generated traces.
    Invalid { op_index: usize, detail: String },
}

type EngineFactory<'a> = &'a dyn Fn() -> Box<dyn Engine>;

struct Lockstep<'a> {
    a: Box<dyn Engine>,
    b: Box<dyn Engine>,
    labels: Vec<(&'a str, ListId)>,
    validate_every: usize,
    updates_seen: usize,
}

impl<'a> Lockstep<'a> {
    fn resolve_label(&self, label: &str) -> Option<ListId> {
        self.labels
            .iter()
            .rev()
            .find(|(l, _)| *l == label)
            .map(|(_, id)| *id)
    }

    fn bind(&mut self, label: &'a str, id: ListId) {
        self.labels.retain(|(l, _)| *l != label);
        self.labels.push((label, id));
    }

    fn unbind(&mut self, label: &str) {
        self.labels.retain(|(l, _)| *l != label);
    }

    fn resolve_elem(&self, list: ListId, value: i64) -> Result<ElementId, String> {
        let elems = self.a.elements(list).map_err(|e| e.to_string())?;
        elems
            .iter()
            .find(|(_, v)| *v == value)
            .map(|(id, _)| *id)
            .ok_or_else(|| format!("no element with value {value}"))
    }

    fn maybe_validate(&mut self, lists: &[ListId]) -> Result<(), String> {
        if self.validate_every == 0 {
            return Ok(());
        }
        self.updates_seen += 1;
        if self.updates_seen % self.validate_every != 0 {
            return Ok(());
        }
        for &id in lists {
            for engine in [&self.a, &self.b] {
                let report = engine.validate(id).map_err(|e| e.to_string())?;
                if !report.ok() {
                    return Err(format!(
                        "{} validator: {:?}",
                        engine.kind().name(),
                        report.violations.first().map(|v| (v.rule, v.detail.clone()))
                    ));
                }
            }
        }
        Ok(())
    }

    fn compare_lists(&self, lists: &[ListId]) -> Result<(), String> {
        for &id in lists {
            let ours = self.a.elements(id).map_err(|e| e.to_string())?;
            let theirs = self.b.elements(id).map_err(|e| e.to_string())?;
            if ours != theirs {
                return Err(format!(
                    "list {id:?} diverged: {} has {ours:?}, {} has {theirs:?}",
                    self.a.kind().name(),
                    self.b.kind().name()
                ));
            }
        }
        Ok(())
    }
}

/// Per-operation counter budgets, asserted on both engines during fuzzing.
fn counter_violation(
    kind: EngineKind,
    op: &TraceOp,
    n_before: usize,
    m: &Metrics,
) -> Option<String> {
    let log_phi_n = |n: usize| (n.max(1) as f64).ln() / GOLDEN_RATIO.ln();
    match (kind, op) {
        (EngineKind::Tt, TraceOp::Psort { k, .. }) => {
            let budget = (*k as u64) * (log_phi_n(n_before).ceil() as u64 + 1);
            (m.pq_inserts > budget)
                .then(|| format!("tt psort inserts {} > {budget}", m.pq_inserts))
        }
        (EngineKind::Tt, TraceOp::Changeval { .. }) => {
            let budget = log_phi_n(n_before).ceil() as u64 + 1;
            (m.nodes_visited > budget)
                .then(|| format!("tt changeval visits {} > {budget}", m.nodes_visited))
        }
        (EngineKind::Tt, TraceOp::Link { .. }) => {
            // one rebalancing event; a double rotation counts two primitives
            (m.rotations > 2).then(|| format!("tt link rotations {} > 2", m.rotations))
        }
        (EngineKind::Ltt, TraceOp::Psort { k, .. }) => {
            let stars = iterated_log(GOLDEN_RATIO, n_before.max(1) as f64).expect("phi > 1");
            let budget = 8 * u64::from(stars) * (*k as u64);
            (m.pq_ops() > budget).then(|| format!("ltt psort queue ops {} > {budget}", m.pq_ops()))
        }
        (EngineKind::Ltt, TraceOp::Changeval { .. }) => {
            let budget = ltt_changeval_step_budget(n_before);
            (m.nodes_visited > budget)
                .then(|| format!("ltt changeval steps {} > {budget}", m.nodes_visited))
        }
        _ => None,
    }
}

/// Committed constants for the layered update budgets; calibrated once over
/// the benchmark grid and the fuzz size range, then frozen. A failure
/// against these budgets is a regression. The link constant is larger
/// because a link pays for its rebalancing rotation and the team split at
/// the splice point regardless of the height difference.
pub const LTT_STEP_FACTOR: u64 = 128;
pub const LTT_LINK_STEP_FACTOR: u64 = 512;

/// Elementary-step budget of a layered changeval on a list of n elements.
pub fn ltt_changeval_step_budget(n: usize) -> u64 {
    let n = n.max(4) as f64;
    let loglog = n.log2().log2();
    (LTT_STEP_FACTOR as f64 * n.log2() * loglog * loglog).ceil() as u64
}

/// Elementary-step budget of linking layered lists whose layer-0 heights
/// differ by `height_diff`, with n total elements.
pub fn ltt_link_step_budget(height_diff: u32, n: usize) -> u64 {
    let n = n.max(4) as f64;
    let loglog = n.log2().log2();
    (LTT_LINK_STEP_FACTOR as f64 * f64::from(height_diff.max(1)) * loglog * loglog).ceil() as u64
}

pub(crate) fn diff_execute(
    ops: &[TraceOp],
    make_a: EngineFactory,
    make_b: EngineFactory,
    validate_every: usize,
) -> ExecOutcome {
    let mut state = Lockstep {
        a: make_a(),
        b: make_b(),
        labels: Vec::new(),
        validate_every,
        updates_seen: 0,
    };

    for (op_index, op) in ops.iter().enumerate() {
        let invalid = |detail: String| ExecOutcome::Invalid { op_index, detail };
        let mismatch = |detail: String| ExecOutcome::Mismatch { op_index, detail };
        state.a.reset_metrics();
        state.b.reset_metrics();

        match op {
            TraceOp::New { list, values } => {
                let ra = state.a.new_list(values);
                let rb = state.b.new_list(values);
                match (ra, rb) {
                    (Ok(ia), Ok(ib)) => {
                        if ia != ib {
                            return mismatch(format!("list ids diverged: {ia:?} vs {ib:?}"));
                        }
                        state.bind(list, ia);
                    }
                    (Err(ea), Err(eb)) if ea == eb => return invalid(ea.to_string()),
                    (ra, rb) => {
                        return mismatch(format!("new disagreed: {ra:?} vs {rb:?}"));
                    }
                }
            }
            TraceOp::Psort { list, k, expect } => {
                let Some(id) = state.resolve_label(list) else {
                    return invalid(format!("unknown label {list:?}"));
                };
                let n_before = state.a.list_len(id).unwrap_or(0);
                let ra = state.a.psort(id, *k);
                let rb = state.b.psort(id, *k);
                match (ra, rb) {
                    (Ok(oa), Ok(ob)) => {
                        if oa != ob {
                            return mismatch(format!("psort k={k}: {oa:?} vs {ob:?}"));
                        }
                        if let Some(exp) = expect {
                            let values: Vec<i64> = oa.iter().map(|(_, v)| *v).collect();
                            if &values != exp {
                                return mismatch(format!("psort expected {exp:?}, got {values:?}"));
                            }
                        }
                        for engine in [&state.a, &state.b] {
                            if let Some(detail) =
                                counter_violation(engine.kind(), op, n_before, engine.metrics())
                            {
                                return mismatch(detail);
                            }
                        }
                    }
                    (Err(ea), Err(eb)) if ea == eb => return invalid(ea.to_string()),
                    (ra, rb) => return mismatch(format!("psort disagreed: {ra:?} vs {rb:?}")),
                }
            }
            TraceOp::Changeval { list, elem, value } => {
                let Some(id) = state.resolve_label(list) else {
                    return invalid(format!("unknown label {list:?}"));
                };
                let eid = match state.resolve_elem(id, *elem) {
                    Ok(eid) => eid,
                    Err(detail) => return invalid(detail),
                };
                let n_before = state.a.list_len(id).unwrap_or(0);
                let ra = state.a.changeval(id, eid, *value);
                let rb = state.b.changeval(id, eid, *value);
                match (ra, rb) {
                    (Ok(()), Ok(())) => {
                        for engine in [&state.a, &state.b] {
                            if let Some(detail) =
                                counter_violation(engine.kind(), op, n_before, engine.metrics())
                            {
                                return mismatch(detail);
                            }
                        }
                        if let Err(detail) = state.compare_lists(&[id]) {
                            return mismatch(detail);
                        }
                        if let Err(detail) = state.maybe_validate(&[id]) {
                            return mismatch(detail);
                        }
                    }
                    (Err(ea), Err(eb)) if ea == eb => return invalid(ea.to_string()),
                    (ra, rb) => return mismatch(format!("changeval disagreed: {ra:?} vs {rb:?}")),
                }
            }
            TraceOp::Link { a, b, out } => {
                let (Some(ia), Some(ib)) = (state.resolve_label(a), state.resolve_label(b)) else {
                    return invalid(format!("unknown label in link {a:?} {b:?}"));
                };
                let ra = state.a.link(ia, ib);
                let rb = state.b.link(ia, ib);
                match (ra, rb) {
                    (Ok(oa), Ok(ob)) => {
                        if oa != ob {
                            return mismatch(format!("link ids diverged: {oa:?} vs {ob:?}"));
                        }
                        state.unbind(a);
                        state.unbind(b);
                        state.bind(out, oa);
                        for engine in [&state.a, &state.b] {
                            if let Some(detail) =
                                counter_violation(engine.kind(), op, 0, engine.metrics())
                            {
                                return mismatch(detail);
                            }
                        }
                        if let Err(detail) = state.compare_lists(&[oa]) {
                            return mismatch(detail);
                        }
                        if let Err(detail) = state.maybe_validate(&[oa]) {
                            return mismatch(detail);
                        }
                    }
                    (Err(ea), Err(eb)) if ea == eb => return invalid(ea.to_string()),
                    (ra, rb) => return mismatch(format!("link disagreed: {ra:?} vs {rb:?}")),
                }
            }
            TraceOp::Cut { list, elem, out } => {
                let Some(id) = state.resolve_label(list) else {
                    return invalid(format!("unknown label {list:?}"));
                };
                let eid = match state.resolve_elem(id, *elem) {
                    Ok(eid) => eid,
                    Err(detail) => return invalid(detail),
                };
                let ra = state.a.cut(id, eid);
                let rb = state.b.cut(id, eid);
                match (ra, rb) {
                    (Ok(oa), Ok(ob)) => {
                        if oa != ob {
                            return mismatch(format!("cut ids diverged: {oa:?} vs {ob:?}"));
                        }
                        state.unbind(list);
                        state.bind(&out[0], oa.0);
                        state.bind(&out[1], oa.1);
                        if let Err(detail) = state.compare_lists(&[oa.0, oa.1]) {
                            return mismatch(detail);
                        }
                        if let Err(detail) = state.maybe_validate(&[oa.0, oa.1]) {
                            return mismatch(detail);
                        }
                    }
                    (Err(ea), Err(eb)) if ea == eb => return invalid(ea.to_string()),
                    (ra, rb) => return mismatch(format!("cut disagreed: {ra:?} vs {rb:?}")),
                }
            }
        }
    }
    ExecOutcome::Clean
}

/// Greedy minimization: first drop everything after the failure, then try
/// removing chunks (halving down to single ops) while the mismatch persists.
pub(crate) fn shrink(
    ops: &[TraceOp],
    make_a: EngineFactory,
    make_b: EngineFactory,
    validate_every: usize,
) -> Vec<TraceOp> {
    let mut current = ops.to_vec();
    let mut chunk = (current.len() / 2).max(1);
    loop {
        let mut improved = false;
        let mut start = 0;
        while start < current.len() {
            let end = (start + chunk).min(current.len());
            let mut candidate = current.clone();
            candidate.drain(start..end);
            if candidate.is_empty() {
                start = end;
                continue;
            }
            match diff_execute(&candidate, make_a, make_b, validate_every) {
                ExecOutcome::Mismatch { .. } => {
                    current = candidate;
                    improved = true;
                }
                _ => start = end,
            }
        }
        if chunk == 1 && !improved {
            break;
        }
        if !improved {
            chunk = (chunk / 2).max(1);
        }
    }
    current
}

/// Generate a trace, execute it differentially, and shrink on mismatch.
pub fn fuzz(cfg: &FuzzConfig) -> FuzzReport {
    let ops = generate_trace(cfg.seed, cfg.ops, cfg.max_size);
    let make_a: Box<dyn Fn() -> Box<dyn Engine>> = {
        let kind = cfg.pair.0;
        Box::new(move || kind.build())
    };
    let make_b: Box<dyn Fn() -> Box<dyn Engine>> = {
        let kind = cfg.pair.1;
        Box::new(move || kind.build())
    };
    let report = |mismatch| FuzzReport {
        seed: cfg.seed,
        ops: cfg.ops,
        max_size: cfg.max_size,
        pair: [cfg.pair.0.name().to_string(), cfg.pair.1.name().to_string()],
        executed_ops: ops.len(),
        mismatch,
    };

    match diff_execute(&ops, &*make_a, &*make_b, cfg.validate_every) {
        ExecOutcome::Clean => report(None),
        ExecOutcome::Invalid { op_index, detail } => {
            unreachable!("generated trace invalid at op {op_index}: {detail}")
        }
        ExecOutcome::Mismatch { op_index, detail } => {
            let failing = &ops[..=op_index];
            let minimized = cfg.shrink.then(|| {
                let min = shrink(failing, &*make_a, &*make_b, cfg.validate_every);
                (trace_to_string(&min), min.len())
            });
            report(Some(FuzzMismatch {
                op_index,
                detail,
                trace: trace_to_string(failing),
                minimized: minimized.as_ref().map(|(t, _)| t.clone()),
                minimized_ops: minimized.map(|(_, n)| n),
            }))
        }
    }
}
