//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Budgets and tolerances are pinned here; a failure is a regression, not a
//! calibration problem.

use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};

use dps_core::engine::{Engine, EngineKind};
use dps_core::harness::fuzz::{ltt_changeval_step_budget, LTT_STEP_FACTOR};
use dps_core::harness::{fuzz, parse_trace, run_trace, FuzzConfig};
use dps_core::ltt::query::{candidate_set_bruteforce, PsortIter};
use dps_core::ltt::{iterated_log, LttEngine, GOLDEN_RATIO};
use dps_core::tree::{self, min_leaves_for_height};
use dps_core::{Arena, ElementId, Metrics, NodeId};

fn log_phi(n: f64) -> f64 {
    n.ln() / GOLDEN_RATIO.ln()
}

fn pass(criterion: &str, detail: String) {
    println!("criterion {criterion}: PASS ({detail})");
}

/// Distinct pseudo-random values, fixed by `seed`.
fn random_list(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    let mut values = Vec::with_capacity(n);
    let mut seen = std::collections::HashSet::new();
    while values.len() < n {
        let v = (rng.next_u64() % (1 << 42)) as i64;
        if seen.insert(v) {
            values.push(v);
        }
    }
    values
}

/// Criterion 1: differential fuzz over ten seeds and both engine pairs,
/// 10^4 operations each at list sizes up to 512, with validators on; zero
/// mismatches allowed.
#[test]
fn criterion_1_differential_fuzz() {
    let t0 = Instant::now();
    for seed in 1..=10u64 {
        for pair in [
            (EngineKind::Tt, EngineKind::Oracle),
            (EngineKind::Ltt, EngineKind::Oracle),
        ] {
            let started = Instant::now();
            let report = fuzz(&FuzzConfig::new(seed, 10_000, 512, pair));
            assert!(
                report.clean(),
                "criterion 1: FAIL (seed {seed}, pair {pair:?}): {:?}",
                report.mismatch.map(|m| m.detail)
            );
            assert!(
                started.elapsed().as_secs() < 60,
                "criterion 1: FAIL (seed {seed} exceeded the 60 s budget)"
            );
        }
    }
    pass(
        "1 (differential fuzz)",
        format!("10 seeds x 2 pairs x 10000 ops in {:.1?}", t0.elapsed()),
    );
}

/// Criterion 2: the two bundled fixture traces reproduce exactly — psort
/// answers through the trace runner on every engine, team contents and
/// layer number through the layered engine's own accessors.
#[test]
fn criterion_2_fixture_traces() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for fixture in ["fig1.trace", "fig2.trace"] {
        let text = std::fs::read_to_string(root.join(fixture)).expect("fixture exists");
        let ops = parse_trace(&text).expect("fixture parses");
        for kind in [EngineKind::Tt, EngineKind::Ltt, EngineKind::Oracle] {
            run_trace(&ops, kind, true).unwrap_or_else(|e| {
                panic!("criterion 2: FAIL ({fixture} on {}): {e}", kind.name())
            });
        }
    }

    // First fixture list: psort(., 1) = [2].
    let mut e = LttEngine::new();
    let l1 = e.new_list(&[3, 6, 9, 2, 4, 7, 8]).unwrap();
    let first = e.psort(l1, 1).unwrap();
    assert_eq!(first[0].1, 2, "criterion 2: FAIL (fig1 minimum)");

    // Second fixture list: psort(., 1) = [3]; teams and layer number are
    // pinned exactly.
    let l2 = e.new_list(&[3, 9, 5, 7, 8, 4, 6]).unwrap();
    let first = e.psort(l2, 1).unwrap();
    assert_eq!(first[0].1, 3, "criterion 2: FAIL (fig2 minimum)");
    let elem = |value: i64| {
        e.elements(l2)
            .unwrap()
            .into_iter()
            .find(|(_, v)| *v == value)
            .unwrap()
            .0
    };
    assert_eq!(
        e.team_of_element(l2, elem(3)).unwrap(),
        vec![4, 5, 9],
        "criterion 2: FAIL (team of 3)"
    );
    assert_eq!(
        e.team_of_element(l2, elem(5)).unwrap(),
        vec![7],
        "criterion 2: FAIL (team of 5)"
    );
    assert_eq!(
        e.team_of_element(l2, elem(4)).unwrap(),
        vec![6, 8],
        "criterion 2: FAIL (team of 4)"
    );
    assert_eq!(
        e.layer_number_of(l2).unwrap(),
        3,
        "criterion 2: FAIL (layer number)"
    );
    pass("2 (fixture traces)", "exact".into());
}

/// Criterion 3: height bound over 1000 random builds with n in [1, 1e5]:
/// height <= log_phi(n), checked in exact arithmetic through the minimum
/// leaf recurrence f(h) = f(h-1) + f(h-2).
#[test]
fn criterion_3_height_bound() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_slack = f64::INFINITY;
    for case in 0..1000usize {
        // Log-uniform sizes cover both ends; pin the extremes explicitly.
        let n = match case {
            0 => 1,
            1 => 100_000,
            _ => {
                let u = (rng.next_u64() % 1_000_000) as f64 / 1_000_000.0;
                ((100_000f64).powf(u)).round().max(1.0) as usize
            }
        };
        let values = random_list(&mut rng, n);
        let mut arena = Arena::new();
        let items: Vec<(ElementId, i64)> = values
            .iter()
            .enumerate()
            .map(|(i, v)| (ElementId(i as u64), *v))
            .collect();
        let t = tree::build(&mut arena, &items).unwrap();
        let h = t.height(&arena);

        // Exact form: a height-h tournament tree has at least f(h) leaves.
        let need = min_leaves_for_height(h);
        assert!(
            need <= n as u128,
            "criterion 3: FAIL (height {h} needs {need} leaves, built {n})"
        );
        if n > 1 {
            let bound = log_phi(n as f64);
            assert!(
                f64::from(h) <= bound + 1e-9,
                "criterion 3: FAIL (height {h} > log_phi({n}) = {bound:.4})"
            );
            worst_slack = worst_slack.min(bound - f64::from(h));
        }
    }
    pass(
        "3 (height bound)",
        format!(
            "1000 builds, min slack {worst_slack:.3}, {:.1?}",
            t0.elapsed()
        ),
    );
}

/// Criterion 4: layered build of a 10^6-element random permutation has
/// layer number at most 6 and the measured max team sizes contract by a
/// log_phi at every layer.
#[test]
fn criterion_4_layer_bound() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 1_000_000usize;
    let mut values: Vec<i64> = (0..n as i64).collect();
    for i in (1..values.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        values.swap(i, j);
    }

    let mut e = LttEngine::new();
    let list = e.new_list(&values).unwrap();
    let layers = e.layer_number_of(list).unwrap();
    assert!(layers <= 6, "criterion 4: FAIL (layer number {layers} > 6)");

    let stats = e.layer_stats_of(list).unwrap();
    assert_eq!(stats[0].max_team_size, n);
    for pair in stats.windows(2) {
        let (s_i, s_next) = (pair[0].max_team_size, pair[1].max_team_size);
        assert!(
            (s_next as f64) <= log_phi(s_i as f64) + 1e-9,
            "criterion 4: FAIL (chain broken: {s_next} > log_phi({s_i}))"
        );
    }
    let chain: Vec<usize> = stats.iter().map(|s| s.max_team_size).collect();
    pass(
        "4 (layer bound)",
        format!("layers {layers}, team sizes {chain:?}, {:.1?}", t0.elapsed()),
    );
}

/// Criterion 5: on 500 random lists with n <= 64, the layer-0 iterator's
/// queue at the refill checkpoint equals the brute-force candidate set of
/// the outputs so far, at every call until exhaustion.
#[test]
fn criterion_5_queue_candidate_invariant() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checks = 0usize;
    for _ in 0..500 {
        let n = 1 + (rng.next_u64() % 64) as usize;
        let values = random_list(&mut rng, n);
        let mut arena = Arena::new();
        let items: Vec<(ElementId, i64)> = values
            .iter()
            .enumerate()
            .map(|(i, v)| (ElementId(i as u64), *v))
            .collect();
        let t = dps_core::ltt::build(&mut arena, &items).unwrap();
        let mut m = Metrics::new();
        let mut it = PsortIter::new(t.root.unwrap());
        it.enable_capture();
        let mut outputs: Vec<NodeId> = Vec::new();
        for _ in 0..n + 2 {
            let before = outputs.clone();
            let out = it.nxt(&arena, &mut m);
            if let Some(snapshot) = it.captured_queue() {
                let queue: std::collections::BTreeSet<NodeId> = snapshot.iter().copied().collect();
                let expected = candidate_set_bruteforce(&arena, &before);
                assert_eq!(
                    queue, expected,
                    "criterion 5: FAIL (queue != candidates after {} outputs of {n})",
                    before.len()
                );
                checks += 1;
            }
            if let Some(leaf) = out {
                outputs.push(leaf);
            }
        }
        assert_eq!(outputs.len(), n, "criterion 5: FAIL (enumeration short)");
    }
    pass(
        "5 (queue = candidate set)",
        format!("{checks} checkpoints over 500 lists, {:.1?}", t0.elapsed()),
    );
}

/// Criterion 6: operation-counter budgets on the n x k grid.
/// (a) tournament tree: psort inserts <= k (ceil(log_phi n) + 1) and
///     changeval visits <= ceil(log_phi n) + 1;
/// (b) layered psort: total queue operations <= 8 log*_phi(n) k;
/// (c) layered changeval: steps <= 128 log2(n) (log2 log2 n)^2, the
///     committed calibration.
#[test]
fn criterion_6_counter_bounds() {
    let t0 = Instant::now();
    assert_eq!(LTT_STEP_FACTOR, 128, "criterion 6: FAIL (constant drifted)");
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in [1usize << 10, 1 << 14, 1 << 18] {
        let values = random_list(&mut rng, n);

        let mut tt = EngineKind::Tt.build();
        let tl = tt.new_list(&values).unwrap();
        let mut ltt = EngineKind::Ltt.build();
        let ll = ltt.new_list(&values).unwrap();
        let log_term = log_phi(n as f64).ceil() as u64 + 1;
        let stars = u64::from(iterated_log(GOLDEN_RATIO, n as f64).unwrap());

        for k in [1usize, 16, 256] {
            tt.reset_metrics();
            tt.psort(tl, k).unwrap();
            let inserts = tt.metrics().pq_inserts;
            assert!(
                inserts <= k as u64 * log_term,
                "criterion 6a: FAIL (tt psort inserts {inserts} > {} at n={n} k={k})",
                k as u64 * log_term
            );

            let target = tt.elements(tl).unwrap()[(rng.next_u64() % n as u64) as usize].0;
            let fresh = 1 << 43 | (rng.next_u64() % (1 << 20)) as i64;
            tt.reset_metrics();
            tt.changeval(tl, target, fresh).unwrap();
            let visits = tt.metrics().nodes_visited;
            assert!(
                visits <= log_term,
                "criterion 6a: FAIL (tt changeval visits {visits} > {log_term} at n={n})"
            );

            ltt.reset_metrics();
            ltt.psort(ll, k).unwrap();
            let qops = ltt.metrics().pq_ops();
            assert!(
                qops <= 8 * stars * k as u64,
                "criterion 6b: FAIL (ltt psort queue ops {qops} > {} at n={n} k={k})",
                8 * stars * k as u64
            );

            let target = ltt.elements(ll).unwrap()[(rng.next_u64() % n as u64) as usize].0;
            let fresh = 1 << 44 | (rng.next_u64() % (1 << 20)) as i64;
            ltt.reset_metrics();
            ltt.changeval(ll, target, fresh).unwrap();
            let steps = ltt.metrics().nodes_visited;
            let budget = ltt_changeval_step_budget(n);
            assert!(
                steps <= budget,
                "criterion 6c: FAIL (ltt changeval steps {steps} > {budget} at n={n})"
            );
        }
    }
    pass(
        "6 (counter bounds)",
        format!("grid n in {{2^10, 2^14, 2^18}}, k in {{1, 16, 256}}, {:.1?}", t0.elapsed()),
    );
}

/// Criterion 7: cut followed by link reproduces the original element-id
/// sequence on both engines, over 1000 random (list, position) pairs.
#[test]
fn criterion_7_cut_link_inverse() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..1000usize {
        let n = 1 + (rng.next_u64() % 256) as usize;
        let values = random_list(&mut rng, n);
        let pos = (rng.next_u64() % n as u64) as usize;
        for kind in [EngineKind::Tt, EngineKind::Ltt] {
            let mut engine = kind.build();
            let l = engine.new_list(&values).unwrap();
            let before = engine.elements(l).unwrap();
            let (x, y) = engine.cut(l, before[pos].0).unwrap();
            let back = engine.link(x, y).unwrap();
            let after = engine.elements(back).unwrap();
            assert_eq!(
                before,
                after,
                "criterion 7: FAIL (case {case}, {} engine, n={n}, pos={pos})",
                kind.name()
            );
        }
    }
    pass("7 (cut/link inverse)", format!("1000 cases, {:.1?}", t0.elapsed()));
}
