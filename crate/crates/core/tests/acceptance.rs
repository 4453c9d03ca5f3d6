//! Acceptance criteria, one PASS/FAIL line each.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use opensess::compose::{
    compatible, compatible_globals, compatible_sessions, connect_globals, connect_sessions, gateway, max_depth,
    verify_connection, ComposeError,
};
use opensess::parser::{parse_global, parse_global_in, parse_process, parse_process_in, parse_session_in};
use opensess::random::{self, Generator};
use opensess::semantics::{fidelity_harness, global_enabled, lock_free, Divergence, ExploreOptions, FidelityVerdict};
use opensess::store::ProcNode;
use rand::Rng;
use opensess::typing::{depth, leq, leq_plus, project, typecheck, well_formed, DepthValue, TypingMode};
use opensess::{GlobalNode, GlobalType, Label, Participant, Process, Session, Store};

type Outcome = Result<(), String>;

const CASES: u64 = 500;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn corpus(name: &str) -> (String, PathBuf) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    (std::fs::read_to_string(&path).unwrap(), path)
}

fn proc_(st: &mut Store, name: &str) -> Process {
    let (text, path) = corpus(&format!("{name}.proc"));
    parse_process_in(st, &text, &path).unwrap()
}

fn global(st: &mut Store, name: &str) -> GlobalType {
    let (text, path) = corpus(&format!("{name}.gt"));
    parse_global_in(st, &text, &path).unwrap()
}

fn session(st: &mut Store, name: &str) -> Session {
    let (text, path) = corpus(&format!("{name}.sess"));
    parse_session_in(st, &text, &path).unwrap()
}

fn p(s: &str) -> Participant {
    Participant::new(s)
}

fn projection_reproduction() -> Outcome {
    let mut st = Store::new();
    let g = global(&mut st, "G");
    for (who, file) in [("p", "P"), ("q", "Q"), ("h", "H")] {
        let want = proc_(&mut st, file);
        let got = project(&mut st, g, &p(who)).map_err(|e| e.to_string())?;
        ensure!(st.bisim_process(got, want), "G projected onto {who} differs from {file}");
    }
    Ok(())
}

fn depth_values() -> Outcome {
    let mut st = Store::new();
    let g = global(&mut st, "G");
    for (who, d) in [("p", 0), ("q", 0), ("h", 1)] {
        let got = depth(&st, g, &p(who));
        ensure!(got == DepthValue::Finite(d), "depth of {who} is {got}, expected {d}");
    }
    let g2 = global(&mut st, "G_unbounded");
    ensure!(depth(&st, g2, &p("r")) == DepthValue::Infinite, "depth of r should be infinite");
    ensure!(well_formed(&mut st, g).ok, "G should be well formed");
    ensure!(!well_formed(&mut st, g2).ok, "G_unbounded should not be well formed");
    Ok(())
}

fn typing() -> Outcome {
    let mut st = Store::new();
    let m = session(&mut st, "M");
    let g = global(&mut st, "G");
    ensure!(typecheck(&mut st, &m, g, TypingMode::Standard).unwrap().ok, "M is not typed by G");
    let m = session(&mut st, "subset_output");
    let g = global(&mut st, "subset_output");
    ensure!(!typecheck(&mut st, &m, g, TypingMode::Standard).unwrap().ok, "subset session typed in Standard mode");
    ensure!(typecheck(&mut st, &m, g, TypingMode::Plus).unwrap().ok, "subset session not typed in Plus mode");
    let verdict = fidelity_harness(&mut st, &m, g, TypingMode::Plus, &ExploreOptions::default()).unwrap();
    let unmatched = opensess::semantics::CommAction::new("p", "l2", "q");
    match verdict {
        FidelityVerdict::Fail(f) if f.divergence == Divergence::GlobalActionUnmatched(unmatched.clone()) => Ok(()),
        other => Err(format!("expected unmatched global action {unmatched}, got {other:?}")),
    }
}

fn compatibility() -> Outcome {
    let mut st = Store::new();
    let h = proc_(&mut st, "H");
    let k = proc_(&mut st, "K_r");
    ensure!(compatible(&st, h, k), "H and K_r should be compatible");
    let a = parse_process(&mut st, "p!l").unwrap();
    let b = parse_process(&mut st, "q?{l, l2}").unwrap();
    ensure!(!compatible(&st, a, b), "p!l and q?{{l, l2}} should not be compatible");
    Ok(())
}

fn gateways() -> Outcome {
    let mut st = Store::new();
    for (file, peer, golden) in [("H", "k", "H_gw"), ("K_r", "h", "K_r_gw")] {
        let proc_ = proc_(&mut st, file);
        let want = self::proc_(&mut st, golden);
        let got = gateway(&mut st, proc_, &p(peer)).map_err(|e| e.to_string())?;
        ensure!(st.bisim_process(got, want), "gateway of {file} towards {peer} differs from {golden}");
    }
    Ok(())
}

fn session_connection() -> Outcome {
    let mut st = Store::new();
    let m = session(&mut st, "M");
    let m2 = session(&mut st, "M_prime");
    let want = session(&mut st, "M_composed");
    let got = connect_sessions(&mut st, &m, &p("h"), &m2, &p("k")).map_err(|e| e.to_string())?;
    ensure!(got.participants() == want.participants(), "participants differ");
    for (who, proc_) in want.iter() {
        ensure!(st.bisim_process(got.get(who).unwrap(), proc_), "binding of {who} differs");
    }
    Ok(())
}

fn global_connection() -> Outcome {
    let mut st = Store::new();
    let g = global(&mut st, "G");
    let g2 = global(&mut st, "G_r");
    let want = global(&mut st, "G_composed");
    let got = connect_globals(&mut st, g, &p("h"), g2, &p("k")).map_err(|e| e.to_string())?;
    ensure!(st.bisim_global(got, want), "composed type differs from the displayed one");
    let stop = Label::new("stop");
    let has_stop = st
        .reachable_globals(got)
        .into_iter()
        .any(|n| matches!(st.global(n), GlobalNode::Comm { branches, .. } if branches.contains(&stop)));
    ensure!(!has_stop, "composed type still has a stop branch");
    Ok(())
}

fn main_theorem_instance() -> Outcome {
    let mut st = Store::new();
    let m = session(&mut st, "M");
    let g = global(&mut st, "G");
    let m2 = session(&mut st, "M_prime");
    let g2 = global(&mut st, "G_r");
    let report = verify_connection(&mut st, &m, g, &m2, g2, &p("h"), &p("k"), TypingMode::Standard)
        .map_err(|e| e.to_string())?;
    ensure!(report.typing.ok, "composed session not typed by composed type");
    for c in &report.projection_checks {
        ensure!(c.holds, "projection inequality fails for {}", c.participant);
    }
    let lf = lock_free(&st, &report.composed_session, &ExploreOptions::default()).map_err(|e| e.to_string())?;
    ensure!(lf.ok, "composed session not lock-free: {lf:?}");
    ensure!(lf.states < 10_000, "{} states", lf.states);
    Ok(())
}

fn subset_gateway_failure() -> Outcome {
    let mut st = Store::new();
    let one = parse_process(&mut st, "p!l1").unwrap();
    let two = parse_process(&mut st, "p!{l1, l2}").unwrap();
    ensure!(leq_plus(&st, one, two), "p!l1 should be below p!{{l1, l2}}");
    let g1 = gateway(&mut st, one, &p("h")).unwrap();
    let g2 = gateway(&mut st, two, &p("h")).unwrap();
    ensure!(!leq_plus(&st, g1, g2), "gateways should not be related");
    Ok(())
}

fn negative_composition() -> Outcome {
    let mut st = Store::new();
    let m = session(&mut st, "mismatch_left");
    let g = global(&mut st, "mismatch_left");
    let m2 = session(&mut st, "mismatch_right");
    let g2 = global(&mut st, "mismatch_right");
    ensure!(compatible_globals(&mut st, g, &p("h"), g2, &p("k")).unwrap(), "global types should be compatible");
    ensure!(!compatible_sessions(&st, &m, &p("h"), &m2, &p("k")), "sessions should not be compatible");
    let twice = session(&mut st, "two_pair_deadlock");
    let report = lock_free(&st, &twice, &ExploreOptions::default()).unwrap();
    ensure!(report.deadlock_witness == Some(vec![]), "expected an empty deadlock witness, got {report:?}");
    Ok(())
}

// Randomized suites.

fn peers() -> Vec<Participant> {
    random::names(&["p", "q", "r"])
}

fn pool() -> Vec<Label> {
    random::labels(&["a", "b", "c", "d"])
}

fn for_cases(suite: u64, mut case: impl FnMut(&mut Generator, &mut Store) -> Outcome) -> Outcome {
    for i in 0..CASES {
        let seed = suite * 1_000_003 + i;
        let mut gen = Generator::new(seed);
        let mut st = Store::new();
        case(&mut gen, &mut st).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok(())
}

fn preorder_laws() -> Outcome {
    for_cases(1, |gen, st| {
        let a = gen.process(st, 20, &peers(), &pool());
        ensure!(leq(st, a, a) && leq_plus(st, a, a), "not reflexive");
        let below = gen.extend_inputs(st, a, &pool());
        let above = gen.restrict_inputs(st, a);
        ensure!(leq(st, below, a) && leq(st, a, above), "generated pair not related");
        ensure!(leq(st, below, above), "leq not transitive");
        let lower = gen.restrict_outputs(st, below);
        ensure!(leq_plus(st, lower, below), "generated pair not related by leq_plus");
        ensure!(leq_plus(st, lower, above), "leq_plus not transitive");
        Ok(())
    })
}

fn leq_within_leq_plus() -> Outcome {
    for_cases(2, |gen, st| {
        let a = gen.process(st, 20, &peers(), &pool());
        let b = if gen.rng().gen_bool(0.5) { gen.extend_inputs(st, a, &pool()) } else { gen.process(st, 20, &peers(), &pool()) };
        if leq(st, b, a) {
            ensure!(leq_plus(st, b, a), "leq holds but leq_plus does not");
        }
        Ok(())
    })
}

fn compatibility_laws() -> Outcome {
    for_cases(3, |gen, st| {
        let a = gen.process(st, 20, &peers(), &pool());
        let b = gen.compatible_partner(st, a, &p("x"), &pool());
        ensure!(compatible(st, a, b), "generated partner not compatible");
        ensure!(compatible(st, b, a), "compatibility not symmetric");
        let c = gen.process(st, 20, &peers(), &pool());
        ensure!(compatible(st, a, c) == compatible(st, c, a), "compatibility not symmetric on random pair");
        // Closure under the preorder.
        let a2 = gen.restrict_inputs(st, a);
        let b2 = gen.restrict_inputs(st, b);
        ensure!(compatible(st, a2, b2), "compatibility not closed under leq");
        Ok(())
    })
}

fn compatibility_propositions() -> Outcome {
    for_cases(4, |gen, st| {
        let a = gen.process(st, 20, &peers(), &pool());
        let b = gen.compatible_partner(st, a, &p("x"), &pool());
        for (x, y) in [(a, b), (b, a)] {
            if let ProcNode::Input { peer, branches } = st.process(y).clone() {
                // Dropping input branches keeps compatibility.
                for (l, _) in branches.iter() {
                    if branches.len() > 1 {
                        let fewer = st.input(peer.clone(), branches.iter().filter(|(m, _)| *m != l).map(|(m, c)| (m.clone(), c))).unwrap();
                        ensure!(compatible(st, x, fewer), "dropping input {l} breaks compatibility");
                    }
                }
                // Continuations under each received label stay compatible.
                if let ProcNode::Output { branches: outs, .. } = st.process(x).clone() {
                    for (l, cont) in branches.iter() {
                        let out_cont = outs.get(l).ok_or("input label not offered")?;
                        ensure!(compatible(st, out_cont, cont), "continuations under {l} not compatible");
                    }
                }
            }
        }
        Ok(())
    })
}

fn gateway_monotonicity() -> Outcome {
    for_cases(5, |gen, st| {
        let a = gen.process(st, 20, &peers(), &pool());
        let below = gen.extend_inputs(st, a, &pool());
        let h = p("h");
        let ga = gateway(st, a, &h).map_err(|e| e.to_string())?;
        let gb = gateway(st, below, &h).map_err(|e| e.to_string())?;
        ensure!(leq(st, gb, ga), "gateway not monotone");
        Ok(())
    })
}

fn wf_participants() -> Vec<Participant> {
    random::names(&["p", "q", "r", "s"])
}

fn key_lemma() -> Outcome {
    for_cases(6, |gen, st| {
        let g = gen.well_formed_global(st, 15, &wf_participants(), &pool());
        let parts: Vec<Participant> = st.participants_of_global(g).into_iter().collect();
        let steps = global_enabled(st, g);
        for x in &parts {
            for y in &parts {
                let px = project(st, g, x).unwrap();
                let py = project(st, g, y).unwrap();
                let (ProcNode::Output { peer: to, branches: outs }, ProcNode::Input { peer: from, branches: ins }) =
                    (st.process(px).clone(), st.process(py).clone())
                else {
                    continue;
                };
                if &to != y || &from != x {
                    continue;
                }
                ensure!(outs.same_labels(&ins), "labels of {x} and {y} differ");
                for (l, cont) in outs.iter() {
                    let (_, next) = steps
                        .iter()
                        .find(|(a, _)| &a.sender == x && &a.receiver == y && &a.label == l)
                        .ok_or(format!("{x} {l} {y} not enabled"))?;
                    let nx = project(st, *next, x).unwrap();
                    let ny = project(st, *next, y).unwrap();
                    ensure!(st.bisim_process(nx, cont), "continuation of {x} after {l}");
                    ensure!(st.bisim_process(ny, ins.get(l).unwrap()), "continuation of {y} after {l}");
                }
            }
        }
        for (a, _) in &steps {
            let px = project(st, g, &a.sender).unwrap();
            let py = project(st, g, &a.receiver).unwrap();
            match (st.process(px), st.process(py)) {
                (ProcNode::Output { peer: to, branches: outs }, ProcNode::Input { peer: from, branches: ins }) => {
                    ensure!(to == &a.receiver && from == &a.sender, "peers of {a}");
                    ensure!(outs.contains(&a.label) && outs.same_labels(ins), "labels of {a}");
                }
                _ => return Err(format!("{a} enabled but projections are not output/input")),
            }
        }
        Ok(())
    })
}

fn reduction_and_fidelity() -> Outcome {
    for_cases(7, |gen, st| {
        let g = gen.well_formed_global(st, 15, &wf_participants(), &pool());
        let m = random::self_projection(st, g);
        match fidelity_harness(st, &m, g, TypingMode::Standard, &ExploreOptions::default()) {
            Ok(FidelityVerdict::Pass { .. }) => Ok(()),
            other => Err(format!("{other:?}")),
        }
    })
}

fn typed_sessions_lock_free() -> Outcome {
    for_cases(8, |gen, st| {
        let g = gen.well_formed_global(st, 15, &wf_participants(), &pool());
        let m = random::self_projection(st, g);
        // Processes below the projections are typed as well.
        let bindings: Vec<(Participant, Process)> = m.iter().map(|(x, q)| (x.clone(), q)).collect();
        let mut refined = Vec::new();
        for (x, q) in bindings {
            refined.push((x, gen.extend_inputs(st, q, &pool())));
        }
        let m = Session::new(st, refined).unwrap();
        ensure!(typecheck(st, &m, g, TypingMode::Standard).unwrap().ok, "refined session not typed");
        let report = lock_free(st, &m, &ExploreOptions::default()).map_err(|e| e.to_string())?;
        ensure!(report.ok, "{report:?}");
        Ok(())
    })
}

fn depth_decrease() -> Outcome {
    for_cases(9, |gen, st| {
        let g = gen.well_formed_global(st, 15, &wf_participants(), &pool());
        let GlobalNode::Comm { sender, receiver, branches } = st.global(g).clone() else {
            return Ok(());
        };
        for other in st.participants_of_global(g) {
            if other == sender || other == receiver {
                continue;
            }
            for (l, next) in branches.iter() {
                let before = depth(st, g, &other);
                let after = depth(st, next, &other);
                ensure!(before > after, "depth of {other} does not decrease after {l}: {before} vs {after}");
            }
        }
        Ok(())
    })
}

/// A well-formed type containing `h`, and a well-formed type over fresh
/// participants whose projection onto `k` is compatible with the one onto `h`.
fn compatible_pair(gen: &mut Generator, st: &mut Store) -> (GlobalType, GlobalType) {
    let left_names = random::names(&["p", "q", "r", "h"]);
    let h = p("h");
    let g = loop {
        let g = gen.well_formed_global(st, 15, &left_names, &pool());
        if st.participants_of_global(g).contains(&h) {
            break g;
        }
    };
    let d = project(st, g, &h).unwrap();
    let q = gen.compatible_partner(st, d, &p("x"), &pool());
    let g2 = gen.context_for(st, q, &p("k"), &random::names(&["x", "y", "z"]), &pool());
    (g, g2)
}

fn composed_depth_bound() -> Outcome {
    for_cases(10, |gen, st| {
        let (g, g2) = compatible_pair(gen, st);
        let composed = connect_globals(st, g, &p("h"), g2, &p("k")).map_err(|e| e.to_string())?;
        let (DepthValue::Finite(w), DepthValue::Finite(w2)) = (max_depth(st, g), max_depth(st, g2)) else {
            return Err("component not well formed".into());
        };
        let got = max_depth(st, composed);
        ensure!(got <= DepthValue::Finite(2 * (w + w2)), "composed depth {got} exceeds 2({w} + {w2})");
        Ok(())
    })
}

fn connection_total() -> Outcome {
    for_cases(11, |gen, st| {
        let (g, g2) = compatible_pair(gen, st);
        ensure!(compatible_globals(st, g, &p("h"), g2, &p("k")).unwrap(), "generated pair not compatible");
        match connect_globals(st, g, &p("h"), g2, &p("k")) {
            Ok(_) => Ok(()),
            Err(e @ ComposeError::NoClauseApplies(_)) => Err(e.to_string()),
            Err(e) => Err(format!("unexpected error {e}")),
        }
    })
}

type Check = (&'static str, fn() -> Outcome);

fn property_suites() -> Outcome {
    let suites: [Check; 12] = [
        ("preorder laws", preorder_laws),
        ("leq within leq_plus", leq_within_leq_plus),
        ("compatibility symmetry and closure", compatibility_laws),
        ("compatibility under fewer inputs and continuations", compatibility_propositions),
        ("gateway monotonicity", gateway_monotonicity),
        ("projection and reduction agree", key_lemma),
        ("subject reduction and fidelity", reduction_and_fidelity),
        ("typed sessions are lock-free", typed_sessions_lock_free),
        ("depth decreases under root steps", depth_decrease),
        ("composed depth bound", composed_depth_bound),
        ("connection never runs out of clauses", connection_total),
        ("parsing round-trips", round_trip),
    ];
    let mut failures = Vec::new();
    for (name, suite) in suites {
        match run(suite) {
            Ok(()) => println!("    ok   {name}"),
            Err(e) => {
                println!("    FAIL {name}: {e}");
                failures.push(name);
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(format!("failing suites: {}", failures.join(", ")))
    }
}

fn round_trip() -> Outcome {
    use opensess::parser::{print_global, print_process};
    for_cases(12, |gen, st| {
        let a = gen.process(st, 20, &peers(), &pool());
        let text = print_process(st, a);
        let back = parse_process(st, &text).map_err(|e| format!("{text}: {e}"))?;
        ensure!(st.bisim_process(a, back), "{text} does not round-trip");
        let g = gen.global(st, 15, &wf_participants(), &pool());
        let text = print_global(st, g);
        let back = parse_global(st, &text).map_err(|e| format!("{text}: {e}"))?;
        ensure!(st.bisim_global(g, back), "{text} does not round-trip");
        Ok(())
    })
}

fn run(f: fn() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() {
    let criteria: [Check; 11] = [
        ("projection reproduction", projection_reproduction),
        ("depth values", depth_values),
        ("typing", typing),
        ("compatibility", compatibility),
        ("gateways", gateways),
        ("session connection", session_connection),
        ("global connection", global_connection),
        ("connection theorem instance", main_theorem_instance),
        ("gateways under subset outputs", subset_gateway_failure),
        ("negative composition", negative_composition),
        ("property suites", property_suites),
    ];
    let mut failed = BTreeSet::new();
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run(*criterion);
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(()) => println!("PASS {:>2} {name} ({ms} ms)", i + 1),
            Err(e) => {
                println!("FAIL {:>2} {name} ({ms} ms): {e}", i + 1);
                failed.insert(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
