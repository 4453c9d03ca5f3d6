use super::*;
use crate::names::{Label, Participant};
use crate::parser::{parse_global, parse_process, parse_session};
use crate::store::Store;
use crate::testing;

fn p(s: &str) -> Participant {
    Participant::new(s)
}

#[test]
fn projections_of_running_example() {
    let mut st = Store::new();
    let g = testing::global(&mut st, "G");
    for (who, file) in [("p", "P"), ("q", "Q"), ("h", "H")] {
        let want = testing::proc_(&mut st, file);
        let got = project(&mut st, g, &p(who)).unwrap();
        assert!(st.bisim_process(got, want), "projection onto {who}");
    }
    let end = project(&mut st, g, &p("z")).unwrap();
    assert_eq!(end, st.end_process());
    let e = st.end_global();
    assert_eq!(project(&mut st, e, &p("p")).unwrap(), st.end_process());
}

#[test]
fn projection_of_unbounded_example() {
    let mut st = Store::new();
    let g = testing::global(&mut st, "G_unbounded");
    let r = project(&mut st, g, &p("r")).unwrap();
    let want = parse_process(&mut st, "p!l3").unwrap();
    assert!(st.bisim_process(r, want));
    let pp = project(&mut st, g, &p("p")).unwrap();
    let want = parse_process(&mut st, "rec X . q!{l1 . r?l3, l2 . X}").unwrap();
    assert!(st.bisim_process(pp, want));
    let qq = project(&mut st, g, &p("q")).unwrap();
    let want = parse_process(&mut st, "rec X . p?{l1, l2 . X}").unwrap();
    assert!(st.bisim_process(qq, want));
}

#[test]
fn projection_of_second_component() {
    let mut st = Store::new();
    let g = testing::global(&mut st, "G_r");
    for (who, file) in [("r", "R"), ("s", "S"), ("k", "K_r")] {
        let want = testing::proc_(&mut st, file);
        let got = project(&mut st, g, &p(who)).unwrap();
        assert!(st.bisim_process(got, want), "projection onto {who}");
    }
}

#[test]
fn projection_failures() {
    let mut st = Store::new();
    let cases = [
        ("p -> q : {a . r -> p : x, b . p -> r : y}", ProjectionFailure::MixedShapes),
        ("p -> q : {a . r -> p : x, b . r -> p : y}", ProjectionFailure::UnequalContinuations),
        ("p -> q : {a . p -> r : x, b . q -> r : y}", ProjectionFailure::DifferentInputSenders),
        ("p -> q : {a . p -> r : {x, y}, b . p -> r : x . p -> r : z}", ProjectionFailure::OverlappingInputLabels),
        ("p -> q : {a . p -> r : x, b . end}", ProjectionFailure::MixedShapes),
        ("p -> q : {a . r -> p : x, b . end}", ProjectionFailure::UnequalContinuations),
    ];
    for (text, reason) in cases {
        let g = parse_global(&mut st, text).unwrap();
        let err = project(&mut st, g, &p("r")).unwrap_err();
        assert_eq!(err.reason, reason, "{text}");
        assert_eq!(err.global_node, g);
    }
}

#[test]
fn merge_of_disjoint_inputs() {
    let mut st = Store::new();
    let g = parse_global(&mut st, "p -> q : {a . p -> r : x, b . p -> r : y . q -> r : z}").unwrap();
    let got = project(&mut st, g, &p("r")).unwrap();
    let want = parse_process(&mut st, "p?{x, y . q?z}").unwrap();
    assert!(st.bisim_process(got, want));
}

#[test]
fn depths() {
    let mut st = Store::new();
    let g = testing::global(&mut st, "G");
    assert_eq!(depth(&st, g, &p("p")), DepthValue::Finite(0));
    assert_eq!(depth(&st, g, &p("q")), DepthValue::Finite(0));
    assert_eq!(depth(&st, g, &p("h")), DepthValue::Finite(1));
    assert_eq!(depth(&st, g, &p("z")), DepthValue::Finite(0));
    let g2 = testing::global(&mut st, "G_unbounded");
    assert_eq!(depth(&st, g2, &p("r")), DepthValue::Infinite);
    assert_eq!(depth(&st, g2, &p("p")), DepthValue::Finite(0));
    let e = st.end_global();
    assert_eq!(depth(&st, e, &p("p")), DepthValue::Finite(0));
    // A branch that never mentions r does not bound its depth.
    let g3 = parse_global(&mut st, "p -> q : {a . q -> p : b . p -> r : c, d . end}").unwrap();
    assert_eq!(depth(&st, g3, &p("r")), DepthValue::Finite(2));
}

#[test]
fn well_formedness() {
    let mut st = Store::new();
    let g = testing::global(&mut st, "G");
    assert!(well_formed(&mut st, g).ok);
    let g2 = testing::global(&mut st, "G_unbounded");
    let report = well_formed(&mut st, g2);
    assert!(!report.ok);
    let r = report.participants.iter().find(|c| c.participant == p("r")).unwrap();
    assert_eq!(r.depth, DepthValue::Infinite);
    let e = st.end_global();
    assert!(well_formed(&mut st, e).ok);
}

#[test]
fn preorders() {
    let mut st = Store::new();
    let pp = testing::proc_(&mut st, "P");
    assert!(leq(&st, pp, pp));
    let a = parse_process(&mut st, "p?{l1, l2}").unwrap();
    let b = parse_process(&mut st, "p?l1").unwrap();
    assert!(leq(&st, a, b));
    assert!(!leq(&st, b, a));
    assert!(!leq_plus(&st, b, a));
    let c = parse_process(&mut st, "q!l1").unwrap();
    let d = parse_process(&mut st, "q!{l1, l2}").unwrap();
    assert!(!leq(&st, c, d));
    assert!(leq_plus(&st, c, d));
    assert!(!leq_plus(&st, d, c));
    let e = parse_process(&mut st, "r!l1").unwrap();
    assert!(!leq_plus(&st, c, e));
}

#[test]
fn typing_running_example() {
    let mut st = Store::new();
    let m = testing::session(&mut st, "M");
    let g = testing::global(&mut st, "G");
    let report = typecheck(&mut st, &m, g, TypingMode::Standard).unwrap();
    assert!(report.ok, "{report:?}");
    let m2 = testing::session(&mut st, "M_prime");
    let g2 = testing::global(&mut st, "G_r");
    assert!(typecheck(&mut st, &m2, g2, TypingMode::Standard).unwrap().ok);
}

#[test]
fn typing_subset_outputs() {
    let mut st = Store::new();
    let m = testing::session(&mut st, "subset_output");
    let g = testing::global(&mut st, "subset_output");
    let standard = typecheck(&mut st, &m, g, TypingMode::Standard).unwrap();
    assert!(!standard.ok);
    assert_eq!(standard.failures.len(), 1);
    assert_eq!(standard.failures[0].participant, p("p"));
    assert!(typecheck(&mut st, &m, g, TypingMode::Plus).unwrap().ok);
    let pruned = testing::global(&mut st, "subset_output_pruned");
    assert!(typecheck(&mut st, &m, pruned, TypingMode::Standard).unwrap().ok);
}

#[test]
fn typing_missing_and_trivial() {
    let mut st = Store::new();
    let m = parse_session(&mut st, "p |> 0").unwrap();
    let e = st.end_global();
    assert!(typecheck(&mut st, &m, e, TypingMode::Standard).unwrap().ok);
    let m = parse_session(&mut st, "p |> q!l").unwrap();
    let g = parse_global(&mut st, "p -> q : l").unwrap();
    let report = typecheck(&mut st, &m, g, TypingMode::Standard).unwrap();
    assert!(!report.ok);
    assert_eq!(report.missing.into_iter().collect::<Vec<_>>(), vec![p("q")]);
    let bad = testing::global(&mut st, "G_unbounded");
    assert!(matches!(
        typecheck(&mut st, &m, bad, TypingMode::Standard),
        Err(TypingError::IllFormedGlobalType(_))
    ));
    let _ = Label::new("l");
}

#[test]
fn projection_commutes_with_unfolding() {
    let mut st = Store::new();
    let g = testing::global(&mut st, "G");
    let u = st.unfold_global(g);
    assert_ne!(u, g);
    for who in ["p", "q", "h"] {
        let a = project(&mut st, g, &p(who)).unwrap();
        let b = project(&mut st, u, &p(who)).unwrap();
        assert!(st.bisim_process(a, b));
    }
}
