mod common;

use proptest::prelude::*;
use slidematch::eval::{evaluate, replay};
use slidematch::lookahead::{all_splits, refined_lookahead_audit, AuditParams};
use slidematch::oracle::{exact_window_weights, OracleLimits};
use slidematch::{Exec, StreamSlice, Weight, WindowEngine, WindowParams};

use common::{eps, stream};

const N: usize = 8;

fn params(window: usize) -> WindowParams {
    WindowParams::new(window, eps(), N).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn engine_invariants_hold_after_every_event(s in stream(N, 40), window in 1usize..12) {
        for step in replay(&s, &params(window), Exec::Sequential).unwrap() {
            prop_assert!(step.invariants_hold);
            prop_assert!(step.bound.holds(), "{:?}", step.bound);
            prop_assert!(step.report.matching.is_valid());
            prop_assert_eq!(&step.report.weight, &step.report.matching.total);
        }
    }

    #[test]
    fn reports_are_within_guarantee(s in stream(N, 20), window in 1usize..8) {
        let ev = evaluate(&s, &params(window), &OracleLimits::default(), Exec::Sequential).unwrap();
        prop_assert_eq!(ev.summary.violations(), 0, "{:?}", ev.summary);
    }

    #[test]
    fn strict_reports_match_lenient_once_full(s in stream(N, 20), window in 1usize..8) {
        let lenient = replay(&s, &params(window), Exec::Sequential).unwrap();
        let strict = replay(&s, &params(window).with_strict_paper(true), Exec::Sequential).unwrap();
        for (a, b) in lenient.iter().zip(&strict).skip(window - 1) {
            prop_assert_eq!(&a.report, &b.report);
        }
    }

    #[test]
    fn lookahead_audit_has_no_violations(s in stream(N, 10)) {
        let p = params(1);
        let report = refined_lookahead_audit(
            &s,
            &all_splits(s.len()),
            &AuditParams::refined(&p),
            &OracleLimits::default(),
            Exec::Sequential,
        )
        .unwrap();
        prop_assert_eq!(report.violations(), 0);
    }
}

#[test]
fn oracle_window_weights_dominate_engine_reports() {
    let s = slidematch::instances::gen_random(&slidematch::instances::RandomStreamSpec::uniform(
        8, 20, 1,
    ));
    let optima = exact_window_weights(&s, 6, &OracleLimits::default()).unwrap();
    assert_eq!(optima.len(), 20);
    let mut engine = WindowEngine::new(params(6));
    for (e, opt) in s.events.iter().zip(&optima) {
        assert!(engine.on_edge(e).unwrap().weight <= *opt);
    }
}

#[test]
fn single_edge_audit_is_tight() {
    let s =
        StreamSlice::from_triples(slidematch::Label::Plain, [(0, 1, Weight::integer(3))]).unwrap();
    let report = refined_lookahead_audit(
        &s,
        &all_splits(1),
        &AuditParams::refined(&params(1)),
        &OracleLimits::default(),
        Exec::Sequential,
    )
    .unwrap();
    assert_eq!(report.splits.len(), 3);
    assert_eq!(report.first_output_bound, Some(true));
    assert_eq!(report.violations(), 0);
    for split in report.conditioned() {
        assert_eq!(split.ratio, Some(Weight::integer(1)));
    }
}

#[test]
fn bucket_count_stays_logarithmic_on_escalating_weights() {
    // Weights double every step, so W' of consecutive suffixes differ a lot.
    let triples: Vec<_> = (0..40)
        .map(|k| (k % N, (k + 1) % N, Weight::integer(1u64 << (k % 30))))
        .collect();
    let s = StreamSlice::from_triples(slidematch::Label::Plain, triples).unwrap();
    for step in replay(&s, &params(40), Exec::Sequential).unwrap() {
        assert!(step.bound.holds(), "{:?}", step.bound);
    }
}
