mod common;

use proptest::prelude::*;
use slidematch::oracle::{exact_mwm, OracleLimits};
use slidematch::ps::{self, Decision, PsParams, PsState};
use slidematch::{Scalar, Weight};

use common::{eps, stream};

const N: usize = 8;

fn params() -> PsParams {
    PsParams::new(eps(), N).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn potentials_stay_consistent_after_every_event(s in stream(N, 24)) {
        let mut state: PsState = PsState::new(params());
        let mut prev_phi = state.potentials().to_vec();
        let mut prev_w = Weight::default();
        for e in &s.events {
            let rec = state.process(e).unwrap();
            let two_w = state.w_prime().clone() + state.w_prime().clone();
            prop_assert_eq!(state.phi_sum(), two_w);
            prop_assert!(state.potentials().iter().zip(&prev_phi).all(|(a, b)| a >= b));
            prop_assert!(*state.w_prime() >= prev_w);
            prop_assert!(state.max_stacked_degree() <= state.params().degree_cap());
            prop_assert!(state.stack().len() <= N * state.params().degree_cap());
            prop_assert_eq!(rec.decision == Decision::Pushed, rec.reduced > Weight::default());
            prev_phi = state.potentials().to_vec();
            prev_w = state.w_prime().clone();
        }
    }

    #[test]
    fn every_edge_is_covered_by_final_potentials(s in stream(N, 24)) {
        let state = ps::run(&params(), &s).unwrap();
        let one_plus = Weight::integer(1) + eps();
        for e in &s.events {
            let cover = one_plus.clone() * (state.phi(e.u).clone() + state.phi(e.v).clone());
            prop_assert!(e.w <= cover, "edge {:?} exceeds {}", e, cover);
        }
    }

    #[test]
    fn sandwich_chain_against_oracle(s in stream(N, 20)) {
        let state = ps::run(&params(), &s).unwrap();
        let greedy = state.extract_matching();
        prop_assert!(greedy.is_valid());
        let opt = exact_mwm(&s.events, &OracleLimits::default()).unwrap().total;
        let four = Weight::integer(1) + Weight::integer(4) * eps();
        let w_prime = state.w_prime().clone();
        prop_assert!(w_prime <= opt);
        prop_assert!(four.clone() * greedy.total.clone() >= w_prime);
        let factor = Weight::integer(2) * four * (Weight::integer(1) + eps());
        prop_assert!(factor * greedy.total.clone() >= opt);
        prop_assert!(greedy.total <= opt);
    }

    #[test]
    fn prefix_runs_agree_edge_by_edge(s in stream(N, 24), cut in 0usize..25) {
        let cut = cut.min(s.len());
        let (prefix, trace_a) = ps::run_traced(&params(), &s.range(0..cut)).unwrap();
        let (full, trace_ab) = ps::run_traced(&params(), &s).unwrap();
        prop_assert!(prefix.w_prime() <= full.w_prime());
        for (a, ab) in trace_a.iter().zip(&trace_ab) {
            prop_assert_eq!(&a.reduced, &ab.reduced);
        }
    }

    #[test]
    fn run_is_a_fold(s in stream(N, 24), cut in 0usize..25) {
        let cut = cut.min(s.len());
        let mut resumed = ps::run(&params(), &s.range(0..cut)).unwrap();
        for e in &s.events[cut..] {
            resumed.process(e).unwrap();
        }
        let whole = ps::run(&params(), &s).unwrap();
        prop_assert_eq!(resumed, whole.clone());
        prop_assert_eq!(ps::run(&params(), &s).unwrap(), whole);
    }

    #[test]
    fn monotonic_variant_dominates_final_greedy(s in stream(N, 24)) {
        let (state, best) = ps::run_monotonic(&params(), &s).unwrap();
        prop_assert_eq!(&state, &ps::run(&params(), &s).unwrap());
        prop_assert!(best.is_valid());
        prop_assert!(best.total >= state.extract_matching().total);
    }

    #[test]
    fn float_mode_tracks_exact_mode(s in stream(N, 24)) {
        // Integer-valued weights keep f64 arithmetic close enough that the
        // decisions almost always agree; compare only the potential identity.
        let exact = ps::run(&params(), &s).unwrap();
        let float = ps::run(&params(), &s.map_weights(|w| w.to_f64())).unwrap();
        let total = float.phi_sum();
        prop_assert!((total - 2.0 * float.w_prime()).abs() <= 1e-9 * total.max(1.0));
        prop_assert!(exact.w_prime().to_f64() > 0.0 || s.is_empty());
    }
}

#[test]
fn empty_run_is_fresh_state() {
    let s: slidematch::StreamSlice = slidematch::StreamSlice::default();
    assert_eq!(ps::run(&params(), &s).unwrap(), PsState::new(params()));
}
