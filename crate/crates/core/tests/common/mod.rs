#![allow(dead_code)]

use proptest::prelude::*;
use slidematch::{Label, StreamSlice, Weight};

/// Streams on `n` vertices with up to `max_m` events and weights `k / d`.
pub fn stream(n: usize, max_m: usize) -> impl Strategy<Value = StreamSlice> {
    let edge = (
        0..n,
        1..n,
        1u64..60,
        prop_oneof![Just(1i64), Just(3), Just(10)],
    );
    prop::collection::vec(edge, 0..=max_m).prop_map(move |raw| {
        let triples = raw
            .into_iter()
            .map(|(u, d, k, den)| (u, (u + d) % n, Weight::ratio(k as i64, den)));
        StreamSlice::from_triples(Label::Plain, triples).unwrap()
    })
}

pub fn eps() -> Weight {
    Weight::ratio(1, 10)
}
