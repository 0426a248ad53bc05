//! Sliding-window matching built from suffix runs ("buckets").
//!
//! Every arriving edge opens a new bucket and is fed to all of them. Each
//! bucket runs its own [`PsState`]; its first output is `W'` and its second
//! output is the greedy matching. After feeding, each surviving bucket keeps
//! only the newest later bucket whose `W'` is still within a `(1 - beta)`
//! factor of its own and drops the ones in between. The oldest bucket is
//! dropped once the next one already covers the whole window.

use thiserror::Error;

use crate::exec::Exec;
use crate::graph::{window_start, EdgeEvent, Matching};
use crate::ps::{PsError, PsParams, PsState};
use crate::weight::{Scalar, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WindowError {
    #[error("window length must be at least 1")]
    ZeroWindow,
    #[error("beta must satisfy 0 < beta <= eps/9, got beta = {beta} with eps = {epsilon}")]
    BetaOutOfRange { beta: String, epsilon: String },
    #[error(transparent)]
    Ps(#[from] PsError),
}

/// Feeding fans out over buckets only when there are at least this many.
const PARALLEL_FEED_MIN_BUCKETS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct WindowParams {
    window: usize,
    beta: Weight,
    alpha1: Weight,
    strict_paper: bool,
    ps: PsParams,
}

impl WindowParams {
    /// Window of `window` items over an `n`-vertex universe with `beta = eps / 9`.
    pub fn new(window: usize, epsilon: Weight, n: usize) -> Result<Self, WindowError> {
        if window == 0 {
            return Err(WindowError::ZeroWindow);
        }
        let ps = PsParams::new(epsilon, n)?;
        let beta = ps.epsilon().clone() / Weight::integer(9);
        let alpha1 = Weight::integer(2) + Weight::integer(2) * ps.epsilon().clone();
        Ok(WindowParams {
            window,
            beta,
            alpha1,
            strict_paper: false,
            ps,
        })
    }

    pub fn with_beta(mut self, beta: Weight) -> Result<Self, WindowError> {
        let max = self.ps.epsilon().clone() / Weight::integer(9);
        if beta == Weight::default() || beta > max {
            return Err(WindowError::BetaOutOfRange {
                beta: beta.to_string(),
                epsilon: self.ps.epsilon().to_string(),
            });
        }
        self.beta = beta;
        Ok(self)
    }

    /// Reproduce the plain report rule even during warm-up.
    pub fn with_strict_paper(mut self, strict: bool) -> Self {
        self.strict_paper = strict;
        self
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn epsilon(&self) -> &Weight {
        self.ps.epsilon()
    }

    pub fn beta(&self) -> &Weight {
        &self.beta
    }

    /// `2 + 2 eps`: approximation factor of `W'` alone.
    pub fn alpha1(&self) -> &Weight {
        &self.alpha1
    }

    /// `3 + 20 eps`: guaranteed factor of every report.
    pub fn alpha2(&self) -> Weight {
        Weight::integer(3) + Weight::integer(20) * self.epsilon().clone()
    }

    pub fn strict_paper(&self) -> bool {
        self.strict_paper
    }

    pub fn ps(&self) -> &PsParams {
        &self.ps
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bucket<W = Weight> {
    /// Stream position of the first event fed to this bucket.
    pub start: usize,
    /// Events fed so far.
    pub count: usize,
    pub state: PsState<W>,
}

impl<W: Scalar> Bucket<W> {
    pub fn first_output(&self) -> &W {
        self.state.w_prime()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowReport<W = Weight> {
    /// Stream position of the event just processed.
    pub t: usize,
    pub window_start: usize,
    pub window_len: usize,
    pub matching: Matching<W>,
    pub weight: W,
    /// 1 for the oldest bucket, 2 for the next one.
    pub source_bucket: usize,
    pub bucket_count: usize,
}

/// Per-step check of the space argument.
#[derive(Clone, Debug, PartialEq)]
pub struct BucketBound {
    pub k: usize,
    /// Largest odd number not above `k`.
    pub k_odd: usize,
    /// `(1 + beta)^((k_odd - 1) / 2) * W'(B_k_odd) < W'(B_1)`; vacuous when `k_odd == 1`.
    pub chain_holds: bool,
    /// `k <= 2 log_{1+beta}(alpha1 * sigma) + 3` with `sigma` the ratio of the
    /// extreme positive first outputs among current buckets.
    pub count_holds: bool,
}

impl BucketBound {
    pub fn holds(&self) -> bool {
        self.chain_holds && self.count_holds
    }
}

#[derive(Clone, Debug)]
pub struct WindowEngine<W = Weight> {
    params: WindowParams,
    buckets: Vec<Bucket<W>>,
    processed: usize,
    exec: Exec,
    beta: W,
    one_minus_beta: W,
}

fn pow<W: Scalar>(base: &W, exp: usize) -> W {
    (0..exp).fold(W::one(), |acc, _| acc * base.clone())
}

impl<W: Scalar> WindowEngine<W> {
    pub fn new(params: WindowParams) -> Self {
        Self::with_exec(params, Exec::default())
    }

    pub fn with_exec(params: WindowParams, exec: Exec) -> Self {
        let beta = W::from_weight(&params.beta);
        let one_minus_beta = W::one() - beta.clone();
        WindowEngine {
            params,
            buckets: Vec::new(),
            processed: 0,
            exec,
            beta,
            one_minus_beta,
        }
    }

    pub fn params(&self) -> &WindowParams {
        &self.params
    }

    pub fn buckets(&self) -> &[Bucket<W>] {
        &self.buckets
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn processed(&self) -> usize {
        self.processed
    }

    /// Length of the current window.
    pub fn window_len(&self) -> usize {
        self.params.window.min(self.processed)
    }

    /// Runs one full step for `e` and reports on the new window.
    pub fn on_edge(&mut self, e: &EdgeEvent<W>) -> Result<WindowReport<W>, WindowError> {
        let n = self.params.ps.vertices();
        for x in [e.u, e.v] {
            if x.0 >= n {
                return Err(PsError::VertexOutOfRange { vertex: x.0, n }.into());
            }
        }

        self.buckets.push(Bucket {
            start: self.processed,
            count: 0,
            state: PsState::new(self.params.ps.clone()),
        });
        let feed = |b: &mut Bucket<W>| {
            b.state.process(e).expect("endpoints validated");
            b.count += 1;
        };
        if self.buckets.len() >= PARALLEL_FEED_MIN_BUCKETS {
            self.exec.for_each_mut(&mut self.buckets, feed);
        } else {
            self.buckets.iter_mut().for_each(feed);
        }
        self.processed += 1;

        self.prune();

        if self.buckets.len() >= 2 && self.buckets[1].count >= self.params.window {
            self.buckets.remove(0);
        }

        Ok(self.report())
    }

    /// For each surviving bucket from the oldest, keep only the newest later
    /// bucket that is still similar and delete everything in between.
    fn prune(&mut self) {
        let mut i = 0;
        while i + 1 < self.buckets.len() {
            let threshold = self.one_minus_beta.clone() * self.buckets[i].first_output().clone();
            let j = (i + 1..self.buckets.len())
                .rev()
                .find(|&j| *self.buckets[j].first_output() >= threshold)
                .unwrap_or(i + 1);
            self.buckets.drain(i + 1..j);
            i += 1;
        }
    }

    fn report(&self) -> WindowReport<W> {
        let window_len = self.window_len();
        let oldest_is_window = self.buckets[0].count == window_len;
        let source = if self.buckets.len() == 1 || self.buckets[0].count == self.params.window {
            0
        } else if !self.params.strict_paper && oldest_is_window {
            // Warm-up: the oldest bucket holds exactly the stream so far.
            0
        } else {
            1
        };
        let matching = self.buckets[source].state.extract_matching();
        let t = self.processed - 1;
        WindowReport {
            t,
            window_start: window_start(t, self.params.window),
            window_len,
            weight: matching.total.clone(),
            matching,
            source_bucket: source + 1,
            bucket_count: self.buckets.len(),
        }
    }

    /// `B_2 ⊆ E ⊆ B_1` as suffixes of the stream.
    pub fn sandwich_holds(&self) -> bool {
        let e = self.window_len();
        match self.buckets.as_slice() {
            [] => self.processed == 0,
            [b1] => b1.count >= e,
            [b1, b2, ..] => b2.count <= e && e <= b1.count,
        }
    }

    /// `W'(B_{i+2}) < (1 - beta) W'(B_i)` for every `i`.
    pub fn separation_holds(&self) -> bool {
        self.buckets.windows(3).all(|w| {
            *w[2].first_output() < self.one_minus_beta.clone() * w[0].first_output().clone()
        })
    }

    /// Counts match `processed - start` and starts strictly increase.
    pub fn counts_consistent(&self) -> bool {
        self.buckets
            .iter()
            .all(|b| b.count == self.processed - b.start)
            && self.buckets.windows(2).all(|w| w[0].start < w[1].start)
    }

    pub fn bucket_bound(&self) -> BucketBound {
        let k = self.buckets.len();
        if k == 0 {
            return BucketBound {
                k,
                k_odd: 0,
                chain_holds: true,
                count_holds: true,
            };
        }
        let k_odd = if k % 2 == 1 { k } else { k - 1 };
        let one_plus_beta = W::one() + self.beta.clone();
        let first = self.buckets[0].first_output().clone();
        let chain_holds = k_odd == 1
            || pow(&one_plus_beta, (k_odd - 1) / 2)
                * self.buckets[k_odd - 1].first_output().clone()
                < first;

        let positive: Vec<&W> = self
            .buckets
            .iter()
            .map(|b| b.first_output())
            .filter(|w| **w > W::zero())
            .collect();
        let count_holds = k <= 3 || {
            let max = positive
                .iter()
                .fold(W::zero(), |m, w| if **w > m { (*w).clone() } else { m });
            let min = positive
                .iter()
                .fold(max.clone(), |m, w| if **w < m { (*w).clone() } else { m });
            // (k - 3) / 2 <= log_{1+beta}(alpha1 * max / min), squared to stay integral.
            let alpha1 = W::from_weight(&self.params.alpha1);
            let lhs = pow(&one_plus_beta, k - 3) * min.clone() * min;
            let scaled = alpha1 * max;
            lhs <= scaled.clone() * scaled
        };
        BucketBound {
            k,
            k_odd,
            chain_holds,
            count_holds,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Label, StreamSlice};
    use crate::ps;

    fn w(p: i64, q: i64) -> Weight {
        Weight::ratio(p, q)
    }

    fn stream(triples: &[(usize, usize, u64)]) -> StreamSlice {
        StreamSlice::from_triples(
            Label::Plain,
            triples.iter().map(|&(u, v, x)| (u, v, Weight::integer(x))),
        )
        .unwrap()
    }

    fn params(window: usize, n: usize) -> WindowParams {
        WindowParams::new(window, w(1, 10), n).unwrap()
    }

    #[test]
    fn new_engine_is_empty_with_default_beta() {
        let p = params(3, 4);
        assert_eq!(p.beta(), &w(1, 90));
        assert_eq!(p.alpha2(), w(5, 1));
        let e: WindowEngine = WindowEngine::new(p);
        assert_eq!(e.bucket_count(), 0);
        assert!(e.sandwich_holds());
    }

    #[test]
    fn parameter_errors() {
        assert_eq!(
            WindowParams::new(0, w(1, 10), 4),
            Err(WindowError::ZeroWindow)
        );
        assert!(matches!(
            params(3, 4).with_beta(w(1, 50)),
            Err(WindowError::BetaOutOfRange { .. })
        ));
        assert!(matches!(
            params(3, 4).with_beta(w(0, 1)),
            Err(WindowError::BetaOutOfRange { .. })
        ));
        assert!(params(3, 4).with_beta(w(1, 900)).is_ok());
        assert!(matches!(
            WindowParams::new(3, w(1, 5), 4),
            Err(WindowError::Ps(_))
        ));
    }

    #[test]
    fn one_bucket_after_first_event() {
        let mut e = WindowEngine::new(params(3, 4));
        let r = e.on_edge(&stream(&[(0, 1, 4)]).events[0]).unwrap();
        assert_eq!(e.bucket_count(), 1);
        assert_eq!(r.weight, Weight::integer(4));
        assert_eq!(r.source_bucket, 1);
    }

    #[test]
    fn unit_window_reports_newest_edge() {
        let s = stream(&[(0, 1, 4), (1, 2, 9), (0, 1, 2), (2, 3, 7), (0, 3, 1)]);
        let mut e = WindowEngine::new(params(1, 4));
        for ev in &s.events {
            let r = e.on_edge(ev).unwrap();
            assert_eq!(r.weight, ev.w);
            assert_eq!(r.window_len, 1);
            assert_eq!(e.bucket_count(), 1);
        }
    }

    #[test]
    fn warm_up_matches_single_run() {
        let s = stream(&[
            (0, 1, 4),
            (1, 2, 9),
            (0, 1, 2),
            (2, 3, 7),
            (0, 3, 1),
            (1, 3, 6),
        ]);
        let mut e = WindowEngine::new(params(50, 4));
        for (i, ev) in s.events.iter().enumerate() {
            let r = e.on_edge(ev).unwrap();
            let prefix = ps::run(e.params().ps(), &s.range(0..i + 1)).unwrap();
            assert_eq!(r.weight, prefix.extract_matching().total);
        }
    }

    #[test]
    fn strict_mode_reports_second_bucket_during_warm_up() {
        // The second edge is far heavier, so the first two buckets stay apart.
        let s = stream(&[(0, 1, 1), (2, 3, 100), (0, 2, 1)]);
        let mut strict = WindowEngine::new(params(10, 4).with_strict_paper(true));
        let mut lenient = WindowEngine::new(params(10, 4));
        let mut saw_difference = false;
        for ev in &s.events {
            let a = strict.on_edge(ev).unwrap();
            let b = lenient.on_edge(ev).unwrap();
            if a.bucket_count > 1 {
                assert_eq!(a.source_bucket, 2);
                assert_eq!(b.source_bucket, 1);
                saw_difference |= a.weight != b.weight;
            }
        }
        assert!(saw_difference);
    }

    #[test]
    fn repeated_parallel_edges_collapse() {
        let s = stream(&vec![(0, 1, 5); 40]);
        let mut e = WindowEngine::new(params(7, 2));
        for ev in &s.events {
            e.on_edge(ev).unwrap();
            assert!(e.bucket_count() <= 3, "k = {}", e.bucket_count());
            assert!(e.sandwich_holds());
        }
    }

    #[test]
    fn out_of_range_edge_leaves_engine_untouched() {
        let mut e = WindowEngine::new(params(3, 2));
        e.on_edge(&stream(&[(0, 1, 1)]).events[0]).unwrap();
        let bad = EdgeEvent::new(0, 7, Weight::integer(1), 1).unwrap();
        assert!(matches!(
            e.on_edge(&bad),
            Err(WindowError::Ps(PsError::VertexOutOfRange { .. }))
        ));
        assert_eq!(e.processed(), 1);
        assert_eq!(e.bucket_count(), 1);
    }

    #[test]
    fn invariants_on_escalating_stream() {
        let triples: Vec<_> = (0..30)
            .map(|i| (i % 5, (i % 5 + 1 + i % 3) % 6, 1 + (i as u64 * 7) % 23))
            .collect();
        let triples: Vec<_> = triples.into_iter().filter(|(u, v, _)| u != v).collect();
        let s = stream(&triples);
        let mut e = WindowEngine::new(params(6, 6));
        for ev in &s.events {
            e.on_edge(ev).unwrap();
            assert!(e.sandwich_holds());
            assert!(e.separation_holds());
            assert!(e.counts_consistent());
            assert!(e.bucket_bound().holds(), "{:?}", e.bucket_bound());
        }
    }

    #[test]
    fn float_engine_runs() {
        let s = stream(&[(0, 1, 4), (1, 2, 9), (0, 1, 2), (2, 3, 7)]).map_weights(|x| x.to_f64());
        let mut e: WindowEngine<f64> = WindowEngine::new(params(2, 4));
        let last = s
            .events
            .iter()
            .map(|ev| e.on_edge(ev).unwrap())
            .last()
            .unwrap();
        assert!(last.weight >= 7.0);
    }
}
