//! Local-ratio streaming matching with vertex potentials, reduced weights,
//! per-vertex stack trimming and a greedy unwind.
//!
//! An arriving edge `{u, v}` is discarded when `w < (1 + eps)(phi(u) + phi(v))`.
//! Otherwise it is pushed with reduced weight `w - phi(u) - phi(v)`, which is
//! added to both potentials and to the running total `W'`. A vertex whose
//! stacked degree exceeds the cap loses its oldest stacked edge; the reduced
//! weight of a trimmed edge stays counted. The matching is read off by popping
//! the stack newest first and keeping every edge that is still free.

use std::fmt;

use thiserror::Error;

use crate::graph::{EdgeEvent, Matching, StreamSlice, VertexId};
use crate::weight::{Scalar, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PsError {
    #[error("epsilon must satisfy 0 < eps <= 1/10, got {0}")]
    EpsilonOutOfRange(String),
    #[error("vertex {vertex} outside universe of size {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
}

/// Stacked-degree cap `floor(3 * log2(1/eps) / eps) + 1`.
pub fn degree_cap(epsilon: &Weight) -> usize {
    let inv = (Weight::integer(1) / epsilon.clone()).to_f64();
    (3.0 * inv.log2() * inv).floor() as usize + 1
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsParams {
    epsilon: Weight,
    n: usize,
    degree_cap: usize,
}

impl PsParams {
    pub fn new(epsilon: Weight, n: usize) -> Result<Self, PsError> {
        if epsilon == Weight::default() || epsilon > Weight::ratio(1, 10) {
            return Err(PsError::EpsilonOutOfRange(epsilon.to_string()));
        }
        let degree_cap = degree_cap(&epsilon);
        Ok(PsParams {
            epsilon,
            n,
            degree_cap,
        })
    }

    pub fn epsilon(&self) -> &Weight {
        &self.epsilon
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StackEntry<W = Weight> {
    pub edge: EdgeEvent<W>,
    pub reduced: W,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Pushed,
    Discarded,
}

/// One processed event, as emitted by traced runs.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord<W = Weight> {
    pub t: usize,
    pub u: VertexId,
    pub v: VertexId,
    pub w: W,
    pub decision: Decision,
    /// Reduced weight assigned to this edge (zero when discarded).
    pub reduced: W,
    pub phi_u: W,
    pub phi_v: W,
    pub stack_len: usize,
    pub w_prime: W,
    /// Arrival indices of edges trimmed from the stack by this step.
    pub trimmed: Vec<usize>,
}

impl<W: Scalar> fmt::Display for TraceRecord<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let decision = match self.decision {
            Decision::Pushed => "pushed",
            Decision::Discarded => "discarded",
        };
        write!(
            f,
            "{},{},{},{},{},{},{},{},{},{}",
            self.t,
            self.u,
            self.v,
            self.w,
            decision,
            self.reduced,
            self.phi_u,
            self.phi_v,
            self.stack_len,
            self.w_prime
        )
    }
}

pub const TRACE_HEADER: &str = "t,u,v,w,decision,w_reduced,phi_u,phi_v,stack_len,w_prime";

/// Run state of one streaming instance.
#[derive(Clone, Debug, PartialEq)]
pub struct PsState<W = Weight> {
    params: PsParams,
    one_plus_eps: W,
    phi: Vec<W>,
    stack: Vec<StackEntry<W>>,
    w_prime_sum: W,
    per_vertex_count: Vec<usize>,
    seen: usize,
}

impl<W: Scalar> PsState<W> {
    pub fn new(params: PsParams) -> Self {
        let one_plus_eps = W::one() + W::from_weight(&params.epsilon);
        PsState {
            one_plus_eps,
            phi: vec![W::zero(); params.n],
            stack: Vec::new(),
            w_prime_sum: W::zero(),
            per_vertex_count: vec![0; params.n],
            seen: 0,
            params,
        }
    }

    pub fn params(&self) -> &PsParams {
        &self.params
    }

    pub fn phi(&self, v: VertexId) -> &W {
        &self.phi[v.0]
    }

    pub fn potentials(&self) -> &[W] {
        &self.phi
    }

    pub fn stack(&self) -> &[StackEntry<W>] {
        &self.stack
    }

    /// Sum of every reduced weight assigned so far, trimmed edges included.
    pub fn w_prime(&self) -> &W {
        &self.w_prime_sum
    }

    pub fn seen(&self) -> usize {
        self.seen
    }

    pub fn per_vertex_count(&self, v: VertexId) -> usize {
        self.per_vertex_count[v.0]
    }

    pub fn max_stacked_degree(&self) -> usize {
        self.per_vertex_count.iter().copied().max().unwrap_or(0)
    }

    pub fn phi_sum(&self) -> W {
        self.phi.iter().fold(W::zero(), |acc, p| acc + p.clone())
    }

    fn check_vertex(&self, x: VertexId) -> Result<(), PsError> {
        if x.0 >= self.params.n {
            return Err(PsError::VertexOutOfRange {
                vertex: x.0,
                n: self.params.n,
            });
        }
        Ok(())
    }

    /// Processes one arriving edge.
    pub fn process(&mut self, e: &EdgeEvent<W>) -> Result<TraceRecord<W>, PsError> {
        self.check_vertex(e.u)?;
        self.check_vertex(e.v)?;
        self.seen += 1;

        let (u, v) = (e.u.0, e.v.0);
        let potential = self.phi[u].clone() + self.phi[v].clone();
        let mut trimmed = Vec::new();
        let (decision, reduced) = if e.w < self.one_plus_eps.clone() * potential.clone() {
            (Decision::Discarded, W::zero())
        } else {
            let reduced = e.w.clone() - potential;
            self.phi[u] = self.phi[u].clone() + reduced.clone();
            self.phi[v] = self.phi[v].clone() + reduced.clone();
            self.w_prime_sum = self.w_prime_sum.clone() + reduced.clone();
            self.stack.push(StackEntry {
                edge: e.clone(),
                reduced: reduced.clone(),
            });
            self.per_vertex_count[u] += 1;
            self.per_vertex_count[v] += 1;
            for x in [e.u, e.v] {
                if self.per_vertex_count[x.0] > self.params.degree_cap {
                    trimmed.push(self.trim_oldest(x));
                }
            }
            (Decision::Pushed, reduced)
        };

        Ok(TraceRecord {
            t: e.t,
            u: e.u,
            v: e.v,
            w: e.w.clone(),
            decision,
            reduced,
            phi_u: self.phi[u].clone(),
            phi_v: self.phi[v].clone(),
            stack_len: self.stack.len(),
            w_prime: self.w_prime_sum.clone(),
            trimmed,
        })
    }

    /// Removes the oldest stacked edge adjacent to `x`. Stack order is
    /// arrival order, so that is the first match from the bottom.
    fn trim_oldest(&mut self, x: VertexId) -> usize {
        let pos = self
            .stack
            .iter()
            .position(|s| s.edge.touches(x))
            .expect("stacked degree above cap implies an adjacent edge");
        let entry = self.stack.remove(pos);
        self.per_vertex_count[entry.edge.u.0] -= 1;
        self.per_vertex_count[entry.edge.v.0] -= 1;
        entry.edge.t
    }

    /// Feeds every event of `s` in order.
    pub fn extend(&mut self, s: &StreamSlice<W>) -> Result<(), PsError> {
        for e in &s.events {
            self.process(e)?;
        }
        Ok(())
    }

    /// Greedy matching over the stack, newest edge first. Leaves the state untouched.
    pub fn extract_matching(&self) -> Matching<W> {
        let mut used = vec![false; self.params.n];
        let mut edges = Vec::new();
        for entry in self.stack.iter().rev() {
            let (u, v) = (entry.edge.u.0, entry.edge.v.0);
            if !used[u] && !used[v] {
                used[u] = true;
                used[v] = true;
                edges.push(entry.edge.clone());
            }
        }
        Matching::from_edges(edges)
    }
}

pub fn run<W: Scalar>(params: &PsParams, s: &StreamSlice<W>) -> Result<PsState<W>, PsError> {
    let mut state = PsState::new(params.clone());
    state.extend(s)?;
    Ok(state)
}

/// [`run`] that also returns one trace record per event.
pub fn run_traced<W: Scalar>(
    params: &PsParams,
    s: &StreamSlice<W>,
) -> Result<(PsState<W>, Vec<TraceRecord<W>>), PsError> {
    let mut state = PsState::new(params.clone());
    let trace = s
        .events
        .iter()
        .map(|e| state.process(e))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((state, trace))
}

/// Monotonic variant: re-extracts the greedy matching after every push and
/// keeps the heaviest one seen. Trims alone do not trigger a re-extraction.
pub fn run_monotonic<W: Scalar>(
    params: &PsParams,
    s: &StreamSlice<W>,
) -> Result<(PsState<W>, Matching<W>), PsError> {
    let mut state = PsState::new(params.clone());
    let mut best = Matching::empty();
    for e in &s.events {
        if state.process(e)?.decision == Decision::Pushed {
            let m = state.extract_matching();
            if m.total > best.total {
                best = m;
            }
        }
    }
    Ok((state, best))
}

/// Smoothness test `on_b >= (1 - beta) * on_ab`, evaluated exactly for exact scalars.
pub fn check_lookahead_condition<W: Scalar>(on_b: &W, on_ab: &W, beta: &W) -> bool {
    *on_b >= (W::one() - beta.clone()) * on_ab.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Label;

    fn w(p: i64, q: i64) -> Weight {
        Weight::ratio(p, q)
    }

    fn params(n: usize) -> PsParams {
        PsParams::new(w(1, 10), n).unwrap()
    }

    fn slice(edges: &[(usize, usize, Weight)]) -> StreamSlice {
        StreamSlice::from_triples(Label::Plain, edges.iter().cloned()).unwrap()
    }

    #[test]
    fn degree_cap_values() {
        assert_eq!(degree_cap(&w(1, 10)), 100);
        assert_eq!(degree_cap(&w(1, 16)), 193);
        assert_eq!(degree_cap(&w(1, 100)), 1994);
    }

    #[test]
    fn rejects_bad_epsilon() {
        assert!(matches!(
            PsParams::new(w(1, 2), 4),
            Err(PsError::EpsilonOutOfRange(_))
        ));
        assert!(matches!(
            PsParams::new(w(0, 1), 4),
            Err(PsError::EpsilonOutOfRange(_))
        ));
        assert!(PsParams::new(w(1, 10), 4).is_ok());
    }

    #[test]
    fn fresh_state() {
        let s: PsState = PsState::new(params(4));
        assert_eq!(s.w_prime(), &Weight::default());
        assert!(s.stack().is_empty());
        let m = s.extract_matching();
        assert!(m.is_empty());
        assert_eq!(m.total, Weight::default());
    }

    #[test]
    fn first_edge_is_pushed_at_full_weight() {
        let mut s = PsState::new(params(4));
        let rec = s
            .process(&EdgeEvent::new(0, 1, w(5, 1), 0).unwrap())
            .unwrap();
        assert_eq!(rec.decision, Decision::Pushed);
        assert_eq!(rec.reduced, w(5, 1));
        assert_eq!(s.phi(VertexId(0)), &w(5, 1));
        assert_eq!(s.phi(VertexId(1)), &w(5, 1));
        assert_eq!(s.w_prime(), &w(5, 1));
    }

    #[test]
    fn path_example_step_by_step() {
        // a=0, b=1, c=2, d=3
        let s = slice(&[(0, 1, w(1, 1)), (1, 2, w(3, 1)), (2, 3, w(1, 1))]);
        let (state, trace) = run_traced(&params(4), &s).unwrap();
        assert_eq!(trace[0].decision, Decision::Pushed);
        assert_eq!(trace[0].reduced, w(1, 1));
        assert_eq!(trace[1].decision, Decision::Pushed);
        assert_eq!(trace[1].reduced, w(2, 1));
        assert_eq!(
            (trace[1].phi_u.clone(), trace[1].phi_v.clone()),
            (w(3, 1), w(2, 1))
        );
        assert_eq!(trace[2].decision, Decision::Discarded);
        assert_eq!(state.w_prime(), &w(3, 1));
        let stacked: Vec<usize> = state.stack().iter().map(|e| e.edge.t).collect();
        assert_eq!(stacked, vec![0, 1]);
        let m = state.extract_matching();
        assert_eq!(m.total, w(3, 1));
        assert_eq!(m.edges.len(), 1);
        assert_eq!(m.edges[0].t, 1);
    }

    #[test]
    fn equality_pushes() {
        // phi(1) = 1 after the first edge; 11/10 = (1 + 1/10) * (1 + 0).
        let s = slice(&[(0, 1, w(1, 1)), (1, 2, w(11, 10))]);
        let (state, trace) = run_traced(&params(3), &s).unwrap();
        assert_eq!(trace[1].decision, Decision::Pushed);
        assert_eq!(trace[1].reduced, w(1, 10));
        assert_eq!(state.stack().len(), 2);
    }

    #[test]
    fn just_below_threshold_discards() {
        let s = slice(&[(0, 1, w(1, 1)), (1, 2, w(109, 100))]);
        let (_, trace) = run_traced(&params(3), &s).unwrap();
        assert_eq!(trace[1].decision, Decision::Discarded);
        assert_eq!(trace[1].reduced, Weight::default());
    }

    #[test]
    fn out_of_range_vertex_is_an_error() {
        let mut s = PsState::new(params(2));
        let e = EdgeEvent::new(0, 5, w(1, 1), 0).unwrap();
        assert_eq!(
            s.process(&e),
            Err(PsError::VertexOutOfRange { vertex: 5, n: 2 })
        );
    }

    #[test]
    fn extraction_is_non_destructive() {
        let s = slice(&[(0, 1, w(1, 1)), (2, 3, w(2, 1))]);
        let state = run(&params(4), &s).unwrap();
        let before = state.clone();
        assert_eq!(state.extract_matching(), state.extract_matching());
        assert_eq!(state, before);
    }

    #[test]
    fn trimming_keeps_potentials_and_drops_oldest() {
        // Star with geometric weights: every edge is pushed at the center.
        let p = params(1 + 110);
        let cap = p.degree_cap();
        let mut state = PsState::new(p);
        let ratio = w(11, 10);
        for k in 0..(cap + 5) {
            let e = EdgeEvent::new(0, k + 1, ratio.pow(k as u32), k).unwrap();
            let rec = state.process(&e).unwrap();
            assert_eq!(rec.decision, Decision::Pushed);
            if k >= cap {
                assert_eq!(rec.trimmed, vec![k - cap]);
            } else {
                assert!(rec.trimmed.is_empty());
            }
            assert!(state.per_vertex_count(VertexId(0)) <= cap);
            assert_eq!(
                state.phi_sum(),
                state.w_prime().clone() + state.w_prime().clone()
            );
        }
        assert_eq!(state.stack().len(), cap);
        assert_eq!(state.stack()[0].edge.t, 5);
        // The center potential equals the last (heaviest) weight.
        assert_eq!(state.phi(VertexId(0)), &ratio.pow((cap + 4) as u32));
    }

    #[test]
    fn monotonic_keeps_single_heavy_edge() {
        let mut edges = vec![(0, 1, w(100, 1))];
        for _ in 0..5 {
            edges.push((0, 2, w(1, 1)));
            edges.push((1, 3, w(2, 1)));
        }
        let (_, best) = run_monotonic(&params(4), &slice(&edges)).unwrap();
        assert_eq!(best.total, w(100, 1));
        assert_eq!(best.edges.len(), 1);
    }

    #[test]
    fn lookahead_condition() {
        assert!(check_lookahead_condition(&w(10, 1), &w(10, 1), &w(1, 2)));
        assert!(check_lookahead_condition(&w(9, 1), &w(10, 1), &w(1, 10)));
        assert!(!check_lookahead_condition(&w(8, 1), &w(10, 1), &w(1, 10)));
        // W'_B = 6/5, W'_AB = 11/5, beta = 1/90.
        assert!(!check_lookahead_condition(&w(6, 5), &w(11, 5), &w(1, 90)));
    }

    #[test]
    fn trace_record_format() {
        let s = slice(&[(0, 1, w(1, 1)), (1, 2, w(3, 1))]);
        let (_, trace) = run_traced(&params(3), &s).unwrap();
        assert_eq!(trace[1].to_string(), "1,1,2,3,pushed,2,3,2,2,3");
    }
}
