//! Exhaustive audit of the two-output smoothness guarantee on small streams.
//!
//! For a stream `S` and a cut `S = A B C`, the guarantee is: whenever the
//! first output satisfies `first(B) >= (1 - beta) * first(AB)`, the second
//! output on `BC` is within `alpha2` of the optimum on `ABC`. The audit checks
//! this for every requested cut against the exact oracle, and additionally
//! checks `W'(S) <= MWM(S) <= alpha1 * W'(S)`.

use crate::exec::Exec;
use crate::graph::StreamSlice;
use crate::oracle::{exact_mwm, OracleError, OracleLimits};
use crate::ps::{self, check_lookahead_condition, PsParams};
use crate::weight::{Scalar, Weight};
use crate::window::WindowParams;

/// Which quantities play the two outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputPair {
    /// First output `W'`, second output the greedy matching weight.
    Refined,
    /// Both outputs are the greedy matching weight.
    Standard,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditParams {
    pub ps: PsParams,
    pub beta: Weight,
    pub alpha1: Weight,
    pub alpha2: Weight,
    pub outputs: OutputPair,
}

impl AuditParams {
    pub fn refined(params: &WindowParams) -> Self {
        AuditParams {
            ps: params.ps().clone(),
            beta: params.beta().clone(),
            alpha1: params.alpha1().clone(),
            alpha2: params.alpha2(),
            outputs: OutputPair::Refined,
        }
    }

    /// Matching weight as both outputs, checked against `alpha`.
    pub fn standard(params: &WindowParams, alpha: Weight) -> Self {
        AuditParams {
            outputs: OutputPair::Standard,
            alpha2: alpha,
            ..Self::refined(params)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitOutcome<W = Weight> {
    /// `A = s[..a]`, `B = s[a..b]`, `C = s[b..]`.
    pub a: usize,
    pub b: usize,
    pub first_b: W,
    pub first_ab: W,
    pub condition: bool,
    pub second_bc: W,
    /// `MWM(ABC) / second(BC)`, when the denominator is positive.
    pub ratio: Option<W>,
    /// Only meaningful when `condition` holds.
    pub guarantee_holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport<W = Weight> {
    pub optimum: W,
    pub w_prime: W,
    /// `W'(S) <= MWM(S) <= alpha1 * W'(S)`; `None` for [`OutputPair::Standard`].
    pub first_output_bound: Option<bool>,
    pub splits: Vec<SplitOutcome<W>>,
}

impl<W: Scalar> AuditReport<W> {
    pub fn conditioned(&self) -> impl Iterator<Item = &SplitOutcome<W>> {
        self.splits.iter().filter(|s| s.condition)
    }

    pub fn violations(&self) -> usize {
        let split_failures = self.conditioned().filter(|s| !s.guarantee_holds).count();
        split_failures + usize::from(self.first_output_bound == Some(false))
    }

    /// Largest ratio over cuts where the condition holds.
    pub fn max_conditioned_ratio(&self) -> Option<W> {
        self.conditioned()
            .filter_map(|s| s.ratio.clone())
            .fold(None, |best, r| match best {
                Some(b) if b >= r => Some(b),
                _ => Some(r),
            })
    }
}

/// Every cut `0 <= a <= b <= m`.
pub fn all_splits(m: usize) -> Vec<(usize, usize)> {
    (0..=m).flat_map(|a| (a..=m).map(move |b| (a, b))).collect()
}

fn outputs<W: Scalar>(params: &PsParams, pair: OutputPair, s: &StreamSlice<W>) -> (W, W) {
    let state = ps::run(params, s).expect("stream validated against universe");
    let second = state.extract_matching().total;
    match pair {
        OutputPair::Refined => (state.w_prime().clone(), second),
        OutputPair::Standard => (second.clone(), second),
    }
}

pub fn refined_lookahead_audit<W: Scalar>(
    s: &StreamSlice<W>,
    splits: &[(usize, usize)],
    params: &AuditParams,
    limits: &OracleLimits,
    exec: Exec,
) -> Result<AuditReport<W>, AuditError> {
    let n = params.ps.vertices();
    if let Some(e) = s.events.iter().find(|e| e.u.0 >= n || e.v.0 >= n) {
        return Err(AuditError::VertexOutOfRange {
            vertex: e.u.0.max(e.v.0),
            n,
        });
    }
    if let Some(&(a, b)) = splits.iter().find(|&&(a, b)| a > b || b > s.len()) {
        return Err(AuditError::BadSplit { a, b, len: s.len() });
    }
    let optimum = exact_mwm(&s.events, limits)?.total;
    let w_prime = ps::run(&params.ps, s).expect("validated").w_prime().clone();

    let alpha1 = W::from_weight(&params.alpha1);
    let alpha2 = W::from_weight(&params.alpha2);
    let beta = W::from_weight(&params.beta);
    let first_output_bound = match params.outputs {
        OutputPair::Refined => Some(w_prime <= optimum && optimum <= alpha1 * w_prime.clone()),
        OutputPair::Standard => None,
    };

    let m = s.len();
    let splits = exec.map(splits, |&(a, b)| {
        let (first_b, _) = outputs(&params.ps, params.outputs, &s.range(a..b));
        let (first_ab, _) = outputs(&params.ps, params.outputs, &s.range(0..b));
        let (_, second_bc) = outputs(&params.ps, params.outputs, &s.range(a..m));
        let condition = check_lookahead_condition(&first_b, &first_ab, &beta);
        let guarantee_holds = second_bc <= optimum && optimum <= alpha2.clone() * second_bc.clone();
        let ratio = (second_bc > W::zero()).then(|| optimum.clone() / second_bc.clone());
        SplitOutcome {
            a,
            b,
            first_b,
            first_ab,
            condition,
            second_bc,
            ratio,
            guarantee_holds,
        }
    });
    Ok(AuditReport {
        optimum,
        w_prime,
        first_output_bound,
        splits,
    })
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum AuditError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("vertex {vertex} outside universe of size {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("split ({a}, {b}) invalid for stream of length {len}")]
    BadSplit { a: usize, b: usize, len: usize },
}
