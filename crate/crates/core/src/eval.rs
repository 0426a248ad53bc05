//! Replays a stream through the window engine and compares every report
//! with the exact optimum of its window.

use thiserror::Error;

use crate::exec::Exec;
use crate::graph::StreamSlice;
use crate::oracle::{exact_window_weights_with, OracleError, OracleLimits};
use crate::weight::{Scalar, Weight};
use crate::window::{BucketBound, WindowEngine, WindowError, WindowParams, WindowReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// One processed event together with the engine's self-checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Step<W = Weight> {
    pub report: WindowReport<W>,
    pub bound: BucketBound,
    /// Sandwich, separation and count consistency all hold.
    pub invariants_hold: bool,
}

/// Feeds every event and records the report plus invariant checks.
pub fn replay<W: Scalar>(
    stream: &StreamSlice<W>,
    params: &WindowParams,
    exec: Exec,
) -> Result<Vec<Step<W>>, WindowError> {
    let mut engine = WindowEngine::with_exec(params.clone(), exec);
    stream
        .events
        .iter()
        .map(|e| {
            let report = engine.on_edge(e)?;
            Ok(Step {
                report,
                bound: engine.bucket_bound(),
                invariants_hold: engine.sandwich_holds()
                    && engine.separation_holds()
                    && engine.counts_consistent(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalRow<W = Weight> {
    pub step: Step<W>,
    pub oracle: W,
    /// `oracle / reported`.
    pub ratio: W,
    /// Whether the approximation guarantee applies to this window.
    pub audited: bool,
    /// The reported matching is valid, lies inside the window and does not
    /// exceed the optimum.
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalSummary<W = Weight> {
    pub windows: usize,
    pub audited_windows: usize,
    pub max_ratio: Option<W>,
    pub max_bucket_count: usize,
    /// Audited windows with `oracle > alpha2 * reported`.
    pub ratio_violations: usize,
    pub bound_violations: usize,
    pub invariant_violations: usize,
    pub infeasible_reports: usize,
}

impl<W> EvalSummary<W> {
    pub fn violations(&self) -> usize {
        self.ratio_violations
            + self.bound_violations
            + self.invariant_violations
            + self.infeasible_reports
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation<W = Weight> {
    pub rows: Vec<EvalRow<W>>,
    pub summary: EvalSummary<W>,
}

/// Replays `stream` and scores every window against the exact oracle.
///
/// With strict reporting only windows that are already full are audited.
pub fn evaluate<W: Scalar>(
    stream: &StreamSlice<W>,
    params: &WindowParams,
    limits: &OracleLimits,
    exec: Exec,
) -> Result<Evaluation<W>, EvalError> {
    let steps = replay(stream, params, exec)?;
    let optima = exact_window_weights_with(exec, stream, params.window(), limits)?;
    let alpha2 = W::from_weight(&params.alpha2());

    let rows: Vec<EvalRow<W>> = steps
        .into_iter()
        .zip(optima)
        .map(|(step, oracle)| {
            let r = &step.report;
            let audited = !params.strict_paper() || r.t + 1 >= params.window();
            let inside = r
                .matching
                .edges
                .iter()
                .all(|e| e.t >= r.window_start && e.t <= r.t);
            let feasible = r.matching.is_valid() && inside && r.weight <= oracle;
            let ratio = if r.weight > W::zero() {
                oracle.clone() / r.weight.clone()
            } else {
                W::zero()
            };
            EvalRow {
                step,
                oracle,
                ratio,
                audited,
                feasible,
            }
        })
        .collect();

    let mut summary = EvalSummary {
        windows: rows.len(),
        audited_windows: 0,
        max_ratio: None,
        max_bucket_count: 0,
        ratio_violations: 0,
        bound_violations: 0,
        invariant_violations: 0,
        infeasible_reports: 0,
    };
    for row in &rows {
        let r = &row.step.report;
        summary.max_bucket_count = summary.max_bucket_count.max(r.bucket_count);
        summary.bound_violations += usize::from(!row.step.bound.holds());
        summary.invariant_violations += usize::from(!row.step.invariants_hold);
        summary.infeasible_reports += usize::from(!row.feasible);
        if row.audited {
            summary.audited_windows += 1;
            if row.oracle > alpha2.clone() * r.weight.clone() {
                summary.ratio_violations += 1;
            }
            if summary.max_ratio.as_ref().is_none_or(|m| row.ratio > *m) {
                summary.max_ratio = Some(row.ratio.clone());
            }
        }
    }
    Ok(Evaluation { rows, summary })
}
