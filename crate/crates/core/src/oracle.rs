//! Exact maximum-weight matching for small edge sets.
//!
//! [`exact_mwm`] is a branch-and-bound search; [`enumerate_matchings`] is a
//! plain subset enumeration kept deliberately naive so the two can check
//! each other.

use std::cmp::Ordering;
use std::collections::HashMap;

use thiserror::Error;

use crate::exec::Exec;
use crate::graph::{window, EdgeEvent, Matching, StreamSlice};
use crate::weight::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle limit exceeded: {edges} edges (max {max_edges}), {vertices} vertices (max {max_vertices})")]
    LimitExceeded {
        edges: usize,
        vertices: usize,
        max_edges: usize,
        max_vertices: usize,
    },
    #[error("window length must be at least 1")]
    ZeroWindow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_edges: usize,
    pub max_vertices: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_edges: 24,
            max_vertices: 20,
        }
    }
}

/// Largest input the subset enumerator accepts.
pub const ENUMERATION_MAX_EDGES: usize = 16;

impl OracleLimits {
    fn check<W>(&self, edges: &[EdgeEvent<W>]) -> Result<(), OracleError> {
        let vertices = distinct_vertices(edges);
        if edges.len() > self.max_edges || vertices > self.max_vertices {
            return Err(OracleError::LimitExceeded {
                edges: edges.len(),
                vertices,
                max_edges: self.max_edges,
                max_vertices: self.max_vertices,
            });
        }
        Ok(())
    }
}

fn distinct_vertices<W>(edges: &[EdgeEvent<W>]) -> usize {
    let mut seen: Vec<usize> = edges.iter().flat_map(|e| [e.u.0, e.v.0]).collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

struct Search<'a, W> {
    /// Edge indices by weight descending, input index ascending.
    by_weight: Vec<usize>,
    ends: Vec<(usize, usize)>,
    /// Endpoint each edge is charged to in the upper bound: the one with
    /// larger degree, so a star bounds to its heaviest edge.
    owner: Vec<usize>,
    edges: &'a [EdgeEvent<W>],
    used: Vec<bool>,
    stamp: Vec<u64>,
    generation: u64,
    chosen: Vec<usize>,
    best: Vec<usize>,
    best_weight: W,
}

impl<W: Scalar> Search<'_, W> {
    fn free(&self, i: usize) -> bool {
        let (a, b) = self.ends[i];
        !self.used[a] && !self.used[b]
    }

    /// `current` plus, for every vertex, the heaviest free edge charged to it
    /// among edges at rank `from` or later with input index `min_index` or later.
    /// A matching uses at most one edge per vertex, so this bounds any completion.
    fn bound(&mut self, current: &W, from: usize, min_index: usize) -> W {
        self.generation += 1;
        let mut acc = current.clone();
        for r in from..self.by_weight.len() {
            let i = self.by_weight[r];
            if i < min_index || !self.free(i) {
                continue;
            }
            let o = self.owner[i];
            if self.stamp[o] != self.generation {
                self.stamp[o] = self.generation;
                acc = acc + self.edges[i].w.clone();
            }
        }
        acc
    }

    fn take(&mut self, i: usize) {
        let (a, b) = self.ends[i];
        self.used[a] = true;
        self.used[b] = true;
        self.chosen.push(i);
    }

    fn untake(&mut self, i: usize) {
        let (a, b) = self.ends[i];
        self.used[a] = false;
        self.used[b] = false;
        self.chosen.pop();
    }

    /// Finds the optimum weight, branching heaviest edge first.
    fn optimum(&mut self, pos: usize, current: W) {
        if pos == self.by_weight.len() {
            if current > self.best_weight {
                self.best_weight = current;
                self.best = self.chosen.clone();
                self.best.sort_unstable();
            }
            return;
        }
        if self.bound(&current, pos, 0) <= self.best_weight {
            return;
        }
        let i = self.by_weight[pos];
        if self.free(i) {
            self.take(i);
            self.optimum(pos + 1, current.clone() + self.edges[i].w.clone());
            self.untake(i);
        }
        self.optimum(pos + 1, current);
    }

    /// First matching of weight `target` in input-index order, taking before
    /// skipping. With positive weights no optimum is a prefix of another, so
    /// this is the lexicographically smallest optimal index set.
    fn smallest(&mut self, idx: usize, current: W, target: &W) -> bool {
        if current >= *target {
            self.best = self.chosen.clone();
            return true;
        }
        if idx == self.edges.len() || self.bound(&current, 0, idx) < *target {
            return false;
        }
        if self.free(idx) {
            self.take(idx);
            if self.smallest(idx + 1, current.clone() + self.edges[idx].w.clone(), target) {
                return true;
            }
            self.untake(idx);
        }
        self.smallest(idx + 1, current, target)
    }
}

/// Maximum-weight matching by branch-and-bound.
///
/// Among equal-weight optima the one whose sorted input-index set is
/// lexicographically smallest is returned. Output edges are in input order.
pub fn exact_mwm<W: Scalar>(
    edges: &[EdgeEvent<W>],
    limits: &OracleLimits,
) -> Result<Matching<W>, OracleError> {
    limits.check(edges)?;
    let mut dense = HashMap::new();
    let ends: Vec<(usize, usize)> = edges
        .iter()
        .map(|e| {
            let next = dense.len();
            let a = *dense.entry(e.u.0).or_insert(next);
            let next = dense.len();
            let b = *dense.entry(e.v.0).or_insert(next);
            (a, b)
        })
        .collect();
    let mut degree = vec![0usize; dense.len()];
    for &(a, b) in &ends {
        degree[a] += 1;
        degree[b] += 1;
    }
    let owner = ends
        .iter()
        .map(|&(a, b)| {
            if (degree[b], a) > (degree[a], b) {
                b
            } else {
                a
            }
        })
        .collect();
    let mut by_weight: Vec<usize> = (0..edges.len()).collect();
    by_weight.sort_by(|&x, &y| {
        edges[y]
            .w
            .partial_cmp(&edges[x].w)
            .unwrap_or(Ordering::Equal)
            .then(x.cmp(&y))
    });
    let mut search = Search {
        by_weight,
        ends,
        owner,
        edges,
        used: vec![false; dense.len()],
        stamp: vec![0; dense.len()],
        generation: 0,
        chosen: Vec::new(),
        best: Vec::new(),
        best_weight: W::zero(),
    };
    search.optimum(0, W::zero());
    let target = search.best_weight.clone();
    // Inexact scalars may miss the target through rounding; keep the first optimum then.
    let fallback = std::mem::take(&mut search.best);
    if !search.smallest(0, W::zero(), &target) {
        search.best = fallback;
    }
    Ok(Matching::from_edges(
        search.best.iter().map(|&i| edges[i].clone()).collect(),
    ))
}

/// Exact optimum of every window of length `len` along `s`.
pub fn exact_window_weights<W: Scalar>(
    s: &StreamSlice<W>,
    len: usize,
    limits: &OracleLimits,
) -> Result<Vec<W>, OracleError> {
    exact_window_weights_with(Exec::default(), s, len, limits)
}

pub fn exact_window_weights_with<W: Scalar>(
    exec: Exec,
    s: &StreamSlice<W>,
    len: usize,
    limits: &OracleLimits,
) -> Result<Vec<W>, OracleError> {
    if len == 0 {
        return Err(OracleError::ZeroWindow);
    }
    let positions: Vec<usize> = (0..s.len()).collect();
    exec.map(&positions, |&i| {
        let w = window(s, i, len).expect("position within stream");
        exact_mwm(&w.events, limits).map(|m| m.total)
    })
    .into_iter()
    .collect()
}

/// Result of exhaustive enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct Enumeration<W> {
    /// Number of matchings, the empty one included.
    pub count: u64,
    pub max_weight: W,
}

/// Checks every subset of `edges` for being a matching.
pub fn enumerate_matchings<W: Scalar>(
    edges: &[EdgeEvent<W>],
) -> Result<Enumeration<W>, OracleError> {
    if edges.len() > ENUMERATION_MAX_EDGES {
        return Err(OracleError::LimitExceeded {
            edges: edges.len(),
            vertices: distinct_vertices(edges),
            max_edges: ENUMERATION_MAX_EDGES,
            max_vertices: usize::MAX,
        });
    }
    let m = edges.len();
    let mut count = 0;
    let mut max_weight = W::zero();
    'subsets: for mask in 0u32..(1u32 << m) {
        let mut total = W::zero();
        let mut picked: Vec<&EdgeEvent<W>> = Vec::new();
        for (i, e) in edges.iter().enumerate() {
            if mask & (1 << i) != 0 {
                if picked.iter().any(|p| p.shares_endpoint(e)) {
                    continue 'subsets;
                }
                picked.push(e);
                total = total + e.w.clone();
            }
        }
        count += 1;
        if total > max_weight {
            max_weight = total;
        }
    }
    Ok(Enumeration { count, max_weight })
}
