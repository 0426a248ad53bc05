//! Stream items, matchings and stream slicing.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::weight::{Scalar, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("edge weight must be positive, got {0}")]
    NonPositiveWeight(String),
    #[error("vertex {vertex} outside universe of size {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("window position {index} out of range for stream of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("window length must be at least 1")]
    ZeroWindow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Substream tag carried by each event so concatenated streams can be split again.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Label {
    A,
    B,
    C,
    #[default]
    Plain,
}

impl Label {
    pub fn as_str(self) -> Option<&'static str> {
        match self {
            Label::A => Some("A"),
            Label::B => Some("B"),
            Label::C => Some("C"),
            Label::Plain => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeEvent<W = Weight> {
    pub u: VertexId,
    pub v: VertexId,
    pub w: W,
    /// 0-based arrival index.
    pub t: usize,
    pub label: Label,
}

impl<W: Scalar> EdgeEvent<W> {
    pub fn new(u: usize, v: usize, w: W, t: usize) -> Result<Self, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if w <= W::zero() {
            return Err(GraphError::NonPositiveWeight(w.to_string()));
        }
        Ok(EdgeEvent {
            u: VertexId(u),
            v: VertexId(v),
            w,
            t,
            label: Label::Plain,
        })
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = label;
        self
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    pub fn shares_endpoint(&self, other: &EdgeEvent<W>) -> bool {
        self.touches(other.u) || self.touches(other.v)
    }

    /// Same event with the weight converted to another scalar type.
    pub fn map_weight<V: Scalar>(&self, f: impl FnOnce(&W) -> V) -> EdgeEvent<V> {
        EdgeEvent {
            u: self.u,
            v: self.v,
            w: f(&self.w),
            t: self.t,
            label: self.label,
        }
    }
}

/// A vertex-disjoint edge set and its total weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Matching<W = Weight> {
    pub edges: Vec<EdgeEvent<W>>,
    pub total: W,
}

impl<W: Scalar> Default for Matching<W> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<W: Scalar> Matching<W> {
    pub fn empty() -> Self {
        Matching {
            edges: Vec::new(),
            total: W::zero(),
        }
    }

    pub fn from_edges(edges: Vec<EdgeEvent<W>>) -> Self {
        let total = edges.iter().fold(W::zero(), |acc, e| acc + e.w.clone());
        Matching { edges, total }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Endpoints pairwise disjoint and `total` equal to the sum of member weights.
    pub fn is_valid(&self) -> bool {
        let mut seen = HashSet::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            if e.u == e.v || !seen.insert(e.u) || !seen.insert(e.v) {
                return false;
            }
        }
        let sum = self
            .edges
            .iter()
            .fold(W::zero(), |acc, e| acc + e.w.clone());
        sum == self.total
    }
}

/// An ordered run of stream events.
#[derive(Clone, Debug, PartialEq)]
pub struct StreamSlice<W = Weight> {
    pub events: Vec<EdgeEvent<W>>,
    pub label: Label,
}

impl<W: Scalar> Default for StreamSlice<W> {
    fn default() -> Self {
        StreamSlice {
            events: Vec::new(),
            label: Label::Plain,
        }
    }
}

impl<W: Scalar> StreamSlice<W> {
    pub fn new(events: Vec<EdgeEvent<W>>) -> Self {
        StreamSlice {
            events,
            label: Label::Plain,
        }
    }

    /// Builds a slice from `(u, v, w)` triples, numbering arrivals from 0 and
    /// tagging every event with `label`.
    pub fn from_triples(
        label: Label,
        triples: impl IntoIterator<Item = (usize, usize, W)>,
    ) -> Result<Self, GraphError> {
        let events = triples
            .into_iter()
            .enumerate()
            .map(|(t, (u, v, w))| EdgeEvent::new(u, v, w, t).map(|e| e.with_label(label)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(StreamSlice { events, label })
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Smallest vertex-universe size that contains every endpoint.
    pub fn vertex_bound(&self) -> usize {
        self.events
            .iter()
            .map(|e| e.u.0.max(e.v.0) + 1)
            .max()
            .unwrap_or(0)
    }

    /// Events carrying `label`, renumbered from 0.
    pub fn sub_slice(&self, label: Label) -> StreamSlice<W> {
        let events = self
            .events
            .iter()
            .filter(|e| e.label == label)
            .enumerate()
            .map(|(t, e)| EdgeEvent { t, ..e.clone() })
            .collect();
        StreamSlice { events, label }
    }

    /// Events `range`, renumbered from 0.
    pub fn range(&self, range: std::ops::Range<usize>) -> StreamSlice<W> {
        let events = self.events[range]
            .iter()
            .enumerate()
            .map(|(t, e)| EdgeEvent { t, ..e.clone() })
            .collect();
        StreamSlice {
            events,
            label: self.label,
        }
    }

    pub fn map_weights<V: Scalar>(&self, f: impl Fn(&W) -> V) -> StreamSlice<V> {
        StreamSlice {
            events: self.events.iter().map(|e| e.map_weight(&f)).collect(),
            label: self.label,
        }
    }
}

/// Concatenates slices in order and renumbers arrivals `0..m`.
///
/// Event labels survive, so [`StreamSlice::sub_slice`] recovers the parts.
pub fn concat<W: Scalar>(parts: &[StreamSlice<W>]) -> StreamSlice<W> {
    let events = parts
        .iter()
        .flat_map(|p| p.events.iter())
        .enumerate()
        .map(|(t, e)| EdgeEvent { t, ..e.clone() })
        .collect();
    StreamSlice {
        events,
        label: Label::Plain,
    }
}

/// The window of length `len` ending at position `index`: events `j` with
/// `max(index + 1 - len, 0) <= j <= index`.
///
/// Arrival indices are kept as in the source stream.
pub fn window<W: Scalar>(
    stream: &StreamSlice<W>,
    index: usize,
    len: usize,
) -> Result<StreamSlice<W>, GraphError> {
    if len == 0 {
        return Err(GraphError::ZeroWindow);
    }
    if index >= stream.len() {
        return Err(GraphError::IndexOutOfRange {
            index,
            len: stream.len(),
        });
    }
    let start = window_start(index, len);
    Ok(StreamSlice {
        events: stream.events[start..=index].to_vec(),
        label: stream.label,
    })
}

/// First position of the length-`len` window ending at `index`.
pub fn window_start(index: usize, len: usize) -> usize {
    (index + 1).saturating_sub(len)
}
