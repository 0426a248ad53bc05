//! Sliding-window maximum-weight matching over edge streams.
//!
//! The crate provides a local-ratio streaming matcher ([`ps`]), a
//! bucket-based sliding-window wrapper around it ([`window`]), an exact
//! oracle ([`oracle`]), stream generators ([`instances`]) and the evaluation
//! harness used by the command-line tool ([`eval`], [`lookahead`]).
//!
//! All arithmetic defaults to exact rationals ([`Weight`]).

pub mod eval;
pub mod exec;
pub mod graph;
pub mod instances;
pub mod lookahead;
pub mod oracle;
pub mod ps;
pub mod report;
pub mod streamfile;
pub mod weight;
pub mod window;

pub use exec::Exec;
pub use graph::{concat, window as window_of, EdgeEvent, Label, Matching, StreamSlice, VertexId};
pub use oracle::{exact_mwm, OracleLimits};
pub use ps::{PsParams, PsState};
pub use streamfile::StreamFile;
pub use weight::{Scalar, Weight};
pub use window::{WindowEngine, WindowParams, WindowReport};
