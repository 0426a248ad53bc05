//! Text stream files.
//!
//! ```text
//! n 4
//! # comment
//! 0 1 5
//! 1 2 3/2 A
//! ```
//!
//! The first non-comment line declares the vertex universe. Each following
//! line is `u v w [label]`, with `w` a decimal or `p/q` and `label` one of
//! `A`, `B`, `C`. A `#` starts a comment anywhere on a line.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::graph::{EdgeEvent, Label, StreamSlice};
use crate::weight::Weight;

#[derive(Debug, Error)]
pub enum StreamFileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing `n <vertex-count>` header")]
    MissingHeader,
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StreamFile {
    pub n: usize,
    pub stream: StreamSlice<Weight>,
}

impl StreamFile {
    pub fn new(n: usize, stream: StreamSlice<Weight>) -> Self {
        StreamFile { n, stream }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, StreamFileError> {
        parse(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), StreamFileError> {
        fs::write(path, self.render(&[]))?;
        Ok(())
    }

    /// Serializes with optional leading `# ` comment lines.
    pub fn render(&self, comments: &[&str]) -> String {
        let mut out = String::new();
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "n {}", self.n);
        for e in &self.stream.events {
            let _ = write!(out, "{} {} {}", e.u, e.v, e.w);
            if let Some(l) = e.label.as_str() {
                let _ = write!(out, " {l}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn parse(text: &str) -> Result<StreamFile, StreamFileError> {
    let mut n = None;
    let mut events = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| StreamFileError::Parse { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let Some(n) = n else {
            match fields.as_slice() {
                ["n", count] => {
                    let count = count
                        .parse::<usize>()
                        .map_err(|_| err(format!("bad vertex count `{count}`")))?;
                    n = Some(count);
                    continue;
                }
                _ => return Err(StreamFileError::MissingHeader),
            }
        };
        if !(3..=4).contains(&fields.len()) {
            return Err(err(format!("expected `u v w [label]`, got `{content}`")));
        }
        let vertex = |s: &str| -> Result<usize, StreamFileError> {
            let x = s
                .parse::<usize>()
                .map_err(|_| err(format!("bad vertex `{s}`")))?;
            if x >= n {
                return Err(err(format!("vertex {x} outside universe of size {n}")));
            }
            Ok(x)
        };
        let u = vertex(fields[0])?;
        let v = vertex(fields[1])?;
        let w: Weight = fields[2].parse().map_err(|e| err(format!("{e}")))?;
        let label = match fields.get(3) {
            None => Label::Plain,
            Some(&"A") => Label::A,
            Some(&"B") => Label::B,
            Some(&"C") => Label::C,
            Some(other) => return Err(err(format!("unknown label `{other}`"))),
        };
        let event = EdgeEvent::new(u, v, w, events.len()).map_err(|e| err(e.to_string()))?;
        events.push(event.with_label(label));
    }
    let n = n.ok_or(StreamFileError::MissingHeader)?;
    Ok(StreamFile {
        n,
        stream: StreamSlice::new(events),
    })
}
