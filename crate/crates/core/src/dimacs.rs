//! DIMACS clique-format reader/writer and the vertex-weight sidecar format.
//!
//! ```text
//! c comment
//! p edge <n> <m>
//! e <i> <j>
//! ```
//!
//! Vertices are 1-based in files and 0-based in [`Graph`]. Weight sidecars
//! hold one `<vertex> <weight>` pair per line.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error, PartialEq)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("no problem line (\"p edge <n> <m>\") found")]
    MissingProblemLine,
    #[error("line {line}: second problem line")]
    DuplicateProblemLine { line: usize },
    #[error("line {line}: edge before the problem line")]
    EdgeBeforeProblemLine { line: usize },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
}

/// Non-fatal findings while reading a DIMACS file.
#[derive(Debug, Clone, PartialEq)]
pub enum DimacsWarning {
    DuplicateEdge { line: usize, i: usize, j: usize },
    EdgeCountMismatch { declared: usize, distinct: usize },
}

impl std::fmt::Display for DimacsWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DimacsWarning::DuplicateEdge { line, i, j } => {
                write!(f, "line {line}: duplicate edge {i} {j} ignored")
            }
            DimacsWarning::EdgeCountMismatch { declared, distinct } => write!(
                f,
                "problem line declares {declared} edges, file has {distinct} distinct edges"
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub warnings: Vec<DimacsWarning>,
}

fn syntax(line: usize, message: impl Into<String>) -> DimacsError {
    DimacsError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_index(token: Option<&str>, line: usize, what: &str) -> Result<usize, DimacsError> {
    let token = token.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| syntax(line, format!("{what} `{token}` is not a nonnegative integer")))
}

/// Parses DIMACS clique text. Duplicate edges are dropped with a warning and
/// a declared edge count that disagrees with the distinct count is reported
/// the same way.
pub fn parse_dimacs(text: &str) -> Result<ParsedGraph, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut warnings = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut tokens = raw.split_ascii_whitespace();
        match tokens.next() {
            None | Some("c") => {}
            Some(tag) if tag.starts_with('c') => {}
            Some("p") => {
                if header.is_some() {
                    return Err(DimacsError::DuplicateProblemLine { line });
                }
                match tokens.next() {
                    Some("edge" | "edges" | "col") => {}
                    other => {
                        return Err(syntax(
                            line,
                            format!("unsupported problem format {:?}", other.unwrap_or("")),
                        ))
                    }
                }
                let n = parse_index(tokens.next(), line, "vertex count")?;
                let m = parse_index(tokens.next(), line, "edge count")?;
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or(DimacsError::EdgeBeforeProblemLine { line })?;
                let i = parse_index(tokens.next(), line, "edge endpoint")?;
                let j = parse_index(tokens.next(), line, "edge endpoint")?;
                for v in [i, j] {
                    if v == 0 || v > n {
                        return Err(DimacsError::Graph {
                            line,
                            source: GraphError::VertexOutOfRange { vertex: v, n },
                        });
                    }
                }
                if i == j {
                    return Err(DimacsError::Graph {
                        line,
                        source: GraphError::SelfLoop(i),
                    });
                }
                let key = (i.min(j) - 1, i.max(j) - 1);
                if seen.insert(key) {
                    edges.push(key);
                } else {
                    warnings.push(DimacsWarning::DuplicateEdge { line, i, j });
                }
            }
            Some(other) => return Err(syntax(line, format!("unknown line type `{other}`"))),
        }
    }

    let (n, declared) = header.ok_or(DimacsError::MissingProblemLine)?;
    if declared != edges.len() {
        warnings.push(DimacsWarning::EdgeCountMismatch {
            declared,
            distinct: edges.len(),
        });
    }
    let graph = Graph::new(n, edges).map_err(|source| DimacsError::Graph { line: 0, source })?;
    Ok(ParsedGraph { graph, warnings })
}

/// Serializes `g` with sorted edges and LF line endings. Each entry of
/// `comments` becomes a `c` line.
pub fn write_dimacs(g: &Graph, comments: &[&str]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "c {c}");
    }
    let _ = writeln!(out, "p edge {} {}", g.n(), g.m());
    for &(i, j) in g.edges() {
        let _ = writeln!(out, "e {} {}", i + 1, j + 1);
    }
    out
}

#[derive(Debug, Error, PartialEq)]
pub enum WeightsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
}

/// Applies a weight sidecar to `g`. Vertices not listed keep weight 1.
pub fn load_weights(g: Graph, text: &str) -> Result<Graph, WeightsError> {
    let mut weights = vec![1.0; g.n()];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('c') {
            continue;
        }
        let mut tokens = trimmed.split_ascii_whitespace();
        let (Some(v), Some(w), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(WeightsError::Syntax {
                line,
                message: "expected `<vertex> <weight>`".into(),
            });
        };
        let v: usize = v.parse().map_err(|_| WeightsError::Syntax {
            line,
            message: format!("vertex `{v}` is not a positive integer"),
        })?;
        let w: f64 = w.parse().map_err(|_| WeightsError::Syntax {
            line,
            message: format!("weight `{w}` is not a number"),
        })?;
        if v == 0 || v > g.n() {
            return Err(WeightsError::Graph {
                line,
                source: GraphError::VertexOutOfRange { vertex: v, n: g.n() },
            });
        }
        if !(w.is_finite() && w >= 0.0) {
            return Err(WeightsError::Graph {
                line,
                source: GraphError::InvalidWeight { vertex: v, weight: w },
            });
        }
        weights[v - 1] = w;
    }
    g.with_weights(weights)
        .map_err(|source| WeightsError::Graph { line: 0, source })
}

/// One `<vertex> <weight>` line per vertex.
pub fn write_weights(g: &Graph) -> String {
    let mut out = String::new();
    for (v, w) in g.weights().iter().enumerate() {
        let _ = writeln!(out, "{} {}", v + 1, w);
    }
    out
}
