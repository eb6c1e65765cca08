//! Text formats: the edge-list graph file and the certificate JSON.
//!
//! Edge list: optional `#`-prefixed comment lines, then a header `n m`, then
//! `m` lines `u v` (ASCII decimal, space-separated, 0-based, LF line ends).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, SimilarityCertificate, VertexBijection};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: endpoint out of range ({u} {v} with n = {n})")]
    EndpointOutOfRange { line: usize, u: usize, v: usize, n: usize },
    #[error("line {line}: loop edge ({v} {v})")]
    LoopEdge { line: usize, v: usize },
    #[error("expected {expected} edges, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("invalid certificate: {0}")]
    Certificate(String),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line: line + 1, msg: msg.into() }
}

fn parse_pair(line_no: usize, line: &str) -> Result<(usize, usize), ParseError> {
    let mut it = line.split_ascii_whitespace();
    let a = it
        .next()
        .ok_or_else(|| syntax(line_no, "expected two integers"))?;
    let b = it
        .next()
        .ok_or_else(|| syntax(line_no, "expected two integers"))?;
    if it.next().is_some() {
        return Err(syntax(line_no, "trailing tokens after two integers"));
    }
    let a = a
        .parse()
        .map_err(|_| syntax(line_no, format!("not an integer: {a:?}")))?;
    let b = b
        .parse()
        .map_err(|_| syntax(line_no, format!("not an integer: {b:?}")))?;
    Ok((a, b))
}

/// Parse an edge-list document.
pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match header {
            None => header = Some(parse_pair(line_no, line)?),
            Some((n, m)) => {
                if edges.len() == m {
                    return Err(syntax(line_no, format!("more than {m} edge lines")));
                }
                let (u, v) = parse_pair(line_no, line)?;
                if u >= n || v >= n {
                    return Err(ParseError::EndpointOutOfRange { line: line_no + 1, u, v, n });
                }
                if u == v {
                    return Err(ParseError::LoopEdge { line: line_no + 1, v });
                }
                edges.push((u, v));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| syntax(0, "missing 'n m' header"))?;
    if edges.len() != m {
        return Err(ParseError::EdgeCountMismatch { expected: m, found: edges.len() });
    }
    Graph::build(n, &edges).map_err(|e| match e {
        GraphError::Loop(v) => ParseError::LoopEdge { line: 0, v },
        GraphError::EndpointOutOfRange { vertex, n } => {
            ParseError::EndpointOutOfRange { line: 0, u: vertex, v: vertex, n }
        }
    })
}

/// Render a graph as an edge-list document; each entry of `comments`
/// becomes one `#`-prefixed line before the header.
pub fn write_edge_list(g: &Graph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&format!("{} {}\n", g.vertex_count(), g.edge_count()));
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// On-disk certificate shape.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertificateJson {
    pub n: usize,
    pub s: usize,
    pub e1: Vec<[usize; 2]>,
    pub e2: Vec<[usize; 2]>,
    pub mapping: Vec<[usize; 2]>,
    pub method: String,
    pub seed: u64,
    pub runtime_ms: u64,
}

impl CertificateJson {
    pub fn from_certificate(cert: &SimilarityCertificate, n: usize, runtime_ms: u64) -> Self {
        Self {
            n,
            s: cert.s,
            e1: cert.e1.iter().map(|&(u, v)| [u, v]).collect(),
            e2: cert.e2.iter().map(|&(u, v)| [u, v]).collect(),
            mapping: cert.f.iter().map(|(a, b)| [a, b]).collect(),
            method: cert.method.clone(),
            seed: cert.seed,
            runtime_ms,
        }
    }

    pub fn to_certificate(&self) -> Result<SimilarityCertificate, ParseError> {
        let pairs: Vec<(usize, usize)> = self.mapping.iter().map(|&[a, b]| (a, b)).collect();
        let f = VertexBijection::from_pairs(&pairs)
            .map_err(|e| ParseError::Certificate(e.to_string()))?;
        Ok(SimilarityCertificate {
            e1: self.e1.iter().map(|&[u, v]| (u, v)).collect(),
            e2: self.e2.iter().map(|&[u, v]| (u, v)).collect(),
            f,
            s: self.s,
            method: self.method.clone(),
            seed: self.seed,
        })
    }
}
