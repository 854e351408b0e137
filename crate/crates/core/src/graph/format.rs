//! Text format for trees.
//!
//! ```text
//! graph n=3
//! edge 1 1 4
//! edge 2 2 4
//! edge 3 3 4
//! dirichlet 1
//! ```
//!
//! Tokens are whitespace separated and `#` starts a comment. Every edge id
//! in `1..=n` must appear exactly once; the `dirichlet` line is optional.
//! [`write_graph`] emits edges by id and omits an empty Dirichlet line, so
//! writing a parsed canonical file reproduces it byte for byte.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{Edge, TreeGraph, VertexId};
use crate::error::{Error, Result};

pub fn write_graph(g: &TreeGraph) -> String {
    let mut out = String::new();
    writeln!(out, "graph n={}", g.n_edges()).unwrap();
    for e in g.edges() {
        writeln!(out, "edge {} {} {}", e.id, e.source, e.target).unwrap();
    }
    let d = g.dirichlet_vertices();
    if !d.is_empty() {
        out.push_str("dirichlet");
        for v in d {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_graph(text: &str) -> Result<TreeGraph> {
    let mut n: Option<usize> = None;
    let mut edges: BTreeMap<usize, (Edge, usize)> = BTreeMap::new();
    let mut dirichlet: Option<BTreeSet<VertexId>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let mut toks = line.split_whitespace();
        let Some(head) = toks.next() else { continue };
        match head {
            "graph" => {
                if n.is_some() {
                    return Err(Error::parse(line_no, "duplicate graph header"));
                }
                let header = toks
                    .next()
                    .ok_or_else(|| Error::parse(line_no, "expected n=<edges>"))?;
                let count = header
                    .strip_prefix("n=")
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| Error::parse(line_no, format!("bad edge count `{header}`")))?;
                if toks.next().is_some() {
                    return Err(Error::parse(line_no, "trailing tokens after header"));
                }
                n = Some(count);
            }
            "edge" => {
                if n.is_none() {
                    return Err(Error::parse(line_no, "edge before graph header"));
                }
                let fields: Vec<&str> = toks.collect();
                if fields.len() != 3 {
                    return Err(Error::parse(
                        line_no,
                        "expected `edge <j> <source> <target>`",
                    ));
                }
                let id: usize = parse_tok(fields[0], line_no)?;
                let source: VertexId = parse_tok(fields[1], line_no)?;
                let target: VertexId = parse_tok(fields[2], line_no)?;
                let e = Edge { id, source, target };
                if edges.insert(id, (e, line_no)).is_some() {
                    return Err(Error::parse(line_no, format!("edge {id} listed twice")));
                }
            }
            "dirichlet" => {
                if dirichlet.is_some() {
                    return Err(Error::parse(line_no, "duplicate dirichlet line"));
                }
                let vs = toks
                    .map(|t| parse_tok::<VertexId>(t, line_no))
                    .collect::<Result<BTreeSet<_>>>()?;
                dirichlet = Some(vs);
            }
            other => {
                return Err(Error::parse(
                    line_no,
                    format!("unknown directive `{other}`"),
                ));
            }
        }
    }

    let n = n.ok_or_else(|| Error::parse(1, "missing graph header"))?;
    for (&id, &(_, line)) in &edges {
        if id == 0 || id > n {
            return Err(Error::parse(line, format!("edge id {id} outside 1..={n}")));
        }
    }
    if let Some(missing) = (1..=n).find(|j| !edges.contains_key(j)) {
        return Err(Error::parse(
            text.lines().count().max(1),
            format!("edge {missing} missing"),
        ));
    }
    let edges: Vec<Edge> = edges.into_values().map(|(e, _)| e).collect();
    TreeGraph::from_edges(n, edges, &dirichlet.unwrap_or_default())
}

fn parse_tok<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("bad integer `{tok}`")))
}
