//! Text formats for finished graphs.
//!
//! Edge list: one `i j weight` line per edge with `i < j`.
//! Trace: a `clique a b c d` header, then one `v a b c` line per insertion
//! (`a < b < c` is the host face).

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::{Edge, Insertion, TmfgGraph};

pub fn write_edge_list(graph: &TmfgGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for e in graph.edges() {
        writeln!(out, "{} {} {}", e.a, e.b, e.weight).map_err(|err| Error::io(path, err))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_trace(graph: &TmfgGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let [a, b, c, d] = graph.clique();
    let io = |e| Error::io(path, e);
    writeln!(out, "clique {a} {b} {c} {d}").map_err(io)?;
    for ins in graph.insertions() {
        let [x, y, z] = ins.face;
        writeln!(out, "{} {x} {y} {z}", ins.vertex).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Vec<Edge>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse {
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [a, b, w] = fields[..] else {
            return Err(bad(format!("expected `i j weight`, got `{line}`")));
        };
        let a: u32 = a.parse().map_err(|_| bad(format!("bad vertex `{a}`")))?;
        let b: u32 = b.parse().map_err(|_| bad(format!("bad vertex `{b}`")))?;
        let weight: f64 = w.parse().map_err(|_| bad(format!("bad weight `{w}`")))?;
        if a >= b {
            return Err(bad(format!("edge ({a}, {b}) must satisfy i < j")));
        }
        edges.push(Edge { a, b, weight });
    }
    Ok(edges)
}

/// Parses a trace file into its clique and insertions.
pub fn read_trace(path: impl AsRef<Path>) -> Result<([u32; 4], Vec<Insertion>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace(&text)
}

pub(crate) fn parse_trace(text: &str) -> Result<([u32; 4], Vec<Insertion>)> {
    let mut clique = None;
    let mut insertions = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse {
            line: idx + 1,
            message,
        };
        let (is_header, rest) = match line.strip_prefix("clique") {
            Some(rest) => (true, rest),
            None => (false, line),
        };
        let ids = rest
            .split_whitespace()
            .map(|f| f.parse::<u32>().map_err(|_| bad(format!("bad vertex `{f}`"))))
            .collect::<Result<Vec<_>>>()?;
        let [a, b, c, d] = ids[..] else {
            return Err(bad(format!("expected four vertex ids, got `{line}`")));
        };
        if is_header {
            if clique.is_some() || !insertions.is_empty() {
                return Err(bad("clique header must come first, once".into()));
            }
            clique = Some([a, b, c, d]);
        } else {
            if clique.is_none() {
                return Err(bad("insertion before clique header".into()));
            }
            insertions.push(Insertion {
                vertex: a,
                face: [b, c, d],
            });
        }
    }
    let clique = clique.ok_or_else(|| Error::Parse {
        line: 0,
        message: "missing clique header".into(),
    })?;
    Ok((clique, insertions))
}

impl TmfgGraph {
    /// Writes `<stem>.edges` and `<stem>.trace`.
    pub fn save(&self, dir: impl AsRef<Path>, stem: &str) -> Result<()> {
        let dir = dir.as_ref();
        write_edge_list(self, dir.join(format!("{stem}.edges")))?;
        write_trace(self, dir.join(format!("{stem}.trace")))
    }

    /// Reads a graph back from an edge list and a trace, replaying the trace
    /// and checking it agrees with the edge list.
    pub fn load(edges: impl AsRef<Path>, trace: impl AsRef<Path>) -> Result<Self> {
        let edge_list = read_edge_list(edges)?;
        let (clique, insertions) = read_trace(trace)?;
        let n = 4 + insertions.len();
        let mut graph = TmfgGraph::from_trace(n, clique, insertions, None)?;
        let mut by_pair: Vec<((u32, u32), f64)> =
            edge_list.iter().map(|e| ((e.a, e.b), e.weight)).collect();
        by_pair.sort_by_key(|&(k, _)| k);
        if by_pair.len() != graph.edges.len() {
            return Err(Error::TraceCorruption(format!(
                "edge list has {} edges, trace implies {}",
                by_pair.len(),
                graph.edges.len()
            )));
        }
        for e in &mut graph.edges {
            let idx = by_pair
                .binary_search_by_key(&(e.a, e.b), |&(k, _)| k)
                .map_err(|_| {
                    Error::TraceCorruption(format!("edge ({}, {}) missing from edge list", e.a, e.b))
                })?;
            e.weight = by_pair[idx].1;
        }
        Ok(graph)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simmatrix::SimilarityMatrix;
    use crate::tmfg::{build_tmfg_exact, BuildConfig};

    #[test]
    fn save_and_load_round_trip() {
        let s = SimilarityMatrix::from_fn(12, |i, j| ((i * 13 + j * 7) as f64).cos() * 0.9).unwrap();
        let g = build_tmfg_exact(&s, &BuildConfig::exact(1));
        let dir = tempfile::tempdir().unwrap();
        g.save(dir.path(), "g").unwrap();
        let back = TmfgGraph::load(dir.path().join("g.edges"), dir.path().join("g.trace")).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn trace_without_header_is_rejected() {
        assert!(parse_trace("4 0 1 2\n").is_err());
        assert!(parse_trace("clique 0 1 2 3\nclique 0 1 2 3\n").is_err());
        let (c, ins) = parse_trace("clique 0 1 2 3\n4 0 1 2\n").unwrap();
        assert_eq!(c, [0, 1, 2, 3]);
        assert_eq!(ins[0].face, [0, 1, 2]);
    }
}
