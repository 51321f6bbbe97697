//! Plain-text graph and solution formats.
//!
//! Graphs use the DIMACS edge format: a `p edge <n> <m>` header followed by
//! one `e <u> <v>` line per undirected edge with 1-based ids. Lines starting
//! with `c` are comments. Solution certificates are a `s <cardinality>` header
//! followed by the sorted 1-based vertex ids, one per line.

use std::io::{BufRead, Write};

use crate::{CsrGraph, IndependentSetSolution, MisError};

pub fn write_dimacs<W: Write>(graph: &CsrGraph, mut out: W) -> Result<(), MisError> {
    writeln!(out, "p edge {} {}", graph.num_vertices(), graph.num_edges())?;
    for (u, v) in graph.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1)?;
    }
    Ok(())
}

pub fn read_dimacs<R: BufRead>(input: R) -> Result<CsrGraph, MisError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let err = |message: &str| MisError::Parse {
            line: lineno,
            message: message.to_string(),
        };
        let mut fields = line.split_whitespace();
        match fields.next() {
            None | Some("c") => continue,
            Some("p") => {
                if header.is_some() {
                    return Err(err("duplicate problem line"));
                }
                if fields.next() != Some("edge") {
                    return Err(err("expected `p edge <n> <m>`"));
                }
                let n = parse_count(fields.next()).ok_or_else(|| err("bad vertex count"))?;
                let m = parse_count(fields.next()).ok_or_else(|| err("bad edge count"))?;
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or_else(|| err("edge before problem line"))?;
                let u = parse_count(fields.next()).ok_or_else(|| err("bad endpoint"))?;
                let v = parse_count(fields.next()).ok_or_else(|| err("bad endpoint"))?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(err("endpoint outside 1..=n"));
                }
                if u == v {
                    return Err(err("self-loop"));
                }
                edges.push(((u - 1) as u32, (v - 1) as u32));
            }
            Some(other) => return Err(err(&format!("unknown line type `{other}`"))),
        }
    }
    let (n, m) = header.ok_or(MisError::Parse {
        line: 0,
        message: "missing problem line".into(),
    })?;
    let g = CsrGraph::from_edges(n, edges)?;
    if g.num_edges() != m {
        return Err(MisError::Parse {
            line: 0,
            message: format!("header declares {m} edges, found {} distinct", g.num_edges()),
        });
    }
    Ok(g)
}

fn parse_count(s: Option<&str>) -> Option<usize> {
    s?.parse().ok()
}

pub fn write_certificate<W: Write>(solution: &IndependentSetSolution, mut out: W) -> Result<(), MisError> {
    writeln!(out, "s {}", solution.objective())?;
    for v in solution.vertices() {
        writeln!(out, "{}", v + 1)?;
    }
    Ok(())
}

/// Reads a certificate back as 0-based vertex ids. The header count must
/// match the number of ids.
pub fn read_certificate<R: BufRead>(input: R) -> Result<Vec<u32>, MisError> {
    let mut declared = None;
    let mut ids = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let err = |m: &str| MisError::Parse {
            line: i + 1,
            message: m.into(),
        };
        if let Some(rest) = t.strip_prefix("s ") {
            declared = Some(rest.trim().parse::<usize>().map_err(|_| err("bad cardinality"))?);
        } else {
            let id: u32 = t.parse().map_err(|_| err("bad vertex id"))?;
            if id == 0 {
                return Err(err("vertex ids are 1-based"));
            }
            ids.push(id - 1);
        }
    }
    match declared {
        Some(k) if k == ids.len() => Ok(ids),
        Some(k) => Err(MisError::Parse {
            line: 0,
            message: format!("header says {k} vertices, found {}", ids.len()),
        }),
        None => Err(MisError::Parse {
            line: 0,
            message: "missing `s` line".into(),
        }),
    }
}
