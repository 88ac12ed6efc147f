//! Plain-text edge lists.
//!
//! ```text
//! N 5
//! 0 1
//! 1 0
//! focus 0 2      # optional, one per vertex
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::DiGraph;
use crate::{Error, Result};

/// A parsed edge-list file: the graph plus the focus section when present.
#[derive(Clone, Debug)]
pub struct EdgeListFile {
    pub graph: DiGraph,
    pub foci: Option<Vec<u32>>,
}

pub fn write_edge_list(g: &DiGraph, foci: Option<&[u32]>) -> String {
    let mut s = String::with_capacity(16 + 12 * g.n_edges());
    writeln!(s, "N {}", g.n_vertices()).unwrap();
    for (i, j) in g.edges() {
        writeln!(s, "{i} {j}").unwrap();
    }
    if let Some(foci) = foci {
        for (i, f) in foci.iter().enumerate() {
            writeln!(s, "focus {i} {f}").unwrap();
        }
    }
    s
}

pub fn parse_edge_list(text: &str) -> Result<EdgeListFile> {
    let mut graph: Option<DiGraph> = None;
    let mut foci: Option<Vec<Option<u32>>> = None;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| err(format!("expected a non-negative integer, got `{s}`")))
        };
        match (fields.as_slice(), graph.as_mut()) {
            (["N", n], None) => graph = Some(DiGraph::new(num(n)?)),
            (_, None) => return Err(err("first record must be `N <n>`".into())),
            (["N", _], Some(_)) => return Err(err("duplicate `N` header".into())),
            (["focus", v, f], Some(g)) => {
                let (v, f) = (num(v)?, num(f)?);
                let n = g.n_vertices();
                let slots = foci.get_or_insert_with(|| vec![None; n]);
                if v >= n {
                    return Err(err(format!("focus entry for vertex {v} >= {n}")));
                }
                slots[v] = Some(f as u32);
            }
            ([i, j], Some(g)) => {
                let (i, j) = (num(i)?, num(j)?);
                g.add_edge(i, j).map_err(|e| err(e.to_string()))?;
            }
            _ => return Err(err(format!("unrecognized record `{line}`"))),
        }
    }
    let graph = graph.ok_or(Error::Parse {
        line: 0,
        msg: "missing `N <n>` header".into(),
    })?;
    let foci = match foci {
        None => None,
        Some(slots) => Some(
            slots
                .into_iter()
                .enumerate()
                .map(|(v, f)| {
                    f.ok_or_else(|| Error::Parse {
                        line: 0,
                        msg: format!("focus section lacks vertex {v}"),
                    })
                })
                .collect::<Result<Vec<u32>>>()?,
        ),
    };
    Ok(EdgeListFile { graph, foci })
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<EdgeListFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text)
}
