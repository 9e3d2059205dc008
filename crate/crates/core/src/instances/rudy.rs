//! The plain-text edge list used by the MAX-CUT benchmark library:
//!
//! ```text
//! n m
//! i j w      (m lines, 1-based node indices)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RudyOptions {
    /// Keep zero and negative weights (the `pm` instances use +-1).
    pub allow_nonpositive: bool,
}

impl Default for RudyOptions {
    fn default() -> Self {
        Self {
            allow_nonpositive: true,
        }
    }
}

pub fn parse_rudy(text: &str, opts: RudyOptions) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r').trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(Error::Parse {
            line: hline,
            msg: format!("expected header 'n m', found '{header}'"),
        });
    }
    let n: usize = parse_field(head[0], hline, "node count")?;
    let m: usize = parse_field(head[1], hline, "edge count")?;
    if n == 0 {
        return Err(Error::Parse {
            line: hline,
            msg: "node count must be positive".into(),
        });
    }

    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 'i j w', found '{l}'"),
            });
        }
        let i: usize = parse_field(f[0], line, "node index")?;
        let j: usize = parse_field(f[1], line, "node index")?;
        let w: f64 = parse_field(f[2], line, "weight")?;
        for idx in [i, j] {
            if idx == 0 || idx > n {
                return Err(Error::Parse {
                    line,
                    msg: format!("node index {idx} outside 1..={n}"),
                });
            }
        }
        if i == j {
            return Err(Error::Parse {
                line,
                msg: format!("self-loop on node {i}"),
            });
        }
        if !w.is_finite() || (!opts.allow_nonpositive && w <= 0.0) {
            return Err(Error::Parse {
                line,
                msg: format!("weight {w} not allowed"),
            });
        }
        edges.push((i - 1, j - 1, w));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    if opts.allow_nonpositive {
        Graph::new_signed(n, edges)
    } else {
        Graph::new(n, edges)
    }
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what} '{s}'"),
    })
}

pub fn read_rudy(path: &Path, opts: RudyOptions) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_rudy(&text, opts)
}

pub fn to_rudy(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edges().len());
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.i + 1, e.j + 1, e.w).unwrap();
    }
    out
}
