//! Text format: one simplex per line as vertex indices, then a `%boundary`
//! line followed by the boundary simplices. `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use super::complex::{SimplicialComplex, Simplex, MAX_DIM};
use crate::error::{Error, Result};

pub fn parse_complex(text: &str) -> Result<SimplicialComplex> {
    let mut simplices: Vec<Simplex> = Vec::new();
    let mut boundary: Vec<Simplex> = Vec::new();
    let mut in_boundary = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "%boundary" {
            if in_boundary {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "duplicate %boundary section".into(),
                });
            }
            in_boundary = true;
            continue;
        }
        let s: Simplex = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("bad vertex index: {e}"),
            })?;
        if s.len() > MAX_DIM + 1 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("simplex has {} vertices, at most {} allowed", s.len(), MAX_DIM + 1),
            });
        }
        if in_boundary {
            boundary.push(s);
        } else {
            simplices.push(s);
        }
    }
    SimplicialComplex::new(&simplices, &boundary)
}

pub fn read_complex(path: &Path) -> Result<SimplicialComplex> {
    parse_complex(&std::fs::read_to_string(path)?)
}

pub fn write_complex(c: &SimplicialComplex) -> String {
    let mut out = String::new();
    let line = |s: &Simplex| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    for k in 0..=MAX_DIM {
        for s in c.simplices(k) {
            let _ = writeln!(out, "{}", line(s));
        }
    }
    out.push_str("%boundary\n");
    for k in 0..=MAX_DIM {
        for s in c.boundary_simplices(k) {
            let _ = writeln!(out, "{}", line(&s));
        }
    }
    out
}
