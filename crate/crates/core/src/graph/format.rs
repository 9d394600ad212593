//! Line-oriented text format for sections.
//!
//! ```text
//! # comment
//! V <n>                 vertex count (optional; inferred from indices)
//! L <v> <label>         vertex label
//! E <u> <v> <weight>    undirected edge, weight > 0
//! C <v> <value>         killing term (default 0)
//! M <v> <value>         measure (default 1)
//! D <v>                 Dirichlet mask
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::section::check_label;
use crate::graph::{RawGraph, Section};

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn index(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| syntax(line, format!("{what} {tok:?} is not a vertex index")))
}

fn number(tok: Option<&str>, line: usize, what: &str) -> Result<f64> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| syntax(line, format!("{what} {tok:?} is not a number")))
}

pub fn parse_graph_file(text: &str) -> Result<Section> {
    let mut raw = RawGraph::default();
    let mut declared: Option<usize> = None;
    let mut max_index: Option<usize> = None;
    // line of first mention, for out-of-range reports
    let mut first_use: Vec<(usize, usize)> = Vec::new();

    for (i, full) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = full.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let tag = toks.next().unwrap();
        let mut touch = |v: usize| {
            max_index = Some(max_index.map_or(v, |m: usize| m.max(v)));
            first_use.push((v, line_no));
        };
        match tag {
            "V" => {
                if declared.is_some() {
                    return Err(syntax(line_no, "vertex count declared twice"));
                }
                declared = Some(index(toks.next(), line_no, "vertex count")?);
            }
            "L" => {
                let v = index(toks.next(), line_no, "vertex")?;
                let label = toks
                    .next()
                    .ok_or_else(|| syntax(line_no, "missing label"))?;
                check_label(label)?;
                touch(v);
                raw.labels.push((v, label.to_string()));
            }
            "E" => {
                let u = index(toks.next(), line_no, "vertex")?;
                let v = index(toks.next(), line_no, "vertex")?;
                let w = number(toks.next(), line_no, "weight")?;
                touch(u);
                touch(v);
                raw.edges.push((u, v, w));
            }
            "C" => {
                let v = index(toks.next(), line_no, "vertex")?;
                let c = number(toks.next(), line_no, "killing value")?;
                touch(v);
                raw.killing.push((v, c));
            }
            "M" => {
                let v = index(toks.next(), line_no, "vertex")?;
                let m = number(toks.next(), line_no, "measure value")?;
                touch(v);
                raw.measure.push((v, m));
            }
            "D" => {
                let v = index(toks.next(), line_no, "vertex")?;
                touch(v);
                raw.dirichlet.push(v);
            }
            other => return Err(syntax(line_no, format!("unknown record {other:?}"))),
        }
        if toks.next().is_some() {
            return Err(syntax(line_no, "trailing tokens"));
        }
    }

    raw.vertices = match declared {
        Some(n) => {
            if let Some(&(v, line)) = first_use.iter().find(|(v, _)| *v >= n) {
                return Err(syntax(line, format!("vertex {v} out of range for V {n}")));
            }
            n
        }
        None => max_index.map_or(0, |m| m + 1),
    };
    Section::build(&raw)
}

/// Canonical text: `V`, labels that differ from the index, edges with
/// `u < v` in order, then non-default `C`, `M` and the mask.
pub fn serialize_graph_file(s: &Section) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "V {}", s.len());
    for v in 0..s.len() {
        if s.label(v) != v.to_string() {
            let _ = writeln!(out, "L {v} {}", s.label(v));
        }
    }
    for (u, v, w) in s.edges() {
        let _ = writeln!(out, "E {u} {v} {w:?}");
    }
    for v in 0..s.len() {
        if s.killing(v) != 0.0 {
            let _ = writeln!(out, "C {v} {:?}", s.killing(v));
        }
    }
    for v in 0..s.len() {
        if s.measure(v) != 1.0 {
            let _ = writeln!(out, "M {v} {:?}", s.measure(v));
        }
    }
    for v in s.masked() {
        let _ = writeln!(out, "D {v}");
    }
    out
}
