//! Text formats for relations.
//!
//! Matrix format:
//!
//! ```text
//! 2 3
//! 010
//! 001
//! #row a1
//! #row a2
//! #col b1
//! #col b2
//! #col b3
//! ```
//!
//! Label trailers are optional per axis; when present there is one per
//! row (or column), in order. Edge-list format starts with `edges m n`
//! followed by one `i j` line (1-based) per 1-entry, and accepts the same
//! trailers.

use std::fmt::Write as _;

use thiserror::Error;

use crate::relcore::{BitRelation, RelationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Relation(#[from] RelationError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Matrix,
    Edges,
}

pub fn to_matrix(rel: &BitRelation) -> String {
    let mut out = format!("{} {}\n", rel.n_rows(), rel.n_cols());
    for r in 0..rel.n_rows() {
        out.extend((0..rel.n_cols()).map(|c| if rel.get(r, c) { '1' } else { '0' }));
        out.push('\n');
    }
    write_trailers(rel, &mut out);
    out
}

pub fn to_edges(rel: &BitRelation) -> String {
    let mut out = format!("edges {} {}\n", rel.n_rows(), rel.n_cols());
    for r in 0..rel.n_rows() {
        for c in rel.row_ones(r).ones() {
            writeln!(out, "{} {}", r + 1, c + 1).unwrap();
        }
    }
    write_trailers(rel, &mut out);
    out
}

pub fn write(rel: &BitRelation, format: Format) -> String {
    match format {
        Format::Matrix => to_matrix(rel),
        Format::Edges => to_edges(rel),
    }
}

fn write_trailers(rel: &BitRelation, out: &mut String) {
    for l in rel.row_labels().unwrap_or_default() {
        writeln!(out, "#row {l}").unwrap();
    }
    for l in rel.col_labels().unwrap_or_default() {
        writeln!(out, "#col {l}").unwrap();
    }
}

fn parse_dims(line_no: usize, fields: &[&str]) -> Result<(usize, usize), FormatError> {
    let [m, n] = fields else {
        return Err(syntax(line_no, "expected two dimensions"));
    };
    let m = m
        .parse()
        .map_err(|_| syntax(line_no, format!("bad row count {m:?}")))?;
    let n = n
        .parse()
        .map_err(|_| syntax(line_no, format!("bad column count {n:?}")))?;
    Ok((m, n))
}

/// Parses either format, chosen by the header line.
pub fn parse(text: &str) -> Result<BitRelation, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (line_no, header) = lines.next().ok_or_else(|| syntax(1, "empty input"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let mut entries;
    let (m, n);
    if fields.first() == Some(&"edges") {
        (m, n) = parse_dims(line_no, &fields[1..])?;
        entries = vec![
            0u8;
            m.checked_mul(n)
                .ok_or_else(|| syntax(line_no, "too large"))?
        ];
    } else {
        (m, n) = parse_dims(line_no, &fields)?;
        entries = Vec::with_capacity(
            m.checked_mul(n)
                .ok_or_else(|| syntax(line_no, "too large"))?,
        );
        for r in 0..m {
            let (line_no, row) = lines
                .next()
                .ok_or_else(|| syntax(line_no + r + 1, format!("missing row {}", r + 1)))?;
            if row.len() != n {
                return Err(syntax(
                    line_no,
                    format!("expected {n} characters, got {}", row.len()),
                ));
            }
            for ch in row.bytes() {
                match ch {
                    b'0' => entries.push(0),
                    b'1' => entries.push(1),
                    _ => {
                        return Err(syntax(
                            line_no,
                            format!("invalid character {:?}", ch as char),
                        ))
                    }
                }
            }
        }
    }
    let edges = fields.first() == Some(&"edges");
    let mut row_labels = Vec::new();
    let mut col_labels = Vec::new();
    for (line_no, line) in lines {
        if let Some(label) = line.strip_prefix("#row ") {
            row_labels.push(label.to_string());
        } else if let Some(label) = line.strip_prefix("#col ") {
            col_labels.push(label.to_string());
        } else if line.trim().is_empty() {
            continue;
        } else if edges && row_labels.is_empty() && col_labels.is_empty() {
            let pair: Vec<&str> = line.split_whitespace().collect();
            let [i, j] = pair[..] else {
                return Err(syntax(line_no, "expected `i j`"));
            };
            let parse_index = |s: &str, bound: usize| {
                s.parse::<usize>()
                    .ok()
                    .filter(|&v| (1..=bound).contains(&v))
                    .ok_or_else(|| syntax(line_no, format!("index {s:?} outside 1..={bound}")))
            };
            let (i, j) = (parse_index(i, m)?, parse_index(j, n)?);
            entries[(i - 1) * n + (j - 1)] = 1;
        } else {
            return Err(syntax(line_no, format!("unexpected line {line:?}")));
        }
    }
    let labels = |v: Vec<String>| (!v.is_empty()).then_some(v);
    Ok(BitRelation::new(m, n, &entries)?.with_labels(labels(row_labels), labels(col_labels))?)
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// FNV-1a of the canonical matrix text, labels included.
pub fn content_hash(rel: &BitRelation) -> u64 {
    fnv1a64(to_matrix(rel).as_bytes())
}
