//! Limits of the function sequence `f_i = rel(rows[i], ·)` over realized types.
//!
//! Convergence of a finite word is declared by a tail length: the word
//! converges when its final constant run is at least `tail` long. Every
//! result carries the tail that produced it.

use serde::Serialize;
use thiserror::Error;

use crate::detect::{self, DetectError, LadderWitness};
use crate::relcore::{
    project_types, BitRelation, ColumnWord, PatternSpec, RelationError, RowSeq, TypeSpace,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaireError {
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error("row sequence is empty")]
    EmptyRows,
    #[error("column sequence is empty")]
    EmptyCols,
    #[error("tail {tail} must be in 1..={len}")]
    InvalidTail { tail: usize, len: usize },
    #[error("sequence does not converge at types {unstable:?}")]
    NotConverged { unstable: Vec<usize> },
}

/// Default tail for words of length `m`: `max(2, ⌈m/4⌉)`, capped at `m`.
pub fn default_tail(m: usize) -> usize {
    2.max(m.div_ceil(4)).min(m).max(1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSequence {
    pub rows: RowSeq,
    /// Realized types over all rows of the relation.
    pub types: TypeSpace,
    /// `words[q][i]` is `f_{i+1}` at type `q`.
    pub words: Vec<ColumnWord>,
}

impl FunctionSequence {
    pub fn word_len(&self) -> usize {
        self.rows.len()
    }
}

/// One word per realized type; types are distinct full columns of `rel`.
pub fn function_sequence(rel: &BitRelation, rows: &RowSeq) -> Result<FunctionSequence, BaireError> {
    if rows.is_empty() {
        return Err(BaireError::EmptyRows);
    }
    let types = project_types(rel, &RowSeq::natural(rel))?;
    let words = types
        .representative
        .iter()
        .map(|&c| crate::relcore::trace(rel, rows, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FunctionSequence {
        rows: rows.clone(),
        types,
        words,
    })
}

/// Limit value and 1-based start of the final run, when that run is at least `tail` long.
pub fn word_limit(word: &[bool], tail: usize) -> Option<(bool, usize)> {
    let &last = word.last()?;
    let run = word.iter().rev().take_while(|&&b| b == last).count();
    (run >= tail).then_some((last, word.len() - run + 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitFunction {
    /// Per type; `None` marks an unstable type.
    pub values: Vec<Option<bool>>,
    /// 1-based index where the final run begins, for stable types.
    pub stabilization_index: Vec<Option<usize>>,
    pub tail: usize,
}

impl LimitFunction {
    pub fn converged(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn unstable_types(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&q| self.values[q].is_none())
            .collect()
    }
}

fn check_tail(tail: usize, len: usize) -> Result<(), BaireError> {
    if tail == 0 || tail > len {
        return Err(BaireError::InvalidTail { tail, len });
    }
    Ok(())
}

pub fn pointwise_limit(seq: &FunctionSequence, tail: usize) -> Result<LimitFunction, BaireError> {
    check_tail(tail, seq.word_len())?;
    let (values, stabilization_index) = seq
        .words
        .iter()
        .map(|w| match word_limit(w.values(), tail) {
            Some((v, at)) => (Some(v), Some(at)),
            None => (None, None),
        })
        .unzip();
    Ok(LimitFunction {
        values,
        stabilization_index,
        tail,
    })
}

/// Positive and negative variation of a word with `f_0 = 0` prepended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordDecomposition {
    pub f1: u32,
    pub f2: u32,
    /// `partial_f1[k]` sums the positive increments `(f_{n+1} - f_n)^+` for `n < k + 1`.
    pub partial_f1: Vec<u32>,
    pub partial_f2: Vec<u32>,
}

/// Splits the increments `f_{n+1} - f_n` (with `f_0 = 0`) into positive and negative parts.
///
/// `f1 - f2` telescopes to the last value of the word and `f1 + f2` is the
/// variation of the prepended word.
pub fn decompose_word(word: &[bool]) -> WordDecomposition {
    let mut prev = false;
    let (mut f1, mut f2) = (0u32, 0u32);
    let mut partial_f1 = Vec::with_capacity(word.len());
    let mut partial_f2 = Vec::with_capacity(word.len());
    for &b in word {
        match (prev, b) {
            (false, true) => f1 += 1,
            (true, false) => f2 += 1,
            _ => {}
        }
        partial_f1.push(f1);
        partial_f2.push(f2);
        prev = b;
    }
    WordDecomposition {
        f1,
        f2,
        partial_f1,
        partial_f2,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DbscDecomposition {
    pub f1: Vec<u32>,
    pub f2: Vec<u32>,
    pub partial_f1: Vec<Vec<u32>>,
    pub partial_f2: Vec<Vec<u32>>,
    pub prepended_zero: bool,
}

/// `f = F1 - F2` per type, for a sequence that converges under `tail`.
pub fn dbsc_decompose(
    seq: &FunctionSequence,
    tail: usize,
) -> Result<(DbscDecomposition, LimitFunction), BaireError> {
    let limit = pointwise_limit(seq, tail)?;
    if !limit.converged() {
        return Err(BaireError::NotConverged {
            unstable: limit.unstable_types(),
        });
    }
    let mut out = DbscDecomposition {
        f1: Vec::with_capacity(seq.words.len()),
        f2: Vec::with_capacity(seq.words.len()),
        partial_f1: Vec::with_capacity(seq.words.len()),
        partial_f2: Vec::with_capacity(seq.words.len()),
        prepended_zero: true,
    };
    for w in &seq.words {
        let d = decompose_word(w.values());
        out.f1.push(d.f1);
        out.f2.push(d.f2);
        out.partial_f1.push(d.partial_f1);
        out.partial_f2.push(d.partial_f2);
    }
    Ok((out, limit))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IteratedOrder {
    /// `lim_i lim_j`: rows outside, columns inside.
    RowsOuter,
    /// `lim_j lim_i`.
    ColsOuter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitSide {
    Inner,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum DoubleLimit {
    Equal {
        value: bool,
    },
    Unequal {
        rows_outer: bool,
        cols_outer: bool,
    },
    Indeterminate {
        order: IteratedOrder,
        side: LimitSide,
    },
}

/// Iterated limit on a common time axis: position `i` of either sequence
/// is time `i`, and a row at time `i` precedes the columns at times `> i`.
///
/// The outer index runs over the times `0..span`, `span = min(m, n) - tail`,
/// so every inner word has at least `tail` letters. The inner limit at
/// outer time `i` exists when the inner word is constant on the future of
/// `i` (times `from(i)..`); the outer limit is the tail limit of the inner
/// limits. Requiring the whole future, not just a tail, is what ties an
/// unequal result to a ladder.
fn iterated_limit(
    span: usize,
    inner_len: usize,
    tail: usize,
    from: impl Fn(usize) -> usize,
    entry: impl Fn(usize, usize) -> bool,
) -> Result<bool, LimitSide> {
    if span < tail {
        return Err(LimitSide::Outer);
    }
    let mut inner = Vec::with_capacity(span);
    for i in 0..span {
        let first = entry(i, from(i));
        if (from(i) + 1..inner_len).any(|j| entry(i, j) != first) {
            return Err(LimitSide::Inner);
        }
        inner.push(first);
    }
    word_limit(&inner, tail)
        .map(|(v, _)| v)
        .ok_or(LimitSide::Outer)
}

/// Compares `lim_i lim_j rel(a_i, b_j)` with `lim_j lim_i rel(a_i, b_j)`.
///
/// With `tail >= 2`, `Unequal { rows_outer: true, .. }` comes with a ladder
/// `rel(a_p, b_q) = 1 iff p < q` of length 2 among the last outer times, and
/// `Unequal { rows_outer: false, .. }` with one in the reversed row order.
pub fn double_limit_check(
    rel: &BitRelation,
    row_seq: &RowSeq,
    col_seq: &[usize],
    tail: usize,
) -> Result<DoubleLimit, BaireError> {
    if row_seq.is_empty() {
        return Err(BaireError::EmptyRows);
    }
    if col_seq.is_empty() {
        return Err(BaireError::EmptyCols);
    }
    for &c in col_seq {
        rel.check_col(c)?;
    }
    for &r in row_seq.as_slice() {
        rel.check_row(r)?;
    }
    if tail == 0 {
        return Err(BaireError::InvalidTail {
            tail,
            len: row_seq.len().min(col_seq.len()),
        });
    }
    let rows = row_seq.as_slice();
    let span = rows.len().min(col_seq.len()).saturating_sub(tail);
    let by_rows = iterated_limit(
        span,
        col_seq.len(),
        tail,
        |i| i + 1,
        |i, j| rel.get(rows[i], col_seq[j]),
    );
    let rows_outer = match by_rows {
        Ok(v) => v,
        Err(side) => {
            return Ok(DoubleLimit::Indeterminate {
                order: IteratedOrder::RowsOuter,
                side,
            })
        }
    };
    let by_cols = iterated_limit(
        span,
        rows.len(),
        tail,
        |j| j,
        |j, i| rel.get(rows[i], col_seq[j]),
    );
    let cols_outer = match by_cols {
        Ok(v) => v,
        Err(side) => {
            return Ok(DoubleLimit::Indeterminate {
                order: IteratedOrder::ColsOuter,
                side,
            })
        }
    };
    Ok(if rows_outer == cols_outer {
        DoubleLimit::Equal { value: rows_outer }
    } else {
        DoubleLimit::Unequal {
            rows_outer,
            cols_outer,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LimitClass {
    /// Converges, bounded-variation certificate found, no ladder of length 2.
    ContinuousProxy,
    /// Converges with a bounded-variation certificate, and a ladder of length 2 exists.
    DbscProxy,
    /// Converges, but no pattern up to `max_n` is avoided.
    ConvergentUncertified,
    Nonconvergent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitClassification {
    pub class: LimitClass,
    pub tail: usize,
    pub unstable_types: Vec<usize>,
    pub avoided_pattern: Option<PatternSpec>,
    pub ladder: Option<LadderWitness>,
    pub ladder_search_complete: bool,
}

/// Finite proxy classification of the limit of `rel(rows[i], ·)`.
///
/// A ladder of length 2 among `rows` is the finite trace of a
/// discontinuous limit; its absence together with a bounded-variation
/// certificate is reported as the continuous proxy.
pub fn classify_limit(
    rel: &BitRelation,
    rows: &RowSeq,
    tail: usize,
    max_n: usize,
    budget: u64,
) -> Result<LimitClassification, BaireError> {
    let seq = function_sequence(rel, rows)?;
    let limit = pointwise_limit(&seq, tail)?;
    let mut out = LimitClassification {
        class: LimitClass::Nonconvergent,
        tail,
        unstable_types: limit.unstable_types(),
        avoided_pattern: None,
        ladder: None,
        ladder_search_complete: true,
    };
    if !limit.converged() {
        return Ok(out);
    }
    out.avoided_pattern = detect::find_avoided_pattern(rel, rows, max_n)?;
    if out.avoided_pattern.is_none() {
        out.class = LimitClass::ConvergentUncertified;
        return Ok(out);
    }
    let ladder = detect::ladder_index_in(rel, rows, 2, budget)?;
    out.ladder_search_complete = ladder.stats.complete;
    if ladder.k >= 2 {
        out.class = LimitClass::DbscProxy;
        out.ladder = Some(ladder.witness);
    } else {
        out.class = LimitClass::ContinuousProxy;
    }
    Ok(out)
}
