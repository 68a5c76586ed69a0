use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{check_positions, check_rows, DetectError};
use crate::relcore::{column_words, variation, BitRelation, PatternSpec, RowSeq};

/// Longest pattern length [`find_avoided_pattern`] enumerates.
pub const MAX_ENUMERATED_PATTERN_LEN: usize = 20;

/// An increasing tuple of positions and a column realizing a pattern on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Realization {
    pub positions: Vec<usize>,
    pub rows: Vec<usize>,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Avoidance {
    Avoided,
    Realized(Realization),
}

impl Avoidance {
    pub fn is_avoided(&self) -> bool {
        matches!(self, Avoidance::Avoided)
    }

    pub fn realization(&self) -> Option<&Realization> {
        match self {
            Avoidance::Avoided => None,
            Avoidance::Realized(r) => Some(r),
        }
    }
}

/// First column (by index) realizing `spec` on the rows at `positions`.
pub fn pattern_realized(
    rel: &BitRelation,
    rows: &RowSeq,
    positions: &[usize],
    spec: &PatternSpec,
) -> Result<Option<usize>, DetectError> {
    if positions.len() != spec.len() {
        return Err(DetectError::Arity {
            expected: spec.len(),
            actual: positions.len(),
        });
    }
    check_rows(rel, rows)?;
    check_positions(rows, positions)?;
    let mut candidates = rel.all_columns();
    for (j, &p) in positions.iter().enumerate() {
        let r = rows.row(p);
        candidates.intersect_with(if spec.bit(j) {
            rel.row_ones(r)
        } else {
            rel.row_zeros(r)
        });
    }
    Ok(candidates.minimum())
}

/// Leftmost embedding of `target` as a subsequence of `word`.
pub(crate) fn greedy_embed(word: &[bool], target: &[bool]) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(target.len());
    let mut want = target.iter();
    let mut next = want.next();
    for (p, &b) in word.iter().enumerate() {
        match next {
            None => break,
            Some(&t) if t == b => {
                out.push(p);
                next = want.next();
            }
            Some(_) => {}
        }
    }
    next.is_none().then_some(out)
}

pub(crate) fn avoidance_in(words: &[Vec<bool>], rows: &RowSeq, spec: &PatternSpec) -> Avoidance {
    let target = spec.word();
    let mut best: Option<(Vec<usize>, usize)> = None;
    for (c, word) in words.iter().enumerate() {
        if let Some(pos) = greedy_embed(word, &target) {
            if best.as_ref().is_none_or(|(b, _)| pos < *b) {
                best = Some((pos, c));
            }
        }
    }
    match best {
        None => Avoidance::Avoided,
        Some((positions, column)) => Avoidance::Realized(Realization {
            rows: positions.iter().map(|&p| rows.row(p)).collect(),
            positions,
            column,
        }),
    }
}

/// Whether no increasing tuple of `rows` and column realize `spec`.
///
/// A column realizes the pattern on some increasing tuple exactly when the
/// pattern's word is a subsequence of the column's word, so each column is
/// scanned once with a greedy match. The counterexample is the
/// lexicographically least tuple, then the least column realizing it.
pub fn pattern_avoided(rel: &BitRelation, rows: &RowSeq, spec: &PatternSpec) -> Avoidance {
    avoidance_in(&column_words(rel, rows), rows, spec)
}

/// Smallest `N ≤ max_n` with an avoided `E`, and the first such `E` in
/// binary-counter order.
pub fn find_avoided_pattern(
    rel: &BitRelation,
    rows: &RowSeq,
    max_n: usize,
) -> Result<Option<PatternSpec>, DetectError> {
    if max_n == 0 || max_n > MAX_ENUMERATED_PATTERN_LEN {
        return Err(DetectError::InvalidParameter(format!(
            "max_n must be in 1..={MAX_ENUMERATED_PATTERN_LEN}, got {max_n}"
        )));
    }
    check_rows(rel, rows)?;
    let words = column_words(rel, rows);
    for n in 1..=max_n {
        if n > rows.len() {
            // Vacuously avoided: no increasing n-tuple exists.
            return Ok(Some(PatternSpec::from_mask(n, 0)?));
        }
        let mut realized = FixedBitSet::with_capacity(1 << n);
        for word in &words {
            mark_subsequences(word, n, &mut realized);
            if realized.is_full() {
                break;
            }
        }
        if let Some(mask) = realized.zeroes().next() {
            return Ok(Some(PatternSpec::from_mask(n, mask as u64)?));
        }
    }
    Ok(None)
}

/// Marks every length-`n` subsequence pattern of `word`.
fn mark_subsequences(word: &[bool], n: usize, realized: &mut FixedBitSet) {
    // Reachable (length, mask) states after each prefix; a mask of length
    // `l` extends to `l + 1` by taking or skipping the next letter.
    let mut layers: Vec<FixedBitSet> = (0..=n)
        .map(|l| FixedBitSet::with_capacity(1 << l))
        .collect();
    layers[0].insert(0);
    for &b in word {
        for l in (0..n).rev() {
            let grown: Vec<usize> = layers[l].ones().map(|m| m | (b as usize) << l).collect();
            for m in grown {
                layers[l + 1].insert(m);
            }
        }
    }
    realized.union_with(&layers[n]);
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Alternation {
    pub max: usize,
    pub per_column: Vec<usize>,
}

/// Number of value changes of each column along `rows`, and their maximum.
pub fn alternation_sum(rel: &BitRelation, rows: &RowSeq) -> Result<Alternation, DetectError> {
    check_rows(rel, rows)?;
    let per_column: Vec<usize> = column_words(rel, rows)
        .iter()
        .map(|w| variation(w))
        .collect();
    Ok(Alternation {
        max: per_column.iter().copied().max().unwrap_or(0),
        per_column,
    })
}
