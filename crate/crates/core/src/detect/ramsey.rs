use std::collections::BTreeSet;

use serde::Serialize;

use super::{check_positions, check_rows, for_each_tuple, Budget, DetectError, SearchStats};
use crate::relcore::{BitRelation, PatternSpec, RowSeq, MAX_PATTERN_LEN};

/// Patterns `E ⊆ {1..N}` realized by at least one column on a fixed row tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PatternType {
    pub n: usize,
    /// Masks with bit `j - 1` for position `j`.
    pub masks: BTreeSet<u64>,
}

impl PatternType {
    pub fn contains(&self, spec: &PatternSpec) -> bool {
        spec.len() == self.n && self.masks.contains(&spec.mask())
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }
}

fn type_of(rel: &BitRelation, tuple_rows: &[usize]) -> PatternType {
    let masks = (0..rel.n_cols())
        .map(|c| {
            tuple_rows.iter().enumerate().fold(
                0u64,
                |m, (j, &r)| if rel.get(r, c) { m | 1 << j } else { m },
            )
        })
        .collect();
    PatternType {
        n: tuple_rows.len(),
        masks,
    }
}

pub fn pattern_type(
    rel: &BitRelation,
    rows: &RowSeq,
    positions: &[usize],
) -> Result<PatternType, DetectError> {
    if positions.len() > MAX_PATTERN_LEN {
        return Err(DetectError::Arity {
            expected: MAX_PATTERN_LEN,
            actual: positions.len(),
        });
    }
    check_rows(rel, rows)?;
    check_positions(rows, positions)?;
    let tuple: Vec<usize> = positions.iter().map(|&p| rows.row(p)).collect();
    Ok(type_of(rel, &tuple))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Indiscernibility {
    Indiscernible,
    /// Two increasing tuples (as positions) with different pattern types.
    Distinguished {
        first: Vec<usize>,
        second: Vec<usize>,
    },
}

impl Indiscernibility {
    pub fn holds(&self) -> bool {
        matches!(self, Indiscernibility::Indiscernible)
    }
}

/// Whether all increasing `n`-tuples of `rows` share one pattern type.
///
/// The counterexample pairs the first tuple with the first tuple whose type differs.
pub fn is_indiscernible(
    rel: &BitRelation,
    rows: &RowSeq,
    n: usize,
) -> Result<Indiscernibility, DetectError> {
    if n > MAX_PATTERN_LEN {
        return Err(DetectError::InvalidParameter(format!(
            "tuple length {n} too large"
        )));
    }
    check_rows(rel, rows)?;
    let mut reference: Option<(Vec<usize>, PatternType)> = None;
    let mut result = Indiscernibility::Indiscernible;
    for_each_tuple(rows.len(), n, |t| {
        let tuple: Vec<usize> = t.iter().map(|&p| rows.row(p)).collect();
        let ty = type_of(rel, &tuple);
        match &reference {
            None => {
                reference = Some((t.to_vec(), ty));
                true
            }
            Some((first, r)) if *r != ty => {
                result = Indiscernibility::Distinguished {
                    first: first.clone(),
                    second: t.to_vec(),
                };
                false
            }
            Some(_) => true,
        }
    });
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RamseyResult {
    /// Positions into the input sequence.
    pub positions: Vec<usize>,
    pub rows: RowSeq,
    #[serde(flatten)]
    pub stats: SearchStats,
}

/// An order-preserving `n`-indiscernible sub-sequence of length at least `min_len`.
///
/// Without `exhaustive` the lexicographically first sub-sequence of length
/// `min_len` is returned. With it, the search is branch-and-bound for the
/// longest one (lexicographically first among the longest). Indiscernibility
/// is inherited by sub-sequences, so a prefix is abandoned as soon as a new
/// tuple ending at its last row has the wrong type.
pub fn ramsey_subsequence(
    rel: &BitRelation,
    rows: &RowSeq,
    n: usize,
    min_len: usize,
    exhaustive: bool,
    budget: u64,
) -> Result<RamseyResult, DetectError> {
    if min_len < n {
        return Err(DetectError::InvalidParameter(format!(
            "min_len {min_len} must be at least the tuple length {n}"
        )));
    }
    if n > MAX_PATTERN_LEN {
        return Err(DetectError::InvalidParameter(format!(
            "tuple length {n} too large"
        )));
    }
    check_rows(rel, rows)?;
    let mut search = RamseySearch {
        rel,
        rows: rows.as_slice(),
        n,
        goal: if exhaustive { rows.len() } else { min_len },
        budget: Budget::new(budget),
        best: Vec::new(),
        chosen: Vec::new(),
        reference: None,
    };
    search.descend(0);
    if search.best.len() < min_len {
        return Err(DetectError::NotFound { min_len });
    }
    Ok(RamseyResult {
        rows: rows.subsequence(&search.best),
        positions: search.best,
        stats: search.budget.stats(),
    })
}

struct RamseySearch<'a> {
    rel: &'a BitRelation,
    rows: &'a [usize],
    n: usize,
    goal: usize,
    budget: Budget,
    best: Vec<usize>,
    chosen: Vec<usize>,
    reference: Option<PatternType>,
}

impl RamseySearch<'_> {
    /// Checks the tuples that end at position `p` against the reference type.
    /// Returns whether `p` fits and whether it set the reference.
    fn fits(&mut self, p: usize) -> (bool, bool) {
        if self.chosen.len() + 1 < self.n {
            return (true, false);
        }
        let chosen_rows: Vec<usize> = self.chosen.iter().map(|&q| self.rows[q]).collect();
        let last = self.rows[p];
        let mut ok = true;
        let mut set_reference = false;
        for_each_tuple(chosen_rows.len(), self.n.saturating_sub(1), |t| {
            let mut tuple: Vec<usize> = t.iter().map(|&i| chosen_rows[i]).collect();
            if self.n > 0 {
                tuple.push(last);
            }
            let ty = type_of(self.rel, &tuple);
            match &self.reference {
                None => {
                    self.reference = Some(ty);
                    set_reference = true;
                }
                Some(r) => ok = *r == ty,
            }
            ok
        });
        if !ok && set_reference {
            self.reference = None;
            set_reference = false;
        }
        (ok, set_reference)
    }

    fn descend(&mut self, next: usize) -> bool {
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
            if self.best.len() >= self.goal {
                return true;
            }
        }
        for p in next..self.rows.len() {
            if self.chosen.len() + (self.rows.len() - p) <= self.best.len() {
                break;
            }
            if !self.budget.tick() {
                return true;
            }
            let (ok, set_reference) = self.fits(p);
            if !ok {
                continue;
            }
            self.chosen.push(p);
            let stop = self.descend(p + 1);
            self.chosen.pop();
            if set_reference {
                self.reference = None;
            }
            if stop {
                return true;
            }
        }
        false
    }
}
