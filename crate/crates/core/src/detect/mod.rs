//! Witness-producing detectors over a relation and a row sequence.
//!
//! Every search that can blow up takes a node budget. A result whose search
//! ran out of budget is still sound (its witness verifies) but only a lower
//! bound; it carries `complete == false`.

mod ladder;
mod pattern;
mod ramsey;
mod sop;
mod vc;

use serde::Serialize;
use thiserror::Error;

use crate::relcore::{BitRelation, PatternSpec, RelationError, RowSeq};

pub use ladder::{ladder_index, ladder_index_in, LadderResult, LadderWitness};
pub use pattern::{
    alternation_sum, find_avoided_pattern, pattern_avoided, pattern_realized, Alternation,
    Avoidance, Realization, MAX_ENUMERATED_PATTERN_LEN,
};
pub use ramsey::{
    is_indiscernible, pattern_type, ramsey_subsequence, Indiscernibility, PatternType, RamseyResult,
};
pub use sop::{
    extract_sop_formula_witness, sop_guarantee, SopGuaranteeWitness, SopSearch, SwapWitness,
};
pub use vc::{vc_dimension, ShatterWitness, VcResult};

/// Default node budget for exponential searches.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetectError {
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error("expected {expected} positions, got {actual}")]
    Arity { expected: usize, actual: usize },
    #[error("positions must be strictly increasing and below {len}")]
    Positions { len: usize },
    #[error("pattern {spec} is realized on {positions:?} by column {column}")]
    PatternNotAvoided {
        spec: PatternSpec,
        positions: Vec<usize>,
        column: usize,
    },
    #[error("no column realizes the staircase 1^{ones} 0^{zeros} on any row tuple")]
    NoLadder { ones: usize, zeros: usize },
    #[error("no indiscernible subsequence of length {min_len}")]
    NotFound { min_len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// A witness failed its direct re-check.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{witness} witness invalid: {reason}")]
pub struct VerifyError {
    pub witness: &'static str,
    pub reason: String,
}

impl VerifyError {
    pub(crate) fn new(witness: &'static str, reason: impl Into<String>) -> Self {
        VerifyError {
            witness,
            reason: reason.into(),
        }
    }
}

/// Node accounting shared by the budgeted searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub budget: u64,
    pub complete: bool,
}

pub(crate) struct Budget {
    nodes: u64,
    limit: u64,
    exhausted: bool,
}

impl Budget {
    pub(crate) fn new(limit: u64) -> Self {
        Budget {
            nodes: 0,
            limit,
            exhausted: false,
        }
    }

    /// Charges one node; returns `false` once the budget is spent.
    pub(crate) fn tick(&mut self) -> bool {
        if self.nodes >= self.limit {
            self.exhausted = true;
            return false;
        }
        self.nodes += 1;
        true
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.exhausted
    }

    pub(crate) fn stats(&self) -> SearchStats {
        SearchStats {
            nodes: self.nodes,
            budget: self.limit,
            complete: !self.exhausted,
        }
    }
}

pub(crate) fn check_positions(rows: &RowSeq, positions: &[usize]) -> Result<(), DetectError> {
    let increasing = positions.windows(2).all(|w| w[0] < w[1]);
    if !increasing || positions.last().is_some_and(|&p| p >= rows.len()) {
        return Err(DetectError::Positions { len: rows.len() });
    }
    Ok(())
}

pub(crate) fn check_rows(rel: &BitRelation, rows: &RowSeq) -> Result<(), DetectError> {
    for &r in rows.as_slice() {
        rel.check_row(r)?;
    }
    Ok(())
}

/// Calls `f` on every strictly increasing `k`-tuple from `0..n` in
/// lexicographic order until it returns `false`.
pub(crate) fn for_each_tuple(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut tuple: Vec<usize> = (0..k).collect();
    loop {
        if !f(&tuple) {
            return;
        }
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if tuple[i] < n - k + i {
                tuple[i] += 1;
                for j in i + 1..k {
                    tuple[j] = tuple[j - 1] + 1;
                }
                break;
            }
        }
    }
}
