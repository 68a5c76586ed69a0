use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::ladder::LadderWitness;
use super::pattern::{greedy_embed, pattern_avoided, pattern_realized, Avoidance};
use super::{check_rows, for_each_tuple, Budget, DetectError, SearchStats, VerifyError};
use crate::oracle;
use crate::relcore::{BitRelation, PatternSpec, RowSeq};

/// Certificate that a row set avoids a pattern and carries staircases.
///
/// Condition (2) is read as the staircase `rel(rows[k], y_j) = 1 iff k < j`
/// and is checked for every increasing tuple of length `depth` from `rows`
/// (hence for every shorter tuple too). The literal index ranges
/// `k < j ≤ n` for the positive part and `j' ≤ k' ≤ n` for the negative
/// part describe the same staircase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SopGuaranteeWitness {
    pub positions: Vec<usize>,
    pub rows: Vec<usize>,
    pub pattern: PatternSpec,
    pub depth: usize,
    /// `ladders[n - 1]` is a ladder of length `n` on the first `n` rows.
    pub ladders: Vec<LadderWitness>,
}

impl SopGuaranteeWitness {
    pub fn verify(&self, rel: &BitRelation) -> Result<(), VerifyError> {
        if oracle::pattern_realization(rel, &self.rows, &self.pattern).is_some() {
            return Err(VerifyError::new("sop-guarantee", "pattern is realized"));
        }
        if self.ladders.len() != self.depth {
            return Err(VerifyError::new(
                "sop-guarantee",
                "one ladder per length required",
            ));
        }
        for (n, ladder) in self.ladders.iter().enumerate() {
            if ladder.len() != n + 1 || ladder.rows[..] != self.rows[..n + 1] {
                return Err(VerifyError::new(
                    "sop-guarantee",
                    format!("ladder {} not on the leading rows", n + 1),
                ));
            }
            ladder.verify(rel)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SopSearch {
    pub witness: Option<SopGuaranteeWitness>,
    #[serde(flatten)]
    pub stats: SearchStats,
}

/// Candidate columns for every staircase position of `tuple`, or `None` when one is empty.
fn staircase_columns(rel: &BitRelation, tuple: &[usize]) -> Option<Vec<usize>> {
    let k = tuple.len();
    // suffix[q] = columns that are 0 on tuple[q..]
    let mut suffix = vec![rel.all_columns(); k + 1];
    for q in (0..k).rev() {
        let mut s = suffix[q + 1].clone();
        s.intersect_with(rel.row_zeros(tuple[q]));
        suffix[q] = s;
    }
    let mut prefix = rel.all_columns();
    let mut cols = Vec::with_capacity(k);
    for q in 0..k {
        let mut c: FixedBitSet = prefix.clone();
        c.intersect_with(&suffix[q]);
        cols.push(c.minimum()?);
        prefix.intersect_with(rel.row_ones(tuple[q]));
    }
    Some(cols)
}

/// Searches `rows` for a sub-sequence that is an SOP-guarantee up to `ladder_depth`.
///
/// Specs are tried in order (`N` ascending, `E` in binary-counter order).
/// For each spec the full sequence is tried first; otherwise the
/// lexicographically first sub-sequence of length `max(ladder_depth, N)`
/// satisfying both conditions is returned. Both conditions are inherited
/// by sub-sequences, so the depth-first search prunes a prefix as soon as
/// it fails either one.
pub fn sop_guarantee(
    rel: &BitRelation,
    rows: &RowSeq,
    max_n: usize,
    ladder_depth: usize,
    budget: u64,
) -> Result<SopSearch, DetectError> {
    if ladder_depth < 2 {
        return Err(DetectError::InvalidParameter(format!(
            "ladder depth must be at least 2, got {ladder_depth}"
        )));
    }
    if max_n == 0 || max_n > super::MAX_ENUMERATED_PATTERN_LEN {
        return Err(DetectError::InvalidParameter(format!(
            "max_n out of range: {max_n}"
        )));
    }
    check_rows(rel, rows)?;
    let mut budget = Budget::new(budget);
    for n in 1..=max_n {
        for spec in PatternSpec::all_of_len(n) {
            let target_len = ladder_depth.max(n);
            if rows.len() < target_len {
                continue;
            }
            let mut search = GuaranteeSearch {
                rel,
                rows: rows.as_slice(),
                spec,
                prefix: spec.word()[..n - 1].to_vec(),
                last: spec.bit(n - 1),
                depth: ladder_depth,
                target_len,
                budget: &mut budget,
                chosen: Vec::new(),
            };
            let found = if search.full_sequence_works() {
                Some((0..rows.len()).collect())
            } else {
                search.descend(0)
            };
            if let Some(positions) = found {
                let witness = build_witness(rel, rows, spec, ladder_depth, positions);
                return Ok(SopSearch {
                    witness: Some(witness),
                    stats: budget.stats(),
                });
            }
            if budget.exhausted() {
                return Ok(SopSearch {
                    witness: None,
                    stats: budget.stats(),
                });
            }
        }
    }
    Ok(SopSearch {
        witness: None,
        stats: budget.stats(),
    })
}

fn build_witness(
    rel: &BitRelation,
    rows: &RowSeq,
    spec: PatternSpec,
    depth: usize,
    positions: Vec<usize>,
) -> SopGuaranteeWitness {
    let picked: Vec<usize> = positions.iter().map(|&p| rows.row(p)).collect();
    let ladders = (1..=depth)
        .map(|n| LadderWitness {
            positions: positions[..n].to_vec(),
            rows: picked[..n].to_vec(),
            cols: staircase_columns(rel, &picked[..n]).expect("checked staircase"),
        })
        .collect();
    SopGuaranteeWitness {
        positions,
        rows: picked,
        pattern: spec,
        depth,
        ladders,
    }
}

struct GuaranteeSearch<'a, 'b> {
    rel: &'a BitRelation,
    rows: &'a [usize],
    spec: PatternSpec,
    prefix: Vec<bool>,
    last: bool,
    depth: usize,
    target_len: usize,
    budget: &'b mut Budget,
    chosen: Vec<usize>,
}

impl GuaranteeSearch<'_, '_> {
    fn full_sequence_works(&mut self) -> bool {
        if !self.budget.tick() {
            return false;
        }
        let seq = RowSeq::new(self.rel, self.rows.to_vec()).expect("validated rows");
        if !pattern_avoided(self.rel, &seq, &self.spec).is_avoided() {
            return false;
        }
        let mut ok = true;
        for_each_tuple(self.rows.len(), self.depth, |t| {
            let tuple: Vec<usize> = t.iter().map(|&p| self.rows[p]).collect();
            ok = staircase_columns(self.rel, &tuple).is_some();
            ok
        });
        ok
    }

    /// Whether appending position `p` keeps both conditions, looking only at new tuples.
    fn extends(&self, p: usize) -> bool {
        let r = self.rows[p];
        let chosen_rows: Vec<usize> = self.chosen.iter().map(|&q| self.rows[q]).collect();
        // (1): no column realizes the pattern on a tuple ending at r.
        if self.chosen.len() + 1 >= self.spec.len() {
            let hits = if self.last {
                self.rel.row_ones(r)
            } else {
                self.rel.row_zeros(r)
            };
            for c in hits.ones() {
                let word: Vec<bool> = chosen_rows.iter().map(|&q| self.rel.get(q, c)).collect();
                if greedy_embed(&word, &self.prefix).is_some() {
                    return false;
                }
            }
        }
        // (2): staircases on every tuple ending at r, of the longest length available.
        let len = (self.chosen.len() + 1).min(self.depth);
        let mut ok = true;
        for_each_tuple(chosen_rows.len(), len - 1, |t| {
            let mut tuple: Vec<usize> = t.iter().map(|&i| chosen_rows[i]).collect();
            tuple.push(r);
            ok = staircase_columns(self.rel, &tuple).is_some();
            ok
        });
        ok
    }

    fn descend(&mut self, next: usize) -> Option<Vec<usize>> {
        if self.chosen.len() == self.target_len {
            return Some(self.chosen.clone());
        }
        for p in next..self.rows.len() {
            if self.chosen.len() + (self.rows.len() - p) < self.target_len {
                break;
            }
            if !self.budget.tick() {
                return None;
            }
            if self.extends(p) {
                self.chosen.push(p);
                if let Some(found) = self.descend(p + 1) {
                    return Some(found);
                }
                self.chosen.pop();
                if self.budget.exhausted() {
                    return None;
                }
            }
        }
        None
    }
}

/// The adjacent swap where consistency first flips on the walk from `E` to the staircase.
///
/// On `rows[positions]`, the pattern `eta0` with `0` at `i0` and `1` at
/// `i0 + 1` is realized by no column, while the same context with `1` at
/// `i0` and `0` at `i0 + 1` is realized by `consistent_col`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwapWitness {
    pub positions: Vec<usize>,
    pub rows: Vec<usize>,
    /// 1-based.
    pub i0: usize,
    /// `(position, value)` for every position other than `i0`, `i0 + 1`.
    pub eta0: Vec<(usize, bool)>,
    pub consistent_col: usize,
    /// Number of unrealized patterns visited before the flip.
    pub steps: usize,
}

impl SwapWitness {
    fn with_pair(&self, first: bool) -> PatternSpec {
        let mut word = vec![false; self.rows.len()];
        for &(p, v) in &self.eta0 {
            word[p - 1] = v;
        }
        word[self.i0 - 1] = first;
        word[self.i0] = !first;
        PatternSpec::from_word(&word).expect("length checked at construction")
    }

    /// Pattern with `0` at `i0` and `1` at `i0 + 1`.
    pub fn inconsistent_pattern(&self) -> PatternSpec {
        self.with_pair(false)
    }

    /// Pattern with `1` at `i0` and `0` at `i0 + 1`.
    pub fn consistent_pattern(&self) -> PatternSpec {
        self.with_pair(true)
    }

    /// Re-scans every column.
    pub fn verify(&self, rel: &BitRelation) -> Result<(), VerifyError> {
        let n = self.rows.len();
        if self.i0 == 0 || self.i0 >= n || self.eta0.len() + 2 != n {
            return Err(VerifyError::new("swap", "malformed positions"));
        }
        if self.rows.iter().any(|&r| r >= rel.n_rows()) || self.consistent_col >= rel.n_cols() {
            return Err(VerifyError::new("swap", "index out of range"));
        }
        let matches = |c: usize, spec: &PatternSpec| {
            self.rows
                .iter()
                .enumerate()
                .all(|(j, &r)| rel.get(r, c) == spec.bit(j))
        };
        let bad = self.inconsistent_pattern();
        if let Some(c) = (0..rel.n_cols()).find(|&c| matches(c, &bad)) {
            return Err(VerifyError::new(
                "swap",
                format!("column {c} realizes {bad}"),
            ));
        }
        if !matches(self.consistent_col, &self.consistent_pattern()) {
            return Err(VerifyError::new(
                "swap",
                "consistent column does not realize the swap",
            ));
        }
        Ok(())
    }
}

/// Walks from the avoided pattern `spec` toward the staircase `1^|E| 0^(N-|E|)`
/// by adjacent `(0,1) → (1,0)` swaps, leftmost pair first, and returns the
/// first swap whose result is realized.
///
/// The walk runs on the lexicographically least increasing tuple of `rows`
/// carrying the staircase.
pub fn extract_sop_formula_witness(
    rel: &BitRelation,
    rows: &RowSeq,
    spec: &PatternSpec,
) -> Result<SwapWitness, DetectError> {
    check_rows(rel, rows)?;
    if let Avoidance::Realized(r) = pattern_avoided(rel, rows, spec) {
        return Err(DetectError::PatternNotAvoided {
            spec: *spec,
            positions: r.positions,
            column: r.column,
        });
    }
    let n = spec.len();
    let ones = spec.ones();
    let stair = PatternSpec::staircase(n, ones)?;
    let positions = match pattern_avoided(rel, rows, &stair) {
        Avoidance::Realized(r) => r.positions,
        Avoidance::Avoided => {
            return Err(DetectError::NoLadder {
                ones,
                zeros: n - ones,
            })
        }
    };
    let mut word = spec.word();
    let mut steps = 0;
    loop {
        let i = word
            .windows(2)
            .position(|w| !w[0] && w[1])
            .expect("an unrealized pattern is never the staircase");
        word.swap(i, i + 1);
        steps += 1;
        let swapped = PatternSpec::from_word(&word)?;
        if let Some(col) = pattern_realized(rel, rows, &positions, &swapped)? {
            let eta0 = (1..=n)
                .filter(|&p| p != i + 1 && p != i + 2)
                .map(|p| (p, word[p - 1]))
                .collect();
            return Ok(SwapWitness {
                rows: positions.iter().map(|&p| rows.row(p)).collect(),
                positions,
                i0: i + 1,
                eta0,
                consistent_col: col,
                steps,
            });
        }
    }
}
