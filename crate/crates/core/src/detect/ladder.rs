use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{check_rows, Budget, DetectError, SearchStats, VerifyError};
use crate::relcore::{BitRelation, RowSeq};

/// Rows at increasing positions of a row sequence and columns with
/// `rel(rows[p], cols[q]) = 1` iff `p < q`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct LadderWitness {
    pub positions: Vec<usize>,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl LadderWitness {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Checks every entry of the `k × k` block, and that positions map to rows in `seq`.
    pub fn verify_in(&self, rel: &BitRelation, seq: &RowSeq) -> Result<(), VerifyError> {
        let err = |m: String| VerifyError::new("ladder", m);
        if self.positions.len() != self.rows.len() || self.cols.len() != self.rows.len() {
            return Err(err("length mismatch".into()));
        }
        if !self.positions.windows(2).all(|w| w[0] < w[1]) {
            return Err(err("positions not increasing".into()));
        }
        for (&p, &r) in self.positions.iter().zip(&self.rows) {
            if p >= seq.len() || seq.row(p) != r {
                return Err(err(format!("position {p} does not hold row {r}")));
            }
        }
        self.verify(rel)
    }

    pub fn verify(&self, rel: &BitRelation) -> Result<(), VerifyError> {
        if self.cols.len() != self.rows.len() {
            return Err(VerifyError::new("ladder", "length mismatch"));
        }
        if let Some(&r) = self.rows.iter().find(|&&r| r >= rel.n_rows()) {
            return Err(VerifyError::new("ladder", format!("row {r} out of range")));
        }
        if let Some(&c) = self.cols.iter().find(|&&c| c >= rel.n_cols()) {
            return Err(VerifyError::new(
                "ladder",
                format!("column {c} out of range"),
            ));
        }
        for (p, &r) in self.rows.iter().enumerate() {
            for (q, &c) in self.cols.iter().enumerate() {
                if rel.get(r, c) != (p < q) {
                    return Err(VerifyError::new(
                        "ladder",
                        format!("entry ({r},{c}) should be {}", (p < q) as u8),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LadderResult {
    pub k: usize,
    pub witness: LadderWitness,
    #[serde(flatten)]
    pub stats: SearchStats,
}

/// Longest ladder over the rows in index order.
pub fn ladder_index(rel: &BitRelation, max_k: usize, budget: u64) -> LadderResult {
    ladder_index_in(rel, &RowSeq::natural(rel), max_k, budget).expect("natural rows are valid")
}

/// Longest ladder (up to `max_k`) whose rows sit at increasing positions of `rows`.
///
/// Depth-first over row choices in lexicographic order. After choosing
/// `t` rows the search keeps, for each `q ≤ t + 1`, the set of columns that
/// could still serve as the `q`-th ladder column: 1 on the first `q - 1`
/// chosen rows and 0 on the rest. Adding a row intersects every set with
/// the row's zeros and opens set `t + 2` from its ones. A branch dies as
/// soon as one of the sets it needs becomes empty.
pub fn ladder_index_in(
    rel: &BitRelation,
    rows: &RowSeq,
    max_k: usize,
    budget: u64,
) -> Result<LadderResult, DetectError> {
    check_rows(rel, rows)?;
    let mut search = LadderSearch {
        rel,
        rows: rows.as_slice(),
        max_k: max_k.min(rows.len()),
        budget: Budget::new(budget),
        best: LadderWitness::default(),
        chosen: Vec::new(),
    };
    if search.max_k > 0 && rel.n_cols() > 0 {
        search.descend(vec![rel.all_columns()], 0);
    }
    Ok(LadderResult {
        k: search.best.len(),
        stats: search.budget.stats(),
        witness: search.best,
    })
}

struct LadderSearch<'a> {
    rel: &'a BitRelation,
    rows: &'a [usize],
    max_k: usize,
    budget: Budget,
    best: LadderWitness,
    chosen: Vec<usize>,
}

impl LadderSearch<'_> {
    /// `sets[q]` is the candidate set for ladder column `q + 1`; `sets.len() == chosen.len() + 1`.
    fn descend(&mut self, sets: Vec<FixedBitSet>, next: usize) -> bool {
        let t = self.chosen.len();
        if t > self.best.len() {
            self.best = LadderWitness {
                positions: self.chosen.clone(),
                rows: self.chosen.iter().map(|&p| self.rows[p]).collect(),
                cols: sets[..t]
                    .iter()
                    .map(|s| s.minimum().expect("nonempty"))
                    .collect(),
            };
            if t == self.max_k {
                return true;
            }
        }
        if sets[t].is_clear() {
            return false;
        }
        for p in next..self.rows.len() {
            if t + (self.rows.len() - p) <= self.best.len() {
                break;
            }
            if !self.budget.tick() {
                return true;
            }
            let r = self.rows[p];
            let zeros = self.rel.row_zeros(r);
            let mut grown = Vec::with_capacity(t + 2);
            let mut alive = true;
            for s in &sets {
                let mut s = s.clone();
                s.intersect_with(zeros);
                if s.is_clear() {
                    alive = false;
                    break;
                }
                grown.push(s);
            }
            if !alive {
                continue;
            }
            let mut top = sets[t].clone();
            top.intersect_with(self.rel.row_ones(r));
            grown.push(top);
            self.chosen.push(p);
            let stop = self.descend(grown, p + 1);
            self.chosen.pop();
            if stop {
                return true;
            }
        }
        false
    }
}
