use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{Budget, SearchStats, VerifyError};
use crate::relcore::BitRelation;

/// A shattered row set and one realizing column per subset.
///
/// `realizers[s]` realizes the subset whose bit `i` selects `rows[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShatterWitness {
    pub rows: Vec<usize>,
    pub realizers: Vec<usize>,
}

impl ShatterWitness {
    pub fn verify(&self, rel: &BitRelation) -> Result<(), VerifyError> {
        let d = self.rows.len();
        if d >= usize::BITS as usize || self.realizers.len() != 1 << d {
            return Err(VerifyError::new("shatter", "need one realizer per subset"));
        }
        for (s, &c) in self.realizers.iter().enumerate() {
            if c >= rel.n_cols() {
                return Err(VerifyError::new(
                    "shatter",
                    format!("column {c} out of range"),
                ));
            }
            for (i, &r) in self.rows.iter().enumerate() {
                if r >= rel.n_rows() || rel.get(r, c) != (s >> i & 1 == 1) {
                    return Err(VerifyError::new(
                        "shatter",
                        format!("column {c} does not realize subset {s:#b}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VcResult {
    pub d: usize,
    /// Absent only when the relation has no columns, where even the empty set is not shattered.
    pub witness: Option<ShatterWitness>,
    #[serde(flatten)]
    pub stats: SearchStats,
}

/// Largest shattered row set of size at most `max_d`.
///
/// Shattering is hereditary, so the search extends row sets in index order
/// and keeps the partition of columns by trace on the chosen rows; a row
/// extends the set iff it splits every class into two nonempty halves.
pub fn vc_dimension(rel: &BitRelation, max_d: usize, budget: u64) -> VcResult {
    let mut search = VcSearch {
        rel,
        max_d: max_d.min(rel.n_rows()).min(usize::BITS as usize - 2),
        budget: Budget::new(budget),
        best: None,
        chosen: Vec::new(),
    };
    if rel.n_cols() > 0 {
        search.descend(vec![rel.all_columns()], 0);
    }
    VcResult {
        d: search.best.as_ref().map_or(0, |w| w.rows.len()),
        witness: search.best,
        stats: search.budget.stats(),
    }
}

struct VcSearch<'a> {
    rel: &'a BitRelation,
    max_d: usize,
    budget: Budget,
    best: Option<ShatterWitness>,
    chosen: Vec<usize>,
}

impl VcSearch<'_> {
    fn best_len(&self) -> Option<usize> {
        self.best.as_ref().map(|w| w.rows.len())
    }

    fn descend(&mut self, classes: Vec<FixedBitSet>, next: usize) -> bool {
        let d = self.chosen.len();
        if self.best_len().is_none_or(|b| d > b) {
            self.best = Some(ShatterWitness {
                rows: self.chosen.clone(),
                realizers: classes
                    .iter()
                    .map(|c| c.minimum().expect("nonempty"))
                    .collect(),
            });
            if d == self.max_d {
                return true;
            }
        }
        if (1usize << (d + 1)) > self.rel.n_cols() {
            return false;
        }
        let best = self.best_len().unwrap_or(0);
        for r in next..self.rel.n_rows() {
            if d + (self.rel.n_rows() - r) <= best {
                break;
            }
            if !self.budget.tick() {
                return true;
            }
            let mut without = Vec::with_capacity(classes.len());
            let mut with = Vec::with_capacity(classes.len());
            let mut split = true;
            for class in &classes {
                let mut lo = class.clone();
                lo.intersect_with(self.rel.row_zeros(r));
                let mut hi = class.clone();
                hi.intersect_with(self.rel.row_ones(r));
                if lo.is_clear() || hi.is_clear() {
                    split = false;
                    break;
                }
                without.push(lo);
                with.push(hi);
            }
            if !split {
                continue;
            }
            without.extend(with);
            self.chosen.push(r);
            let stop = self.descend(without, r + 1);
            self.chosen.pop();
            if stop {
                return true;
            }
        }
        false
    }
}
