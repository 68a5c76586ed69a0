//! Brute-force reference implementations used by the verification suites.
//!
//! Everything here reads the relation only through [`BitRelation::get`] and
//! enumerates tuples, subsets and columns directly. None of it shares code
//! with the detectors it is used to check.

use std::collections::BTreeSet;

use crate::relcore::{BitRelation, PatternSpec};

/// All strictly increasing `k`-tuples of `0..n`, lexicographic.
pub fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// First `(positions, column)` realizing `spec`, tuples lexicographic then columns ascending.
pub fn pattern_realization(
    rel: &BitRelation,
    rows: &[usize],
    spec: &PatternSpec,
) -> Option<(Vec<usize>, usize)> {
    let word = spec.word();
    for tuple in increasing_tuples(rows.len(), spec.len()) {
        for c in 0..rel.n_cols() {
            if tuple
                .iter()
                .zip(&word)
                .all(|(&p, &b)| rel.get(rows[p], c) == b)
            {
                return Some((tuple, c));
            }
        }
    }
    None
}

pub fn max_alternation(rel: &BitRelation, rows: &[usize]) -> usize {
    (0..rel.n_cols())
        .map(|c| {
            let mut changes = 0;
            for i in 1..rows.len() {
                if rel.get(rows[i - 1], c) != rel.get(rows[i], c) {
                    changes += 1;
                }
            }
            changes
        })
        .max()
        .unwrap_or(0)
}

/// Whether columns `cols[q]` satisfy `rel(rows[p], cols[q]) = 1 iff p < q`.
pub fn is_ladder(rel: &BitRelation, rows: &[usize], cols: &[usize]) -> bool {
    rows.len() == cols.len()
        && (0..rows.len()).all(|p| (0..cols.len()).all(|q| rel.get(rows[p], cols[q]) == (p < q)))
}

/// Some ladder of length `k` over increasing positions of `rows`.
pub fn find_ladder(
    rel: &BitRelation,
    rows: &[usize],
    k: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    for tuple in increasing_tuples(rows.len(), k) {
        let picked: Vec<usize> = tuple.iter().map(|&p| rows[p]).collect();
        let mut cols = Vec::with_capacity(k);
        for q in 0..k {
            let hit = (0..rel.n_cols()).find(|&c| (0..k).all(|p| rel.get(picked[p], c) == (p < q)));
            match hit {
                Some(c) => cols.push(c),
                None => break,
            }
        }
        if cols.len() == k {
            return Some((tuple, cols));
        }
    }
    None
}

pub fn max_ladder(rel: &BitRelation, rows: &[usize]) -> usize {
    (1..=rows.len())
        .take_while(|&k| find_ladder(rel, rows, k).is_some())
        .last()
        .unwrap_or(0)
}

pub fn is_shattered(rel: &BitRelation, rows: &[usize]) -> bool {
    let traces: BTreeSet<Vec<bool>> = (0..rel.n_cols())
        .map(|c| rows.iter().map(|&r| rel.get(r, c)).collect())
        .collect();
    traces.len() == 1 << rows.len()
}

/// Largest shattered row set, by trying every subset.
pub fn vc_dimension(rel: &BitRelation) -> usize {
    let m = rel.n_rows();
    assert!(m <= 24, "brute-force VC limited to 24 rows");
    (0u64..1 << m)
        .filter_map(|s| {
            let rows: Vec<usize> = (0..m).filter(|&r| s >> r & 1 == 1).collect();
            is_shattered(rel, &rows).then_some(rows.len())
        })
        .max()
        .unwrap_or(0)
}

/// Realizable patterns (as masks over tuple positions) on the rows at `positions`.
pub fn realizable_patterns(
    rel: &BitRelation,
    rows: &[usize],
    positions: &[usize],
) -> BTreeSet<u64> {
    (0..rel.n_cols())
        .map(|c| {
            positions
                .iter()
                .enumerate()
                .filter(|(_, &p)| rel.get(rows[p], c))
                .fold(0u64, |m, (j, _)| m | 1 << j)
        })
        .collect()
}

pub fn is_indiscernible(rel: &BitRelation, rows: &[usize], n: usize) -> bool {
    let types: BTreeSet<BTreeSet<u64>> = increasing_tuples(rows.len(), n)
        .iter()
        .map(|t| realizable_patterns(rel, rows, t))
        .collect();
    types.len() <= 1
}

/// Length of the longest `n`-indiscernible subsequence of `rows`, over all subsets.
pub fn longest_indiscernible(rel: &BitRelation, rows: &[usize], n: usize) -> usize {
    let m = rows.len();
    assert!(m <= 20, "brute-force subsequence search limited to 20 rows");
    (0u64..1 << m)
        .filter_map(|s| {
            let sub: Vec<usize> = (0..m)
                .filter(|&i| s >> i & 1 == 1)
                .map(|i| rows[i])
                .collect();
            is_indiscernible(rel, &sub, n).then_some(sub.len())
        })
        .max()
        .unwrap_or(0)
}

/// Value and length of the final constant run of `word`.
pub fn final_run(word: &[bool]) -> Option<(bool, usize)> {
    let last = *word.last()?;
    Some((last, word.iter().rev().take_while(|&&b| b == last).count()))
}
