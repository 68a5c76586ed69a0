//! Finite 0/1 relations, row sequences, patterns and realized type spaces.
//!
//! A [`BitRelation`] is the finite fragment of a binary formula on
//! `rows × cols`. Every row is stored twice as a bit set over columns (its
//! ones and its zeros) and every column once as a bit set over rows, so the
//! detectors can intersect candidate column sets a machine word at a time.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest pattern length representable by [`PatternSpec`].
pub const MAX_PATTERN_LEN: usize = 63;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("dimension mismatch: expected {expected} entries for {rows}x{cols}, got {actual}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
        actual: usize,
    },
    #[error("non-binary entry {value} at position {index}")]
    NonBinary { index: usize, value: u8 },
    #[error("{axis} label count {actual} does not match {expected}")]
    LabelCount {
        axis: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("duplicate {axis} label {label:?}")]
    DuplicateLabel { axis: &'static str, label: String },
    #[error("row index {index} out of range for {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },
    #[error("column index {index} out of range for {cols} columns")]
    ColumnOutOfRange { index: usize, cols: usize },
    #[error("row index {index} repeated in row sequence")]
    RepeatedRow { index: usize },
    #[error("pattern length must be between 1 and {MAX_PATTERN_LEN}, got {0}")]
    PatternLength(usize),
    #[error("pattern position {position} outside 1..={len}")]
    PatternPosition { position: usize, len: usize },
}

/// Immutable finite 0/1 relation with optional row and column labels.
#[derive(Clone, PartialEq, Eq)]
pub struct BitRelation {
    n_rows: usize,
    n_cols: usize,
    row_ones: Vec<FixedBitSet>,
    row_zeros: Vec<FixedBitSet>,
    col_ones: Vec<FixedBitSet>,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
}

impl BitRelation {
    /// Builds a relation from row-major entries, each of which must be 0 or 1.
    pub fn new(n_rows: usize, n_cols: usize, entries: &[u8]) -> Result<Self, RelationError> {
        let expected = n_rows * n_cols;
        if entries.len() != expected {
            return Err(RelationError::DimensionMismatch {
                rows: n_rows,
                cols: n_cols,
                expected,
                actual: entries.len(),
            });
        }
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(RelationError::NonBinary { index, value });
        }
        Ok(Self::from_fn(n_rows, n_cols, |i, j| {
            entries[i * n_cols + j] == 1
        }))
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut row_ones = Vec::with_capacity(n_rows);
        let mut row_zeros = Vec::with_capacity(n_rows);
        let mut col_ones = vec![FixedBitSet::with_capacity(n_rows); n_cols];
        for i in 0..n_rows {
            let mut ones = FixedBitSet::with_capacity(n_cols);
            for (j, col) in col_ones.iter_mut().enumerate() {
                if f(i, j) {
                    ones.insert(j);
                    col.insert(i);
                }
            }
            let mut zeros = FixedBitSet::with_capacity(n_cols);
            zeros.insert_range(..);
            zeros.difference_with(&ones);
            row_ones.push(ones);
            row_zeros.push(zeros);
        }
        BitRelation {
            n_rows,
            n_cols,
            row_ones,
            row_zeros,
            col_ones,
            row_labels: None,
            col_labels: None,
        }
    }

    /// Attaches labels. Labels must be unique within an axis and match its size.
    /// An empty label list on an empty axis is the same as no labels.
    pub fn with_labels(
        mut self,
        row_labels: Option<Vec<String>>,
        col_labels: Option<Vec<String>>,
    ) -> Result<Self, RelationError> {
        let row_labels = row_labels.filter(|l| !(l.is_empty() && self.n_rows == 0));
        let col_labels = col_labels.filter(|l| !(l.is_empty() && self.n_cols == 0));
        if let Some(labels) = &row_labels {
            check_labels("row", labels, self.n_rows)?;
        }
        if let Some(labels) = &col_labels {
            check_labels("column", labels, self.n_cols)?;
        }
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Entry at `(row, col)`. Panics when either index is out of range.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(col < self.n_cols, "column {col} out of range");
        self.row_ones[row].contains(col)
    }

    /// Columns holding a 1 in `row`.
    pub fn row_ones(&self, row: usize) -> &FixedBitSet {
        &self.row_ones[row]
    }

    /// Columns holding a 0 in `row`.
    pub fn row_zeros(&self, row: usize) -> &FixedBitSet {
        &self.row_zeros[row]
    }

    /// Rows holding a 1 in `col`.
    pub fn col_ones(&self, col: usize) -> &FixedBitSet {
        &self.col_ones[col]
    }

    /// Bit set with every column present.
    pub fn all_columns(&self) -> FixedBitSet {
        let mut all = FixedBitSet::with_capacity(self.n_cols);
        all.insert_range(..);
        all
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn col_labels(&self) -> Option<&[String]> {
        self.col_labels.as_deref()
    }

    pub fn count_ones(&self) -> usize {
        self.row_ones.iter().map(|r| r.count_ones(..)).sum()
    }

    /// Row-major entries as 0/1 bytes.
    pub fn entries(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.n_rows * self.n_cols);
        for i in 0..self.n_rows {
            out.extend((0..self.n_cols).map(|j| self.get(i, j) as u8));
        }
        out
    }

    /// Sub-relation on the given rows and columns, in the given order. Labels carry over.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Result<Self, RelationError> {
        for &r in rows {
            self.check_row(r)?;
        }
        for &c in cols {
            self.check_col(c)?;
        }
        let rel = Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]));
        let pick = |labels: &Option<Vec<String>>, idx: &[usize]| {
            labels
                .as_ref()
                .map(|l| idx.iter().map(|&i| l[i].clone()).collect::<Vec<_>>())
        };
        rel.with_labels(pick(&self.row_labels, rows), pick(&self.col_labels, cols))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n_cols, self.n_rows, |i, j| self.get(j, i))
    }

    pub(crate) fn check_row(&self, index: usize) -> Result<(), RelationError> {
        if index >= self.n_rows {
            return Err(RelationError::RowOutOfRange {
                index,
                rows: self.n_rows,
            });
        }
        Ok(())
    }

    pub(crate) fn check_col(&self, index: usize) -> Result<(), RelationError> {
        if index >= self.n_cols {
            return Err(RelationError::ColumnOutOfRange {
                index,
                cols: self.n_cols,
            });
        }
        Ok(())
    }
}

fn check_labels(
    axis: &'static str,
    labels: &[String],
    expected: usize,
) -> Result<(), RelationError> {
    if labels.len() != expected {
        return Err(RelationError::LabelCount {
            axis,
            expected,
            actual: labels.len(),
        });
    }
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(RelationError::DuplicateLabel {
                axis,
                label: l.clone(),
            });
        }
    }
    Ok(())
}

impl fmt::Debug for BitRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitRelation {}x{}", self.n_rows, self.n_cols)?;
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Ordered list of distinct row indices into a relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct RowSeq(Vec<usize>);

impl RowSeq {
    pub fn new(rel: &BitRelation, indices: Vec<usize>) -> Result<Self, RelationError> {
        let mut seen = FixedBitSet::with_capacity(rel.n_rows());
        for &i in &indices {
            rel.check_row(i)?;
            if seen.put(i) {
                return Err(RelationError::RepeatedRow { index: i });
            }
        }
        Ok(RowSeq(indices))
    }

    /// Rows `0..n_rows` in index order.
    pub fn natural(rel: &BitRelation) -> Self {
        RowSeq((0..rel.n_rows()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Relation row at `position`.
    pub fn row(&self, position: usize) -> usize {
        self.0[position]
    }

    /// Order-preserving subsequence picked by strictly increasing positions.
    pub fn subsequence(&self, positions: &[usize]) -> Self {
        debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        RowSeq(positions.iter().map(|&p| self.0[p]).collect())
    }

    pub fn reversed(&self) -> Self {
        RowSeq(self.0.iter().rev().copied().collect())
    }
}

/// The truth pattern `(N, E)`: 1 on the positions in `E ⊆ {1..N}`, 0 elsewhere.
///
/// Position `p` is stored in bit `p - 1`, so ascending masks enumerate the
/// sets `E` in binary-counter order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternSpec {
    len: usize,
    mask: u64,
}

impl PatternSpec {
    /// `positions` are 1-based members of `E`.
    pub fn new(len: usize, positions: &[usize]) -> Result<Self, RelationError> {
        if len == 0 || len > MAX_PATTERN_LEN {
            return Err(RelationError::PatternLength(len));
        }
        let mut mask = 0u64;
        for &p in positions {
            if p == 0 || p > len {
                return Err(RelationError::PatternPosition { position: p, len });
            }
            mask |= 1 << (p - 1);
        }
        Ok(PatternSpec { len, mask })
    }

    pub fn from_mask(len: usize, mask: u64) -> Result<Self, RelationError> {
        if len == 0 || len > MAX_PATTERN_LEN {
            return Err(RelationError::PatternLength(len));
        }
        if mask >> len != 0 {
            return Err(RelationError::PatternPosition {
                position: (64 - mask.leading_zeros()) as usize,
                len,
            });
        }
        Ok(PatternSpec { len, mask })
    }

    /// Pattern read off a 0/1 word.
    pub fn from_word(word: &[bool]) -> Result<Self, RelationError> {
        let mask = word
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &b)| if b { m | 1 << i } else { m });
        Self::from_mask(word.len(), mask)
    }

    /// All specs of length `len` in binary-counter order.
    pub fn all_of_len(len: usize) -> impl Iterator<Item = PatternSpec> {
        assert!((1..=20).contains(&len), "enumeration limited to length 20");
        (0..1u64 << len).map(move |mask| PatternSpec { len, mask })
    }

    /// Alternating spec `1010…` (E = odd positions) or `0101…` (E = even positions).
    pub fn alternating(len: usize, starts_with_one: bool) -> Result<Self, RelationError> {
        let word: Vec<bool> = (0..len).map(|i| (i % 2 == 0) == starts_with_one).collect();
        Self::from_word(&word)
    }

    /// The staircase `1^ones 0^(len-ones)`.
    pub fn staircase(len: usize, ones: usize) -> Result<Self, RelationError> {
        let word: Vec<bool> = (0..len).map(|i| i < ones).collect();
        Self::from_word(&word)
    }

    /// `N`, always at least 1.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Whether 1-based `position` lies in `E`.
    pub fn contains(&self, position: usize) -> bool {
        position >= 1 && position <= self.len && self.mask >> (position - 1) & 1 == 1
    }

    pub fn bit(&self, index: usize) -> bool {
        self.mask >> index & 1 == 1
    }

    /// Members of `E`, 1-based and ascending.
    pub fn positions(&self) -> Vec<usize> {
        (1..=self.len).filter(|&p| self.contains(p)).collect()
    }

    pub fn ones(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Characteristic word of `E`.
    pub fn word(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.bit(i)).collect()
    }
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos: Vec<String> = self.positions().iter().map(|p| p.to_string()).collect();
        write!(f, "({},{{{}}})", self.len, pos.join(","))
    }
}

impl Serialize for PatternSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n: usize,
            e: Vec<usize>,
            word: String,
        }
        Repr {
            n: self.len,
            e: self.positions(),
            word: ColumnWord(self.word()).to_string(),
        }
        .serialize(serializer)
    }
}

/// Values of one column along a row sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ColumnWord(pub Vec<bool>);

impl ColumnWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    /// Number of adjacent unequal pairs.
    pub fn variation(&self) -> usize {
        variation(&self.0)
    }

    pub fn reversed(&self) -> Self {
        ColumnWord(self.0.iter().rev().copied().collect())
    }
}

pub fn variation(word: &[bool]) -> usize {
    word.windows(2).filter(|w| w[0] != w[1]).count()
}

impl fmt::Display for ColumnWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for ColumnWord {
    type Err = RelationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.bytes()
            .enumerate()
            .map(|(index, b)| match b {
                b'0' => Ok(false),
                b'1' => Ok(true),
                value => Err(RelationError::NonBinary { index, value }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(ColumnWord)
    }
}

impl Serialize for ColumnWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Deduplicated column traces over a row sequence: the realized types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeSpace {
    pub base_rows: RowSeq,
    pub types: Vec<ColumnWord>,
    pub multiplicity: Vec<usize>,
    /// First column realizing each type.
    pub representative: Vec<usize>,
}

impl TypeSpace {
    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }
}

/// Trace of column `col` along `rows`.
pub fn trace(rel: &BitRelation, rows: &RowSeq, col: usize) -> Result<ColumnWord, RelationError> {
    rel.check_col(col)?;
    for &r in rows.as_slice() {
        rel.check_row(r)?;
    }
    Ok(trace_unchecked(rel, rows, col))
}

pub(crate) fn trace_unchecked(rel: &BitRelation, rows: &RowSeq, col: usize) -> ColumnWord {
    ColumnWord(rows.as_slice().iter().map(|&r| rel.get(r, col)).collect())
}

/// All column traces along `rows`, indexed by column.
pub(crate) fn column_words(rel: &BitRelation, rows: &RowSeq) -> Vec<Vec<bool>> {
    (0..rel.n_cols())
        .map(|c| rows.as_slice().iter().map(|&r| rel.get(r, c)).collect())
        .collect()
}

/// Realized types over `rows`, in first-occurrence column order.
pub fn project_types(rel: &BitRelation, rows: &RowSeq) -> Result<TypeSpace, RelationError> {
    for &r in rows.as_slice() {
        rel.check_row(r)?;
    }
    let mut index: HashMap<ColumnWord, usize> = HashMap::new();
    let mut space = TypeSpace {
        base_rows: rows.clone(),
        types: Vec::new(),
        multiplicity: Vec::new(),
        representative: Vec::new(),
    };
    for c in 0..rel.n_cols() {
        let word = trace_unchecked(rel, rows, c);
        match index.get(&word) {
            Some(&t) => space.multiplicity[t] += 1,
            None => {
                index.insert(word.clone(), space.types.len());
                space.types.push(word);
                space.multiplicity.push(1);
                space.representative.push(c);
            }
        }
    }
    Ok(space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use proptest::prelude::*;

    fn words(space: &TypeSpace) -> Vec<String> {
        space.types.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn build_relation_examples() {
        let rel = BitRelation::new(2, 2, &[0, 1, 0, 0]).unwrap();
        assert!(rel.get(0, 1));
        assert_eq!(rel.count_ones(), 1);
        assert_eq!(
            BitRelation::new(1, 1, &[2]),
            Err(RelationError::NonBinary { index: 0, value: 2 })
        );
        assert!(matches!(
            BitRelation::new(3, 2, &[0; 7]),
            Err(RelationError::DimensionMismatch {
                expected: 6,
                actual: 7,
                ..
            })
        ));
    }

    #[test]
    fn degenerate_relations_are_legal() {
        let rel = BitRelation::new(0, 3, &[]).unwrap();
        assert_eq!(rel.n_cols(), 3);
        let rel = BitRelation::new(2, 0, &[]).unwrap();
        assert!(rel.row_ones(1).is_clear());
    }

    #[test]
    fn labels_checked() {
        let rel = BitRelation::new(2, 1, &[0, 1]).unwrap();
        assert!(rel
            .clone()
            .with_labels(Some(vec!["a".into(), "a".into()]), None)
            .is_err());
        assert!(rel.clone().with_labels(None, Some(vec![])).is_err());
        let ok = rel
            .with_labels(Some(vec!["a".into(), "b".into()]), None)
            .unwrap();
        assert_eq!(ok.row_labels().unwrap()[1], "b");
    }

    #[test]
    fn row_seq_validation() {
        let rel = BitRelation::new(3, 1, &[0, 1, 0]).unwrap();
        assert!(RowSeq::new(&rel, vec![2, 0]).is_ok());
        assert_eq!(
            RowSeq::new(&rel, vec![0, 0]),
            Err(RelationError::RepeatedRow { index: 0 })
        );
        assert!(RowSeq::new(&rel, vec![3]).is_err());
    }

    #[test]
    fn trace_examples() {
        let rel = BitRelation::new(2, 2, &[1, 0, 0, 1]).unwrap();
        let fwd = RowSeq::new(&rel, vec![0, 1]).unwrap();
        let back = RowSeq::new(&rel, vec![1, 0]).unwrap();
        assert_eq!(trace(&rel, &fwd, 0).unwrap().to_string(), "10");
        assert_eq!(trace(&rel, &back, 0).unwrap().to_string(), "01");
        let empty = RowSeq::new(&rel, vec![]).unwrap();
        assert!(trace(&rel, &empty, 1).unwrap().is_empty());
        assert!(trace(&rel, &fwd, 2).is_err());
    }

    #[test]
    fn project_types_examples() {
        let same = BitRelation::from_fn(3, 4, |i, _| i == 1);
        let space = project_types(&same, &RowSeq::natural(&same)).unwrap();
        assert_eq!(space.len(), 1);
        assert_eq!(space.multiplicity, vec![4]);

        let ps = gen::powerset(2);
        assert_eq!(project_types(&ps, &RowSeq::natural(&ps)).unwrap().len(), 4);

        let hg = gen::half_graph(3);
        let space = project_types(&hg, &RowSeq::natural(&hg)).unwrap();
        assert_eq!(words(&space), vec!["000", "100", "110"]);
    }

    #[test]
    fn pattern_spec_basics() {
        let spec = PatternSpec::new(4, &[1, 2, 4]).unwrap();
        assert_eq!(spec.to_string(), "(4,{1,2,4})");
        assert_eq!(ColumnWord(spec.word()).to_string(), "1101");
        assert_eq!(
            PatternSpec::alternating(3, true).unwrap().positions(),
            vec![1, 3]
        );
        assert_eq!(
            PatternSpec::alternating(4, false).unwrap().positions(),
            vec![2, 4]
        );
        assert_eq!(
            PatternSpec::staircase(3, 2).unwrap().positions(),
            vec![1, 2]
        );
        assert!(PatternSpec::new(0, &[]).is_err());
        assert!(PatternSpec::new(2, &[3]).is_err());
        assert!(PatternSpec::from_mask(2, 0b100).is_err());
        let order: Vec<String> = PatternSpec::all_of_len(2).map(|s| s.to_string()).collect();
        assert_eq!(order, vec!["(2,{})", "(2,{1})", "(2,{2})", "(2,{1,2})"]);
    }

    fn small_relation() -> impl Strategy<Value = BitRelation> {
        (0usize..6, 0usize..6).prop_flat_map(|(m, n)| {
            proptest::collection::vec(0u8..2, m * n)
                .prop_map(move |e| BitRelation::new(m, n, &e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn natural_trace_reproduces_columns(rel in small_relation()) {
            let rows = RowSeq::natural(&rel);
            for c in 0..rel.n_cols() {
                let w = trace(&rel, &rows, c).unwrap();
                for r in 0..rel.n_rows() {
                    prop_assert_eq!(w.0[r], rel.get(r, c));
                }
            }
        }

        #[test]
        fn projection_is_idempotent(rel in small_relation()) {
            let rows = RowSeq::natural(&rel);
            let space = project_types(&rel, &rows).unwrap();
            prop_assert_eq!(space.multiplicity.iter().sum::<usize>(), rel.n_cols());
            let typed = BitRelation::from_fn(rel.n_rows(), space.len(), |i, j| space.types[j].0[i]);
            let again = project_types(&typed, &RowSeq::natural(&typed)).unwrap();
            prop_assert_eq!(&again.types, &space.types);
            prop_assert!(again.multiplicity.iter().all(|&m| m == 1));
        }
    }
}
