//! Exact witness search over finite 0/1 relations.
//!
//! A relation `rel(a_i, b_j)` is read as rows `a_i` and columns `b_j`.
//! Detectors return checkable certificates (ladders, shattered sets,
//! pattern realizations, swap witnesses), and every search that can run
//! out of budget says so in its result.

pub mod baire;
pub mod detect;
pub mod format;
pub mod gen;
pub mod oracle;
pub mod relcore;
pub mod report;
pub mod suites;

pub use relcore::{BitRelation, ColumnWord, PatternSpec, RelationError, RowSeq, TypeSpace};
