//! Composite analysis of one relation.
//!
//! The report is serialized as pretty JSON with fields in declaration
//! order. Detectors run on a worker pool but each one is sequential and
//! deterministic, so the report does not depend on the number of workers.

use serde::Serialize;
use thiserror::Error;

use crate::baire::{self, BaireError, DoubleLimit, LimitClass, LimitClassification};
use crate::detect::{
    self, Alternation, DetectError, LadderResult, SopSearch, SwapWitness, VcResult, VerifyError,
};
use crate::format;
use crate::relcore::{BitRelation, PatternSpec, RelationError, RowSeq};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalyzeOptions {
    pub max_n: usize,
    pub max_k: usize,
    pub max_d: usize,
    pub ladder_depth: usize,
    /// `None` selects [`baire::default_tail`] for the row count.
    pub tail: Option<usize>,
    pub budget: u64,
    /// Row order; `None` is the natural order.
    pub rows: Option<Vec<usize>>,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            max_n: 4,
            max_k: 12,
            max_d: 6,
            ladder_depth: 4,
            tail: None,
            budget: detect::DEFAULT_BUDGET,
            rows: None,
            workers: 1,
        }
    }
}

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("invalid option: {0}")]
    Option(String),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    Baire(#[from] BaireError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("internal: {0}")]
    Witness(#[from] VerifyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub n_rows: usize,
    pub n_cols: usize,
    pub ones: usize,
    /// FNV-1a 64 of the canonical matrix text, as 16 hex digits.
    pub content_hash: String,
    pub row_order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternSection {
    pub max_n: usize,
    pub avoided: Option<PatternSpec>,
    pub alternation: Alternation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SwapSection {
    /// No avoided pattern to start from.
    NotApplicable,
    Found {
        witness: SwapWitness,
    },
    Failed {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitSection {
    pub tail: usize,
    /// Types are the distinct columns present in the data.
    pub realized_types: usize,
    pub values: Vec<Option<bool>>,
    pub stabilization_index: Vec<Option<usize>>,
    /// Present when every type converges.
    pub f1: Option<Vec<u32>>,
    pub f2: Option<Vec<u32>>,
    pub classification: LimitClassification,
    /// Rows in the analyzed order against all columns in index order.
    pub double_limit: DoubleLimit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    /// Longest ladder found; exact when `op_exact`.
    pub op_level: usize,
    pub op_exact: bool,
    /// Largest shattered set found; exact when `ip_exact`.
    pub ip_level: usize,
    pub ip_exact: bool,
    pub sop_guarantee: bool,
    pub limit_class: Option<LimitClass>,
    /// With a ladder of length 2 or more: which finite witnesses accompany it
    /// (`ip` for a shattered pair, `sop` for a swap witness).
    pub op_accompanied_by: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub tool: Tool,
    pub input: InputDigest,
    pub options: AnalyzeOptions,
    pub ladder: LadderResult,
    pub vc: VcResult,
    pub patterns: PatternSection,
    pub sop_guarantee: SopSearch,
    pub swap: SwapSection,
    /// Absent for an empty row sequence.
    pub limit: Option<LimitSection>,
    pub summary: Summary,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Re-checks every witness against `rel`.
    pub fn verify(&self, rel: &BitRelation) -> Result<(), VerifyError> {
        let rows = RowSeq::new(rel, self.input.row_order.clone())
            .map_err(|e| VerifyError::new("input", e.to_string()))?;
        self.ladder.witness.verify_in(rel, &rows)?;
        if let Some(w) = &self.vc.witness {
            w.verify(rel)?;
        }
        if let Some(w) = &self.sop_guarantee.witness {
            w.verify(rel)?;
        }
        if let SwapSection::Found { witness } = &self.swap {
            witness.verify(rel)?;
        }
        if let Some(ladder) = self
            .limit
            .as_ref()
            .and_then(|l| l.classification.ladder.as_ref())
        {
            ladder.verify_in(rel, &rows)?;
        }
        Ok(())
    }
}

fn check_options(opts: &AnalyzeOptions) -> Result<(), AnalyzeError> {
    if opts.max_n == 0 || opts.max_n > detect::MAX_ENUMERATED_PATTERN_LEN {
        return Err(AnalyzeError::Option(format!(
            "--max-n must be in 1..={}",
            detect::MAX_ENUMERATED_PATTERN_LEN
        )));
    }
    if opts.ladder_depth < 2 {
        return Err(AnalyzeError::Option(
            "--ladder-depth must be at least 2".into(),
        ));
    }
    if opts.workers == 0 {
        return Err(AnalyzeError::Option("--workers must be positive".into()));
    }
    Ok(())
}

pub fn analyze(rel: &BitRelation, opts: &AnalyzeOptions) -> Result<AnalysisReport, AnalyzeError> {
    check_options(opts)?;
    let rows = match &opts.rows {
        Some(order) => RowSeq::new(rel, order.clone())?,
        None => RowSeq::natural(rel),
    };
    let tail = opts.tail.unwrap_or_else(|| baire::default_tail(rows.len()));
    if !rows.is_empty() && (tail == 0 || tail > rows.len()) {
        return Err(AnalyzeError::Option(format!(
            "--tail must be in 1..={}",
            rows.len()
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| AnalyzeError::Pool(e.to_string()))?;

    let (((ladder, vc), patterns), (sop, limit)) = pool.install(|| {
        rayon::join(
            || {
                rayon::join(
                    || {
                        rayon::join(
                            || detect::ladder_index_in(rel, &rows, opts.max_k, opts.budget),
                            || detect::vc_dimension(rel, opts.max_d, opts.budget),
                        )
                    },
                    || {
                        pattern_section(rel, &rows, opts.max_n).map(|p| {
                            let swap = swap_section(rel, &rows, p.avoided.as_ref());
                            (p, swap)
                        })
                    },
                )
            },
            || {
                rayon::join(
                    || {
                        detect::sop_guarantee(
                            rel,
                            &rows,
                            opts.max_n,
                            opts.ladder_depth,
                            opts.budget,
                        )
                    },
                    || limit_section(rel, &rows, tail, opts),
                )
            },
        )
    });
    let ladder = ladder?;
    let (patterns, swap) = patterns?;
    let sop = sop?;
    let limit = limit?;

    let mut op_accompanied_by = Vec::new();
    if ladder.k >= 2 {
        if vc.d >= 2 {
            op_accompanied_by.push("ip");
        }
        if matches!(swap, SwapSection::Found { .. }) {
            op_accompanied_by.push("sop");
        }
    }
    let summary = Summary {
        op_level: ladder.k,
        op_exact: ladder.stats.complete,
        ip_level: vc.d,
        ip_exact: vc.stats.complete,
        sop_guarantee: sop.witness.is_some(),
        limit_class: limit.as_ref().map(|l| l.classification.class),
        op_accompanied_by,
    };
    let report = AnalysisReport {
        tool: Tool {
            name: TOOL_NAME,
            version: TOOL_VERSION,
        },
        input: InputDigest {
            n_rows: rel.n_rows(),
            n_cols: rel.n_cols(),
            ones: rel.count_ones(),
            content_hash: format!("{:016x}", format::content_hash(rel)),
            row_order: rows.as_slice().to_vec(),
        },
        options: AnalyzeOptions {
            tail: Some(tail),
            ..opts.clone()
        },
        ladder,
        vc,
        patterns,
        sop_guarantee: sop,
        swap,
        limit,
        summary,
    };
    report.verify(rel)?;
    Ok(report)
}

fn pattern_section(
    rel: &BitRelation,
    rows: &RowSeq,
    max_n: usize,
) -> Result<PatternSection, DetectError> {
    Ok(PatternSection {
        max_n,
        avoided: detect::find_avoided_pattern(rel, rows, max_n)?,
        alternation: detect::alternation_sum(rel, rows)?,
    })
}

fn swap_section(rel: &BitRelation, rows: &RowSeq, avoided: Option<&PatternSpec>) -> SwapSection {
    match avoided {
        None => SwapSection::NotApplicable,
        Some(spec) if spec.len() < 2 || spec.len() > rows.len() => SwapSection::NotApplicable,
        Some(spec) => match detect::extract_sop_formula_witness(rel, rows, spec) {
            Ok(witness) => SwapSection::Found { witness },
            Err(e) => SwapSection::Failed {
                reason: e.to_string(),
            },
        },
    }
}

fn limit_section(
    rel: &BitRelation,
    rows: &RowSeq,
    tail: usize,
    opts: &AnalyzeOptions,
) -> Result<Option<LimitSection>, AnalyzeError> {
    if rows.is_empty() {
        return Ok(None);
    }
    let seq = baire::function_sequence(rel, rows)?;
    let limit = baire::pointwise_limit(&seq, tail)?;
    let (f1, f2) = match baire::dbsc_decompose(&seq, tail) {
        Ok((dec, _)) => (Some(dec.f1), Some(dec.f2)),
        Err(BaireError::NotConverged { .. }) => (None, None),
        Err(e) => return Err(e.into()),
    };
    let classification = baire::classify_limit(rel, rows, tail, opts.max_n, opts.budget)?;
    let cols: Vec<usize> = (0..rel.n_cols()).collect();
    let double_limit = if cols.is_empty() {
        DoubleLimit::Indeterminate {
            order: baire::IteratedOrder::RowsOuter,
            side: baire::LimitSide::Inner,
        }
    } else {
        baire::double_limit_check(rel, rows, &cols, tail)?
    };
    Ok(Some(LimitSection {
        tail,
        realized_types: seq.types.len(),
        values: limit.values,
        stabilization_index: limit.stabilization_index,
        f1,
        f2,
        classification,
        double_limit,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn strict_chain_report() {
        let rel = gen::strict_chain(6);
        let opts = AnalyzeOptions {
            tail: Some(1),
            ..AnalyzeOptions::default()
        };
        let report = analyze(&rel, &opts).unwrap();
        assert!(report.summary.sop_guarantee);
        assert_eq!(report.summary.limit_class, Some(LimitClass::DbscProxy));
        assert_eq!(report.summary.op_level, 6);
        assert_eq!(
            report.patterns.avoided,
            Some(PatternSpec::new(2, &[2]).unwrap())
        );
        assert!(matches!(report.swap, SwapSection::Found { .. }));
        assert_eq!(report.summary.op_accompanied_by, vec!["sop"]);
    }

    #[test]
    fn powerset_report() {
        let rel = gen::powerset(3);
        let opts = AnalyzeOptions {
            max_n: 3,
            ..AnalyzeOptions::default()
        };
        let report = analyze(&rel, &opts).unwrap();
        assert_eq!(report.vc.d, 3);
        assert_eq!(report.patterns.avoided, None);
        assert!(!report.summary.sop_guarantee);
    }

    #[test]
    fn all_zeros_floor() {
        let rel = gen::constant(5, 5, false);
        let report = analyze(&rel, &AnalyzeOptions::default()).unwrap();
        assert_eq!(report.ladder.k, 1);
        assert_eq!(report.vc.d, 0);
        assert_eq!(
            report.patterns.avoided,
            Some(PatternSpec::new(1, &[1]).unwrap())
        );
        assert_eq!(report.patterns.alternation.max, 0);
        assert!(!report.summary.sop_guarantee);
        assert!(report.summary.op_accompanied_by.is_empty());
        assert_eq!(
            report.summary.limit_class,
            Some(LimitClass::ContinuousProxy)
        );
    }

    #[test]
    fn empty_relation() {
        let rel = BitRelation::new(0, 0, &[]).unwrap();
        let report = analyze(&rel, &AnalyzeOptions::default()).unwrap();
        assert!(report.limit.is_none());
        assert_eq!(report.ladder.k, 0);
    }

    #[test]
    fn workers_do_not_change_output() {
        let rel = gen::random_bipartite(12, 12, 1, 2, 42).unwrap();
        let one = analyze(&rel, &AnalyzeOptions::default()).unwrap().to_json();
        let four = analyze(
            &rel,
            &AnalyzeOptions {
                workers: 4,
                ..AnalyzeOptions::default()
            },
        )
        .unwrap()
        .to_json();
        assert_eq!(one, four);
    }

    #[test]
    fn option_errors() {
        let rel = gen::half_graph(4);
        for opts in [
            AnalyzeOptions {
                max_n: 0,
                ..AnalyzeOptions::default()
            },
            AnalyzeOptions {
                ladder_depth: 1,
                ..AnalyzeOptions::default()
            },
            AnalyzeOptions {
                tail: Some(9),
                ..AnalyzeOptions::default()
            },
            AnalyzeOptions {
                rows: Some(vec![0, 0]),
                ..AnalyzeOptions::default()
            },
        ] {
            assert!(analyze(&rel, &opts).is_err());
        }
    }
}
