//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N ... PASS|FAIL` line to the real stdout before asserting.

use std::io::Write;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use dividing_lines::baire::{self, DoubleLimit};
use dividing_lines::detect::{self, DEFAULT_BUDGET};
use dividing_lines::gen;
use dividing_lines::oracle;
use dividing_lines::suites::{self, SuiteReport};
use dividing_lines::{BitRelation, PatternSpec, RowSeq};

fn record(id: u32, name: &str, ok: bool, elapsed: Duration, detail: &str) {
    let line = format!(
        "criterion {id:>2} {name:<40} {} ({:.2}s) {detail}\n",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

fn finish(id: u32, name: &str, ok: bool, elapsed: Duration, limit: Option<u64>, detail: &str) {
    let in_time = limit.is_none_or(|s| elapsed <= Duration::from_secs(s));
    let detail = if in_time {
        detail.to_string()
    } else {
        format!("{detail}; over the {}s limit", limit.unwrap())
    };
    record(id, name, ok && in_time, elapsed, &detail);
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded its time limit");
}

/// Both directions of the bounded-alternation lemma over all relations up to 4×4.
struct LemmaSweep {
    forward_checks: u64,
    forward_failures: u64,
    backward_checks: u64,
    backward_failures: u64,
    shorter: u64,
    elapsed: Duration,
}

fn lemma_sweep() -> &'static LemmaSweep {
    static SWEEP: OnceLock<LemmaSweep> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let start = Instant::now();
        let mut s = LemmaSweep {
            forward_checks: 0,
            forward_failures: 0,
            backward_checks: 0,
            backward_failures: 0,
            shorter: 0,
            elapsed: Duration::ZERO,
        };
        for bits in 0u32..1 << 16 {
            let rel = BitRelation::from_fn(4, 4, |i, j| bits >> (4 * i + j) & 1 == 1);
            let rows = RowSeq::natural(&rel);
            let alt = detect::alternation_sum(&rel, &rows).unwrap().max;
            for n in 1..=4 {
                for spec in PatternSpec::all_of_len(n) {
                    if detect::pattern_avoided(&rel, &rows, &spec).is_avoided() {
                        s.forward_checks += 1;
                        s.forward_failures += (alt > 2 * n - 2) as u64;
                    }
                }
            }
            let avoided = |len: usize| {
                [true, false].map(|first| {
                    detect::pattern_avoided(
                        &rel,
                        &rows,
                        &PatternSpec::alternating(len, first).unwrap(),
                    )
                    .is_avoided()
                })
            };
            s.backward_checks += 1;
            s.backward_failures += !avoided(alt + 2).iter().all(|&b| b) as u64;
            s.shorter += (alt == 0 || avoided(alt + 1).iter().any(|&b| b)) as u64;
        }
        s.elapsed = start.elapsed();
        s
    })
}

#[test]
fn criterion_01_bounded_variation_forward() {
    let s = lemma_sweep();
    let ok = s.forward_checks > 0 && s.forward_failures == 0;
    let detail = format!(
        "{} avoided (N,E) instances, {} with alternation > 2N-2; sweep {:.2}s",
        s.forward_checks,
        s.forward_failures,
        s.elapsed.as_secs_f64()
    );
    finish(
        1,
        "avoided pattern bounds alternation",
        ok,
        s.elapsed,
        Some(60),
        &detail,
    );
}

#[test]
fn criterion_02_bounded_variation_backward() {
    let s = lemma_sweep();
    let ok = s.backward_failures == 0;
    let detail = format!(
        "{} relations, {} failures; N=M+1 suffices in {}/{} ({:.4})",
        s.backward_checks,
        s.backward_failures,
        s.shorter,
        s.backward_checks,
        s.shorter as f64 / s.backward_checks as f64
    );
    finish(
        2,
        "alternation M forces length M+2 avoided",
        ok,
        s.elapsed,
        Some(60),
        &detail,
    );
}

fn suite_detail(r: &SuiteReport) -> String {
    let mut d = format!("{} checks, {} failures", r.checks, r.failures);
    for n in &r.notes {
        d.push_str("; ");
        d.push_str(n);
    }
    if let Some(cx) = &r.counterexample {
        d.push_str("; first counterexample: ");
        d.push_str(&cx.description);
    }
    d
}

#[test]
fn criterion_03_avoidance_duality() {
    let start = Instant::now();
    let r = suites::duality(4, 1000, 0);
    finish(
        3,
        "subsequence scan equals tuple enumeration",
        r.passed(),
        start.elapsed(),
        Some(60),
        &suite_detail(&r),
    );
}

#[test]
fn criterion_04_dbsc_identity() {
    let start = Instant::now();
    let r = suites::dbsc(10_000, 7);
    finish(
        4,
        "F1-F2 = limit, F1+F2 = variation",
        r.passed(),
        start.elapsed(),
        Some(10),
        &suite_detail(&r),
    );
}

#[test]
fn criterion_05_canonical_witnesses() {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 3..=8 {
        let hg = gen::half_graph(n);
        let ladder = detect::ladder_index(&hg, 12, DEFAULT_BUDGET);
        if ladder.k != n || !ladder.stats.complete || ladder.witness.verify(&hg).is_err() {
            bad.push(format!("ladder(half_graph({n})) = {}", ladder.k));
        }
        let brute = oracle::vc_dimension(&hg);
        let vc = detect::vc_dimension(&hg, 6, DEFAULT_BUDGET);
        if brute != 1 || vc.d != 1 || !vc.stats.complete {
            bad.push(format!("vc(half_graph({n})) = {} (oracle {brute})", vc.d));
        }
    }
    for d in 0..=4 {
        let ps = gen::powerset(d);
        let vc = detect::vc_dimension(&ps, 6, DEFAULT_BUDGET);
        if vc.d != d || vc.witness.as_ref().is_none_or(|w| w.verify(&ps).is_err()) {
            bad.push(format!("vc(powerset({d})) = {}", vc.d));
        }
    }
    let detail = if bad.is_empty() {
        "all values exact".to_string()
    } else {
        bad.join("; ")
    };
    finish(
        5,
        "ladder and VC values on generators",
        bad.is_empty(),
        start.elapsed(),
        Some(30),
        &detail,
    );
}

#[test]
fn criterion_06_sop_guarantee() {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 4..=10 {
        let chain = gen::strict_chain(n);
        let res =
            detect::sop_guarantee(&chain, &RowSeq::natural(&chain), 2, 3, DEFAULT_BUDGET).unwrap();
        match res.witness {
            Some(w) if w.pattern.len() == 2 && w.verify(&chain).is_ok() => {}
            other => bad.push(format!("strict_chain({n}): {other:?}")),
        }
    }
    let ps = gen::powerset(3);
    if detect::sop_guarantee(&ps, &RowSeq::natural(&ps), 2, 3, DEFAULT_BUDGET)
        .unwrap()
        .witness
        .is_some()
    {
        bad.push("powerset(3) has a witness".into());
    }
    let zeros = gen::constant(6, 6, false);
    if detect::sop_guarantee(&zeros, &RowSeq::natural(&zeros), 2, 3, DEFAULT_BUDGET)
        .unwrap()
        .witness
        .is_some()
    {
        bad.push("all-zeros has a witness".into());
    }
    let detail = if bad.is_empty() {
        "N=2 on strict_chain(4..=10); absent on powerset(3), all-zeros".to_string()
    } else {
        bad.join("; ")
    };
    finish(
        6,
        "SOP-guarantee present and absent",
        bad.is_empty(),
        start.elapsed(),
        None,
        &detail,
    );
}

#[test]
fn criterion_07_swap_walk() {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut found = Vec::new();
    let chain = gen::strict_chain(8);
    let ex1 = gen::example1(16).unwrap();
    let a_rows = RowSeq::new(&ex1, (0..16).collect()).unwrap();
    for (name, rel, rows) in [
        ("strict_chain(8)", &chain, RowSeq::natural(&chain)),
        ("example1(16) on A", &ex1, a_rows),
    ] {
        let spec = detect::find_avoided_pattern(rel, &rows, 4).unwrap();
        let Some(spec) = spec else {
            bad.push(format!("{name}: no avoided pattern"));
            continue;
        };
        match detect::extract_sop_formula_witness(rel, &rows, &spec) {
            Ok(w) => match w.verify(rel) {
                Ok(()) => found.push(format!(
                    "{name}: {spec} -> i0={} col={}",
                    w.i0, w.consistent_col
                )),
                Err(e) => bad.push(format!("{name}: {e}")),
            },
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    let detail = if bad.is_empty() {
        found.join("; ")
    } else {
        bad.join("; ")
    };
    finish(
        7,
        "swap witness re-verifies by column scan",
        bad.is_empty(),
        start.elapsed(),
        None,
        &detail,
    );
}

#[test]
fn criterion_08_double_limit() {
    let start = Instant::now();
    let hg = gen::half_graph(8);
    let got = baire::double_limit_check(&hg, &RowSeq::natural(&hg), &(0..8).collect::<Vec<_>>(), 2)
        .unwrap();
    let example_ok = got
        == DoubleLimit::Unequal {
            rows_outer: true,
            cols_outer: false,
        };
    let r = suites::double_limit(4);
    let detail = format!("half_graph(8): {got:?}; sweep: {}", suite_detail(&r));
    finish(
        8,
        "unequal iterated limits imply a ladder",
        example_ok && r.passed(),
        start.elapsed(),
        None,
        &detail,
    );
}

#[test]
fn criterion_09_example1_ip_proxy() {
    let start = Instant::now();
    let mut bad = Vec::new();
    let base = gen::example1(16).unwrap();
    let expected = oracle::vc_dimension(&base);
    let mut values = Vec::new();
    for n in [16, 24, 32] {
        let rel = gen::example1(n).unwrap();
        let vc = detect::vc_dimension(&rel, 6, DEFAULT_BUDGET);
        let ladder = detect::ladder_index(&rel, 12, DEFAULT_BUDGET);
        if vc.d != expected || !vc.stats.complete {
            bad.push(format!(
                "vc(example1({n})) = {} (expected {expected})",
                vc.d
            ));
        }
        if ladder.k < 8 || ladder.witness.verify(&rel).is_err() {
            bad.push(format!("ladder(example1({n})) = {}", ladder.k));
        }
        values.push(format!("n={n}: vc={} ladder={}", vc.d, ladder.k));
    }
    let detail = if bad.is_empty() {
        format!("oracle vc at 16 = {expected}; {}", values.join(", "))
    } else {
        bad.join("; ")
    };
    finish(
        9,
        "example1 VC constant, ladder >= 8",
        bad.is_empty(),
        start.elapsed(),
        Some(120),
        &detail,
    );
}

#[test]
fn criterion_10_ramsey() {
    let start = Instant::now();
    let r = suites::ramsey(200, 0);
    finish(
        10,
        "exhaustive Ramsey search matches brute force",
        r.passed(),
        start.elapsed(),
        Some(120),
        &suite_detail(&r),
    );
}

#[test]
fn criterion_11_report_determinism() {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_divlines");
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("random.txt");
    let status = Command::new(bin)
        .args(["gen", "random", "12", "12", "1", "2", "--seed", "42", "-o"])
        .arg(&input)
        .status()
        .unwrap();
    assert!(status.success());
    let run = |workers: &str| {
        let out = Command::new(bin)
            .arg("analyze")
            .arg(&input)
            .args(["--workers", workers])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };
    let (a, b, c) = (run("1"), run("1"), run("4"));
    let ok = !a.is_empty() && a == b && a == c;
    let detail = format!(
        "{} bytes; repeat equal: {}; 1 vs 4 workers equal: {}",
        a.len(),
        a == b,
        a == c
    );
    finish(
        11,
        "analyze output byte-identical",
        ok,
        start.elapsed(),
        None,
        &detail,
    );
}
