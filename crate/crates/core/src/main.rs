use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dividing_lines::format::{self, Format};
use dividing_lines::gen::GenSpec;
use dividing_lines::report::{self, AnalyzeOptions};
use dividing_lines::suites::{self, Suite, SuiteParams};

#[derive(Parser)]
#[command(
    name = "divlines",
    version,
    about = "Witness search over finite 0/1 relations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a relation.
    Gen(GenArgs),
    /// Run every detector on a relation and print a JSON report.
    Analyze(AnalyzeArgs),
    /// Run an oracle verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
    /// Output file; standard output when absent.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Matrix, global = true)]
    format: OutFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Matrix,
    Edges,
}

#[derive(Subcommand)]
enum GenKind {
    /// rel(a_i, b_j) = 1 iff i < j.
    HalfGraph { n: usize },
    /// d rows, 2^d columns, one per subset.
    Powerset { d: usize },
    /// The order relation < on n elements.
    StrictChain { n: usize },
    /// Independent entries with probability p_num/p_den.
    Random {
        m: usize,
        n: usize,
        p_num: u64,
        p_den: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Chain on A plus layered gadgets.
    Example1 { n: usize },
    /// The example1 gadgets, indexed by a family of subsets of 1..=n.
    Example2 {
        n: usize,
        /// Members separated by `;`, elements by `,` (1-based), e.g. `1,2,3;2,3`.
        /// Defaults to all suffixes.
        #[arg(long)]
        family: Option<String>,
    },
    /// Every entry equal to `value` (0 or 1).
    Constant {
        m: usize,
        n: usize,
        #[arg(value_parser = clap::value_parser!(u8).range(0..=1))]
        value: u8,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Relation file in matrix or edge-list format; `-` reads standard input.
    input: PathBuf,
    #[arg(long, default_value_t = 4)]
    max_n: usize,
    #[arg(long, default_value_t = 12)]
    max_k: usize,
    #[arg(long, default_value_t = 6)]
    max_d: usize,
    #[arg(long, default_value_t = 4)]
    ladder_depth: usize,
    /// Stable suffix length for limits; defaults to max(2, ceil(m/4)).
    #[arg(long)]
    tail: Option<usize>,
    #[arg(long, default_value_t = dividing_lines::detect::DEFAULT_BUDGET)]
    budget: u64,
    /// Row order as comma-separated 0-based indices.
    #[arg(long, value_delimiter = ',')]
    rows: Option<Vec<usize>>,
    /// Worker threads; the report does not depend on this.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    suite: Suite,
    /// Largest side of exhaustive sweeps.
    #[arg(long, default_value_t = 4)]
    max: usize,
    /// Random words for the dbsc suite.
    #[arg(long, default_value_t = 10_000)]
    words: usize,
    /// Random relations for the duality and ramsey suites.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the counterexample relation on failure.
    #[arg(long)]
    dump: Option<PathBuf>,
}

const SUCCESS: u8 = 0;
const VERIFY_FAILED: u8 = 1;
const USAGE: u8 = 2;

fn usage_error(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    USAGE
}

fn parse_family(text: &str) -> Result<Vec<Vec<usize>>, String> {
    text.split(';')
        .map(|member| {
            member
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| format!("bad family element {s:?}"))
                })
                .collect()
        })
        .collect()
}

fn write_output(path: Option<&Path>, out: &mut dyn Write, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => out.write_all(text.as_bytes()),
    }
}

fn cmd_gen(args: GenArgs, out: &mut dyn Write) -> u8 {
    let spec = match args.kind {
        GenKind::HalfGraph { n } => GenSpec::HalfGraph { n },
        GenKind::Powerset { d } => GenSpec::Powerset { d },
        GenKind::StrictChain { n } => GenSpec::StrictChain { n },
        GenKind::Random {
            m,
            n,
            p_num,
            p_den,
            seed,
        } => GenSpec::RandomBipartite {
            m,
            n,
            p_num,
            p_den,
            seed,
        },
        GenKind::Example1 { n } => GenSpec::Example1 { n },
        GenKind::Example2 { n, family } => {
            let family = match family.as_deref().map(parse_family).transpose() {
                Ok(f) => f,
                Err(e) => return usage_error(e),
            };
            GenSpec::Example2 { n, family }
        }
        GenKind::Constant { m, n, value } => GenSpec::Constant {
            m,
            n,
            value: value == 1,
        },
    };
    let rel = match spec.build() {
        Ok(rel) => rel,
        Err(e) => return usage_error(e),
    };
    let format = match args.format {
        OutFormat::Matrix => Format::Matrix,
        OutFormat::Edges => Format::Edges,
    };
    match write_output(args.output.as_deref(), out, &format::write(&rel, format)) {
        Ok(()) => SUCCESS,
        Err(e) => usage_error(e),
    }
}

fn read_input(path: &Path) -> io::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path)
    }
}

fn cmd_analyze(args: AnalyzeArgs, out: &mut dyn Write) -> u8 {
    let text = match read_input(&args.input) {
        Ok(t) => t,
        Err(e) => return usage_error(format!("{}: {e}", args.input.display())),
    };
    let rel = match format::parse(&text) {
        Ok(r) => r,
        Err(e) => return usage_error(format!("{}: {e}", args.input.display())),
    };
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let opts = AnalyzeOptions {
        max_n: args.max_n,
        max_k: args.max_k,
        max_d: args.max_d,
        ladder_depth: args.ladder_depth,
        tail: args.tail,
        budget: args.budget,
        rows: args.rows,
        workers,
    };
    match report::analyze(&rel, &opts) {
        Ok(r) => match write_output(None, out, &r.to_json()) {
            Ok(()) => SUCCESS,
            Err(e) => usage_error(e),
        },
        Err(e) => usage_error(e),
    }
}

fn cmd_verify(args: VerifyArgs, out: &mut dyn Write) -> u8 {
    let params = SuiteParams {
        max: args.max,
        words: args.words,
        count: args.count,
        seed: args.seed,
    };
    if params.max == 0 || params.max > 5 {
        return usage_error("--max must be in 1..=5");
    }
    let report = suites::run(args.suite, &params);
    let mut text = report.to_string();
    if let Some(cx) = &report.counterexample {
        let matrix = format::to_matrix(&cx.relation);
        match &args.dump {
            Some(path) => {
                if let Err(e) = fs::write(path, &matrix) {
                    return usage_error(format!("{}: {e}", path.display()));
                }
            }
            None => text.push_str(&matrix),
        }
    }
    if let Err(e) = out.write_all(text.as_bytes()) {
        return usage_error(e);
    }
    if report.passed() {
        SUCCESS
    } else {
        VERIFY_FAILED
    }
}

fn run<I, T>(args: I, out: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { USAGE } else { SUCCESS };
        }
    };
    match cli.command {
        Command::Gen(args) => cmd_gen(args, out),
        Command::Analyze(args) => cmd_analyze(args, out),
        Command::Verify(args) => cmd_verify(args, out),
    }
}

fn main() -> ExitCode {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = run(std::env::args_os(), &mut out);
    let _ = out.flush();
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dividing_lines::gen;

    fn call(args: &[&str]) -> (u8, String) {
        let mut out = Vec::new();
        let code = run(
            std::iter::once("divlines").chain(args.iter().copied()),
            &mut out,
        );
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn gen_output_reparses_bit_identically() {
        let cases: [(&[&str], _); 5] = [
            (&["gen", "half-graph", "5"], gen::half_graph(5)),
            (&["gen", "powerset", "3"], gen::powerset(3)),
            (&["gen", "strict-chain", "4"], gen::strict_chain(4)),
            (
                &["gen", "random", "12", "12", "1", "2", "--seed", "42"],
                gen::random_bipartite(12, 12, 1, 2, 42).unwrap(),
            ),
            (&["gen", "example1", "16"], gen::example1(16).unwrap()),
        ];
        for (args, expected) in cases {
            let (code, text) = call(args);
            assert_eq!(code, SUCCESS, "{args:?}");
            assert_eq!(format::parse(&text).unwrap(), expected, "{args:?}");
        }
    }

    #[test]
    fn gen_shapes_and_formats() {
        assert!(call(&["gen", "example1", "16"]).1.starts_with("20 20\n"));
        let (_, text) = call(&["gen", "half-graph", "3", "--format", "edges"]);
        assert!(text.starts_with("edges 3 3\n1 2\n1 3\n2 3\n"));
        assert_eq!(format::parse(&text).unwrap(), gen::half_graph(3));
        assert_eq!(
            call(&["gen", "example2", "3", "--family", "1,2,3;2,3"]).0,
            SUCCESS
        );
        assert_eq!(
            call(&["gen", "constant", "2", "3", "1"]).1,
            "2 3\n111\n111\n"
        );
    }

    #[test]
    fn gen_writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hg.txt");
        let (code, text) = call(&["gen", "half-graph", "4", "-o", path.to_str().unwrap()]);
        assert_eq!(code, SUCCESS);
        assert!(text.is_empty());
        let written = fs::read_to_string(&path).unwrap();
        assert_eq!(format::parse(&written).unwrap(), gen::half_graph(4));
    }

    #[test]
    fn usage_errors() {
        for args in [
            &["verify", "bogus"][..],
            &["verify", "lemma-bv", "--max", "9"],
            &["gen", "random", "2", "2", "3", "2"],
            &["gen", "constant", "2", "2", "5"],
            &["gen", "example1", "1"],
            &["gen", "example2", "3", "--family", "1,x"],
            &["analyze", "/nonexistent/relation.txt"],
            &["frobnicate"],
        ] {
            assert_eq!(call(args).0, USAGE, "{args:?}");
        }
    }

    #[test]
    fn analyze_rejects_malformed_input_and_flags() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.txt");
        fs::write(&bad, "2 2\n01\n2\n").unwrap();
        assert_eq!(call(&["analyze", bad.to_str().unwrap()]).0, USAGE);
        let good = dir.path().join("good.txt");
        fs::write(&good, format::to_matrix(&gen::half_graph(4))).unwrap();
        let g = good.to_str().unwrap();
        assert_eq!(call(&["analyze", g, "--ladder-depth", "1"]).0, USAGE);
        assert_eq!(call(&["analyze", g, "--tail", "9"]).0, USAGE);
        assert_eq!(call(&["analyze", g, "--rows", "0,0"]).0, USAGE);
        assert_eq!(call(&["analyze", g, "--workers", "0"]).0, USAGE);
    }

    #[test]
    fn analyze_report_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("chain.txt");
        fs::write(&path, format::to_matrix(&gen::strict_chain(6))).unwrap();
        let p = path.to_str().unwrap();
        let (code, text) = call(&["analyze", p, "--tail", "1", "--rows", "0,1,2,3,4,5"]);
        assert_eq!(code, SUCCESS);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["summary"]["sop_guarantee"], true);
        assert_eq!(v["summary"]["limit_class"], "DBSC_PROXY");
        assert_eq!(v["options"]["tail"], 1);
        let hash = format!("{:016x}", format::content_hash(&gen::strict_chain(6)));
        assert_eq!(v["input"]["content_hash"], hash);

        let (_, zeros) = {
            fs::write(&path, format::to_matrix(&gen::constant(4, 4, false))).unwrap();
            call(&["analyze", p])
        };
        let v: serde_json::Value = serde_json::from_str(&zeros).unwrap();
        assert_eq!(v["summary"]["op_level"], 1);
        assert_eq!(v["summary"]["ip_level"], 0);
        assert_eq!(v["summary"]["sop_guarantee"], false);
    }

    #[test]
    fn verify_exit_codes_and_dump() {
        let (code, text) = call(&["verify", "lemma-bv", "--max", "3"]);
        assert_eq!(code, SUCCESS);
        assert!(text.starts_with("lemma-bv: PASS"));
        assert_eq!(
            call(&["verify", "dbsc", "--words", "64", "--seed", "7"]).0,
            SUCCESS
        );

        let dir = tempfile::tempdir().unwrap();
        let dump = dir.path().join("cx.txt");
        let (code, text) = call(&["verify", "double-limit", "--dump", dump.to_str().unwrap()]);
        assert_eq!(code, VERIFY_FAILED);
        assert!(text.contains("counterexample"));
        let cx = format::parse(&fs::read_to_string(&dump).unwrap()).unwrap();
        assert!(cx.n_rows() <= 4 && cx.n_cols() <= 4);
    }
}
