//! The `themeorder` command line.
//!
//! Everything lives behind [`run`], which takes the argument list and a
//! standard-input reader and returns what would be printed plus the exit code.
//! `main.rs` only wires it to the process, so tests can drive the whole tool
//! in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use themeorder::analysis::{
    cluster_blocks_with, count_unique_orderings, distance_matrix, fisher_exact_one_sided,
    ContingencyTable2x2, Linkage, StopRule,
};
use themeorder::augmented::augmented_order_with;
use themeorder::io::{parse_corpus_unchecked, parse_ordering_set};
use themeorder::par::Execution;
use themeorder::segment::segment_corpus;
use themeorder::{
    chronological_order, majority_order, parse_rational, theme_timestamp, validate_corpus, Corpus,
    Diagnostics, Error, OrderingResult, Threshold, TieBreak,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "themeorder", version, about = "Order cross-document themes for summarization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Order the themes of a corpus, one theme id per output line.
    Order(OrderArgs),
    /// Distance matrix and block clustering for a set of orderings.
    Analyze(AnalyzeArgs),
    /// Statistical tests.
    Stats {
        #[command(subcommand)]
        test: StatsCommand,
    },
    /// Check a corpus (or an orderings file) and list every problem found.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    /// Majority ordering.
    Mo,
    /// Chronological ordering.
    Co,
    /// Chronological ordering of related-theme blocks.
    Augmented,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Order,
    Blocks,
    Graph,
    Timestamps,
}

#[derive(Args, Debug)]
struct OrderArgs {
    /// Corpus JSON file, a directory of them, or `-` for standard input.
    #[arg(default_value = "-")]
    input: PathBuf,
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    /// Relatedness cut-off (augmented only): integer, decimal or p/q. Default 0.6.
    #[arg(long)]
    threshold: Option<String>,
    /// Relate themes whose ratio equals the threshold too (augmented only).
    #[arg(long)]
    threshold_inclusive: bool,
    /// Recompute segments with the built-in segmenter using this window (augmented only).
    #[arg(long, value_name = "WINDOW")]
    segment: Option<usize>,
    /// Break greedy ties with this seed instead of by id (mo only).
    #[arg(long)]
    seed: Option<u64>,
    /// Extra diagnostics to produce alongside the ordering.
    #[arg(long, value_enum, default_value_t = Emit::Order)]
    emit: Emit,
    /// Write diagnostics here instead of standard error.
    #[arg(long, value_name = "PATH")]
    diagnostics: Option<PathBuf>,
    /// Append each theme's time stamp sentence after a tab.
    #[arg(long)]
    with_text: bool,
    /// Output file (or directory, for a directory input).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("stop").required(true).args(["k", "distance_threshold"])))]
struct AnalyzeArgs {
    /// Orderings file, or `-` for standard input.
    #[arg(default_value = "-")]
    input: PathBuf,
    /// Stop at this many blocks.
    #[arg(long)]
    k: Option<usize>,
    /// Stop once the closest blocks are farther apart than this.
    #[arg(long)]
    distance_threshold: Option<String>,
    #[arg(long, value_enum, default_value_t = LinkageArg::Ward)]
    linkage: LinkageArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LinkageArg {
    Ward,
    Average,
}

#[derive(Subcommand, Debug)]
enum StatsCommand {
    /// One-sided Fisher exact test, P(X >= a), for the table [[a, b], [c, d]].
    Fisher { a: u64, b: u64, c: u64, d: u64 },
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(default_value = "-")]
    input: PathBuf,
    /// Treat the input as an orderings file.
    #[arg(long)]
    orderings: bool,
}

/// Captured result of one invocation.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
    pub code: i32,
}

impl Outcome {
    fn fail(code: i32, message: impl AsRef<str>) -> Self {
        let mut stderr = format!("error: {}", message.as_ref()).into_bytes();
        if !stderr.ends_with(b"\n") {
            stderr.push(b'\n');
        }
        Self { stdout: Vec::new(), stderr, code }
    }
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string().into_bytes();
            return if e.use_stderr() {
                Outcome { stdout: Vec::new(), stderr: text, code }
            } else {
                Outcome { stdout: text, stderr: Vec::new(), code }
            };
        }
    };
    match cli.command {
        Command::Order(a) => order(a, stdin),
        Command::Analyze(a) => analyze(a, stdin),
        Command::Stats { test: StatsCommand::Fisher { a, b, c, d } } => fisher(a, b, c, d),
        Command::Validate(a) => validate(a, stdin),
    }
}

fn read_input(path: &Path, stdin: &mut dyn Read) -> Result<Vec<u8>, Outcome> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        stdin
            .read_to_end(&mut buf)
            .map_err(|e| Outcome::fail(EXIT_USAGE, format!("reading standard input: {e}")))?;
        Ok(buf)
    } else {
        fs::read(path).map_err(|e| Outcome::fail(EXIT_USAGE, format!("{}: {e}", path.display())))
    }
}

/// Moves a successful outcome's stdout into `output` when one is given.
fn deliver(mut outcome: Outcome, output: Option<&Path>) -> Outcome {
    if let Some(path) = output {
        if let Err(e) = fs::write(path, &outcome.stdout) {
            return Outcome::fail(EXIT_USAGE, format!("{}: {e}", path.display()));
        }
        outcome.stdout.clear();
    }
    outcome
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) => EXIT_INVALID,
        _ => EXIT_USAGE,
    }
}

fn error_outcome(e: &Error) -> Outcome {
    match e {
        Error::Validation(v) => {
            let mut s = String::from("error: invalid corpus\n");
            for x in v {
                let _ = writeln!(s, "  {x}");
            }
            Outcome { stdout: Vec::new(), stderr: s.into_bytes(), code: EXIT_INVALID }
        }
        e => Outcome::fail(exit_code(e), e.to_string()),
    }
}

// ---------------------------------------------------------------- order

struct OrderPlan {
    strategy: StrategyArg,
    threshold: Threshold,
    segment: Option<usize>,
    tie_break: TieBreak,
    emit: Emit,
    with_text: bool,
}

impl OrderPlan {
    fn from_args(a: &OrderArgs) -> Result<Self, String> {
        let only = |flag: &str, set: bool, allowed: &[StrategyArg]| {
            if set && !allowed.contains(&a.strategy) {
                Err(format!("{flag} is not valid with --strategy {}", strategy_name(a.strategy)))
            } else {
                Ok(())
            }
        };
        use StrategyArg::*;
        only("--threshold", a.threshold.is_some(), &[Augmented])?;
        only("--threshold-inclusive", a.threshold_inclusive, &[Augmented])?;
        only("--segment", a.segment.is_some(), &[Augmented])?;
        only("--seed", a.seed.is_some(), &[Mo])?;
        only("--emit blocks", a.emit == Emit::Blocks, &[Augmented])?;
        only("--emit graph", a.emit == Emit::Graph, &[Mo])?;
        only("--emit timestamps", a.emit == Emit::Timestamps, &[Co, Augmented])?;

        let mut threshold = Threshold::default();
        if let Some(t) = &a.threshold {
            threshold.value = parse_rational(t).map_err(|e| e.to_string())?;
        }
        threshold.inclusive = a.threshold_inclusive;
        if a.segment == Some(0) {
            return Err("--segment window must be at least 1".into());
        }
        Ok(Self {
            strategy: a.strategy,
            threshold,
            segment: a.segment,
            tie_break: a.seed.map_or(TieBreak::ById, TieBreak::Seeded),
            emit: a.emit,
            with_text: a.with_text,
        })
    }

    /// Orders one corpus file's bytes: `(ordering, diagnostics, stderr)`.
    fn apply(&self, raw: &[u8]) -> Result<(String, String, String), Error> {
        let (mut corpus, warnings) = parse_corpus_unchecked(raw)?;
        let violations = validate_corpus(&corpus);
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        if let Some(w) = self.segment {
            segment_corpus(&mut corpus, w)?;
        }
        let result = match self.strategy {
            StrategyArg::Mo => majority_order(&corpus, self.tie_break)?,
            StrategyArg::Co => chronological_order(&corpus)?,
            // the batch level already spreads files over threads
            StrategyArg::Augmented => augmented_order_with(&corpus, self.threshold, Execution::Sequential)?,
        };
        let order = self.render_order(&result, &corpus)?;
        let mut log = String::new();
        for w in warnings {
            let _ = writeln!(log, "warning: {w}");
        }
        Ok((order, render_diagnostics(&result, self.emit), log))
    }

    fn render_order(&self, result: &OrderingResult, corpus: &Corpus) -> Result<String, Error> {
        let mut out = String::new();
        for id in &result.sequence {
            out.push_str(id);
            if self.with_text {
                let theme = corpus.themes.iter().find(|t| &t.id == id).expect("theme from corpus");
                let stamp = theme_timestamp(theme, corpus)?.stamp;
                let doc = corpus.documents.iter().find(|d| d.id == stamp.doc).expect("validated");
                out.push('\t');
                out.push_str(&doc.sentences[stamp.pos]);
            }
            out.push('\n');
        }
        Ok(out)
    }
}

fn strategy_name(s: StrategyArg) -> &'static str {
    match s {
        StrategyArg::Mo => "mo",
        StrategyArg::Co => "co",
        StrategyArg::Augmented => "augmented",
    }
}

fn render_diagnostics(result: &OrderingResult, emit: Emit) -> String {
    match (emit, &result.diagnostics) {
        (Emit::Graph, Diagnostics::Majority { graph, .. }) => graph.dump(),
        (Emit::Blocks, Diagnostics::Augmented { partition, .. }) => partition.dump(),
        (Emit::Timestamps, Diagnostics::Chronological { stamps } | Diagnostics::Augmented { stamps, .. }) => {
            stamps.iter().map(|s| s.dump_line() + "\n").collect()
        }
        _ => String::new(),
    }
}

fn order(a: OrderArgs, stdin: &mut dyn Read) -> Outcome {
    let plan = match OrderPlan::from_args(&a) {
        Ok(p) => p,
        Err(msg) => return Outcome::fail(EXIT_USAGE, msg),
    };
    if a.input.is_dir() {
        return order_batch(&plan, &a);
    }
    let raw = match read_input(&a.input, stdin) {
        Ok(r) => r,
        Err(o) => return o,
    };
    let (order, diag, log) = match plan.apply(&raw) {
        Ok(x) => x,
        Err(e) => return error_outcome(&e),
    };
    let mut stderr = log.into_bytes();
    match &a.diagnostics {
        Some(path) if plan.emit != Emit::Order => {
            if let Err(e) = fs::write(path, diag) {
                return Outcome::fail(EXIT_USAGE, format!("{}: {e}", path.display()));
            }
        }
        _ => stderr.extend_from_slice(diag.as_bytes()),
    }
    deliver(Outcome { stdout: order.into_bytes(), stderr, code: EXIT_OK }, a.output.as_deref())
}

/// Orders every `*.json` file of a directory concurrently. Each file gets its
/// own `<stem>.order` (and `<stem>.<emit>` diagnostics) in the output
/// directory; a bad file is reported and skipped without affecting the rest.
fn order_batch(plan: &OrderPlan, a: &OrderArgs) -> Outcome {
    let Some(out_dir) = a.output.as_deref() else {
        return Outcome::fail(EXIT_USAGE, "a directory input needs -o OUTPUT_DIR");
    };
    if a.diagnostics.is_some() {
        return Outcome::fail(EXIT_USAGE, "--diagnostics cannot be used with a directory input");
    }
    let mut files: Vec<PathBuf> = match fs::read_dir(&a.input) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
            .collect(),
        Err(e) => return Outcome::fail(EXIT_USAGE, format!("{}: {e}", a.input.display())),
    };
    files.sort();
    if let Err(e) = fs::create_dir_all(out_dir) {
        return Outcome::fail(EXIT_USAGE, format!("{}: {e}", out_dir.display()));
    }
    let emit_ext = match plan.emit {
        Emit::Order => None,
        Emit::Blocks => Some("blocks"),
        Emit::Graph => Some("graph"),
        Emit::Timestamps => Some("timestamps"),
    };

    let reports = Execution::Parallel.map(&files, |path| -> (i32, String) {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let stem = path.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let result = fs::read(path)
            .map_err(|e| (EXIT_USAGE, e.to_string()))
            .and_then(|raw| plan.apply(&raw).map_err(|e| (exit_code(&e), e.to_string())))
            .and_then(|(order, diag, log)| {
                fs::write(out_dir.join(format!("{stem}.order")), order)
                    .and_then(|_| match emit_ext {
                        Some(ext) => fs::write(out_dir.join(format!("{stem}.{ext}")), diag),
                        None => Ok(()),
                    })
                    .map(|_| log)
                    .map_err(|e| (EXIT_USAGE, e.to_string()))
            });
        match result {
            Ok(log) => (EXIT_OK, log.lines().map(|l| format!("{name}: {l}\n")).collect()),
            Err((code, msg)) => (code, format!("{name}: error: {msg}\n")),
        }
    });

    let mut stderr = String::new();
    let mut code = EXIT_OK;
    for (c, text) in reports {
        code = code.max(c);
        stderr.push_str(&text);
    }
    Outcome { stdout: Vec::new(), stderr: stderr.into_bytes(), code }
}

// ---------------------------------------------------------------- analyze

fn analyze(a: AnalyzeArgs, stdin: &mut dyn Read) -> Outcome {
    let stop = match (a.k, &a.distance_threshold) {
        (Some(k), _) => StopRule::Clusters(k),
        (None, Some(t)) => match parse_rational(t) {
            Ok(r) => StopRule::MaxDistance(r),
            Err(e) => return Outcome::fail(EXIT_USAGE, e.to_string()),
        },
        (None, None) => unreachable!("clap requires one stop rule"),
    };
    let linkage = match a.linkage {
        LinkageArg::Ward => Linkage::Ward,
        LinkageArg::Average => Linkage::Average,
    };
    let raw = match read_input(&a.input, stdin) {
        Ok(r) => r,
        Err(o) => return o,
    };
    let set = match parse_ordering_set(&raw) {
        Ok(s) => s,
        Err(e) => return error_outcome(&e),
    };
    let matrix = distance_matrix(&set);
    let clustering = match cluster_blocks_with(&matrix, stop, linkage) {
        Ok(c) => c,
        Err(e) => return error_outcome(&e),
    };
    let mut out = matrix.to_tsv();
    out.push('\n');
    out.push_str(&clustering.report());
    let _ = writeln!(out, "\norderings: {} ({} unique)", set.len(), count_unique_orderings(&set));
    deliver(Outcome { stdout: out.into_bytes(), ..Outcome::default() }, a.output.as_deref())
}

// ---------------------------------------------------------------- stats

fn fisher(a: u64, b: u64, c: u64, d: u64) -> Outcome {
    match fisher_exact_one_sided(ContingencyTable2x2::new(a, b, c, d)) {
        Ok(p) => Outcome {
            stdout: format!("p_exact {p}\np_decimal {:.6}\n", p.to_f64()).into_bytes(),
            ..Outcome::default()
        },
        Err(e) => error_outcome(&e),
    }
}

// ---------------------------------------------------------------- validate

fn validate(a: ValidateArgs, stdin: &mut dyn Read) -> Outcome {
    let raw = match read_input(&a.input, stdin) {
        Ok(r) => r,
        Err(o) => return o,
    };
    if a.orderings {
        return match parse_ordering_set(&raw) {
            Ok(set) => Outcome {
                stdout: format!("ok: {} labels, {} orderings\n", set.labels().len(), set.len()).into_bytes(),
                ..Outcome::default()
            },
            Err(e) => error_outcome(&e),
        };
    }
    let (corpus, warnings) = match parse_corpus_unchecked(&raw) {
        Ok(x) => x,
        Err(e) => return error_outcome(&e),
    };
    let stderr: String = warnings.iter().map(|w| format!("warning: {w}\n")).collect();
    let violations = validate_corpus(&corpus);
    let (stdout, code) = if violations.is_empty() {
        (
            format!("ok: {} documents, {} themes\n", corpus.documents.len(), corpus.themes.len()),
            EXIT_OK,
        )
    } else {
        (violations.iter().map(|v| format!("{v}\n")).collect(), EXIT_INVALID)
    };
    Outcome { stdout: stdout.into_bytes(), stderr: stderr.into_bytes(), code }
}
