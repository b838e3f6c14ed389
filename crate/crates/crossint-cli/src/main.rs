use std::env;
use std::fmt::Write as _;
use std::fs;
use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crossint::bound::{build_extremal, compute_bound, Params};
use crossint::compress::{compress_to_fixpoint, CompressionTrace};
use crossint::family::{parse_family, parse_pair, serialize_family, Family, MAX_GROUND};
use crossint::prooftrace::ProofTrace;
use crossint::search::{
    brute_force_max, flow_max, Method, SearchOptions, SearchResult, DEFAULT_FLOW_CAP,
};
use crossint::{fuzz, Error};

/// Pairs of randomized checks per fuzz run; fixed so that identical seeds
/// give byte-identical reports.
const FUZZ_PAIRS: u64 = 1000;

#[derive(Parser)]
#[command(
    name = "crossint",
    version,
    about = "Exact bounds, searches, and certificate checks for cross-intersecting set families",
    after_help = "Exit codes: 0 success, 2 usage error, 3 malformed input, \
                  4 cap exceeded, 5 a verification or certificate check failed.\n\
                  CROSSINT_THREADS limits how many threads `verify` uses."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Flow,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Brute => Method::Brute,
            MethodArg::Flow => Method::Flow,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the exact maximum of |A| + |B| in closed form
    Bound {
        /// Ground set size (up to 10000 here; only explicit families are capped at 20)
        #[arg(long)]
        n: u32,
        /// Cardinality ceiling for members of A
        #[arg(long)]
        r: u32,
        /// Cardinality ceiling for members of B (r <= s)
        #[arg(long)]
        s: u32,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        output: OutputFormat,
    },
    /// Build the canonical pair attaining the maximum
    Construct {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=MAX_GROUND as i64))]
        n: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        s: u32,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        output: OutputFormat,
        /// Write the result here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Drive a family to its left-compression fixpoint, logging each step
    Compress {
        /// Family file {"n":N,"sets":[[...],...]}; `-` or omitted reads stdin
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        output: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the exact maximum by search and report a witness pair
    Search {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=MAX_GROUND as i64))]
        n: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        s: u32,
        #[arg(long, value_enum, default_value_t = MethodArg::Brute)]
        method: MethodArg,
        /// Restrict both families to exactly r- and s-element members
        #[arg(long)]
        uniform: bool,
        /// Raise the candidate-pool cap of the exhaustive search
        #[arg(long)]
        cap_brute: Option<usize>,
        /// Raise the ground-size cap of the matching-based search
        #[arg(long)]
        cap_flow: Option<u32>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        output: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep (n, r, s) and compare search values against the closed form
    Verify {
        /// Largest ground set size; r and s sweep 1..=n+2 for each n
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=MAX_GROUND as i64))]
        max_n: u32,
        #[arg(long, value_enum, default_value_t = MethodArg::Brute)]
        method: MethodArg,
        /// Fixed candidate-pool cap (default: grows with n as needed)
        #[arg(long)]
        cap_brute: Option<usize>,
        #[arg(long)]
        cap_flow: Option<u32>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        output: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the decomposition certificate for a pair of families
    Trace {
        /// Pair file {"n":N,"a":[[...]],"b":[[...]]}; search output works as-is
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Cardinality ceiling to certify A against (default: its largest member)
        #[arg(long)]
        r: Option<u32>,
        /// Cardinality ceiling to certify B against (default: its largest member)
        #[arg(long)]
        s: Option<u32>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        output: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run seeded randomized compression-invariant checks (1000 pairs)
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest ground set size for the random pairs
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(2..=MAX_GROUND as i64))]
        max_n: u32,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        output: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = env::var("CROSSINT_THREADS") {
        match threads.parse::<usize>() {
            Ok(k) if k >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => {
                eprintln!("error: CROSSINT_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &CliError) -> u8 {
    match e {
        CliError::Lib(
            Error::GroundCapExceeded { .. }
            | Error::BruteCapExceeded { .. }
            | Error::FlowCapExceeded { .. },
        ) => 4,
        CliError::Lib(_) => 3,
        CliError::Io(_) => 1,
    }
}

enum CliError {
    Lib(Error),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => e.fmt(f),
            CliError::Io(e) => e.fmt(f),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e)
    }
}

fn run(cmd: Cmd) -> Result<ExitCode, CliError> {
    match cmd {
        Cmd::Bound { n, r, s, output } => cmd_bound(n, r, s, output),
        Cmd::Construct { n, r, s, output, out } => cmd_construct(n, r, s, output, &out),
        Cmd::Compress { input, output, out } => cmd_compress(&input, output, &out),
        Cmd::Search { n, r, s, method, uniform, cap_brute, cap_flow, output, out } => {
            cmd_search(n, r, s, method.into(), uniform, cap_brute, cap_flow, output, &out)
        }
        Cmd::Verify { max_n, method, cap_brute, cap_flow, output, out } => {
            cmd_verify(max_n, method.into(), cap_brute, cap_flow, output, &out)
        }
        Cmd::Trace { input, r, s, output, out } => cmd_trace(&input, r, s, output, &out),
        Cmd::Fuzz { seed, max_n, output, out } => cmd_fuzz(seed, max_n, output, &out),
    }
}

fn usage_rejects_csv(output: OutputFormat) -> Option<ExitCode> {
    if output == OutputFormat::Csv {
        eprintln!("error: csv output is not available for this command");
        return Some(ExitCode::from(2));
    }
    None
}

fn read_input(input: &Option<PathBuf>) -> Result<String, CliError> {
    match input {
        Some(path) if path.as_os_str() != "-" => Ok(fs::read_to_string(path)?),
        _ => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            Ok(text)
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    let text = if text.ends_with('\n') { text.to_string() } else { format!("{text}\n") };
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn search_options(cap_brute: Option<usize>, cap_flow: Option<u32>) -> SearchOptions {
    let mut opts = SearchOptions::default();
    if let Some(cap) = cap_brute {
        opts.brute_cap = cap;
    }
    if let Some(cap) = cap_flow {
        opts.flow_cap = cap;
        if cap > DEFAULT_FLOW_CAP {
            eprintln!(
                "note: the matching search builds 2^n-sized pools; above n={DEFAULT_FLOW_CAP} \
                 expect heavy memory use"
            );
        }
    }
    opts
}

fn cmd_bound(n: u32, r: u32, s: u32, output: OutputFormat) -> Result<ExitCode, CliError> {
    let p = Params::new(n, r, s)?;
    let bound = compute_bound(&p);
    let text = match output {
        OutputFormat::Text => format!("{bound}"),
        OutputFormat::Json => format!(r#"{{"n":{n},"r":{r},"s":{s},"bound":"{bound}"}}"#),
        OutputFormat::Csv => format!("n,r,s,bound\n{n},{r},{s},{bound}"),
    };
    emit(&None, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_construct(
    n: u32,
    r: u32,
    s: u32,
    output: OutputFormat,
    out: &Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    if let Some(code) = usage_rejects_csv(output) {
        return Ok(code);
    }
    let p = Params::new(n, r, s)?;
    let (a, b) = build_extremal(&p)?;
    let bound = compute_bound(&p);
    let value = a.len() + b.len();
    let text = match output {
        OutputFormat::Text => format!(
            "A = {}\nB = {}\n|A| + |B| = {value}\nbound = {bound}",
            serialize_family(&a),
            serialize_family(&b)
        ),
        OutputFormat::Json => {
            let file = serde_json::json!({
                "n": n,
                "r": r,
                "s": s,
                "a": family_elements(&a),
                "b": family_elements(&b),
                "value": value,
                "bound": bound.to_string(),
            });
            file.to_string()
        }
        OutputFormat::Csv => unreachable!(),
    };
    emit(out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn family_elements(f: &Family) -> Vec<Vec<u32>> {
    f.iter().map(|m| m.elements().collect()).collect()
}

fn steps_json(trace: &CompressionTrace) -> serde_json::Value {
    trace
        .steps
        .iter()
        .map(|s| {
            serde_json::json!({
                "i": s.i,
                "j": s.j,
                "potential_before": s.potential_before,
                "potential_after": s.potential_after,
                "changed": s.changed,
            })
        })
        .collect()
}

fn cmd_compress(
    input: &Option<PathBuf>,
    output: OutputFormat,
    out: &Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    if let Some(code) = usage_rejects_csv(output) {
        return Ok(code);
    }
    let family = parse_family(&read_input(input)?)?;
    let (fixed, trace) = compress_to_fixpoint(&family);
    let text = match output {
        OutputFormat::Text => format!("{}\n{}", serialize_family(&fixed), trace.to_log()),
        OutputFormat::Json => serde_json::json!({
            "n": fixed.n(),
            "sets": family_elements(&fixed),
            "steps": steps_json(&trace),
        })
        .to_string(),
        OutputFormat::Csv => unreachable!(),
    };
    emit(out, &text)?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    n: u32,
    r: u32,
    s: u32,
    method: Method,
    uniform: bool,
    cap_brute: Option<usize>,
    cap_flow: Option<u32>,
    output: OutputFormat,
    out: &Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    let p = Params::new(n, r, s)?;
    let opts = search_options(cap_brute, cap_flow);
    let result = run_search(&p, method, uniform, &opts)?;
    let text = match output {
        OutputFormat::Text => format!(
            "value = {}\nmethod = {}\nA = {}\nB = {}",
            result.value,
            result.method,
            serialize_family(&result.a),
            serialize_family(&result.b)
        ),
        OutputFormat::Json => result.to_json(),
        OutputFormat::Csv => format!(
            "n,r,s,value,method,uniform\n{n},{r},{s},{},{},{uniform}",
            result.value, result.method
        ),
    };
    emit(out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn run_search(
    p: &Params,
    method: Method,
    uniform: bool,
    opts: &SearchOptions,
) -> Result<SearchResult, Error> {
    match method {
        Method::Brute => brute_force_max(p, uniform, opts),
        Method::Flow => flow_max(p, uniform, opts),
    }
}

struct VerifyRow {
    n: u32,
    r: u32,
    s: u32,
    bound: String,
    search_value: u64,
    method: Method,
    pass: bool,
}

fn cmd_verify(
    max_n: u32,
    method: Method,
    cap_brute: Option<usize>,
    cap_flow: Option<u32>,
    output: OutputFormat,
    out: &Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    use rayon::prelude::*;

    let mut cells = Vec::new();
    for n in 1..=max_n {
        for r in 1..=n + 2 {
            for s in r..=n + 2 {
                cells.push((n, r, s));
            }
        }
    }
    let rows: Result<Vec<VerifyRow>, Error> = cells
        .par_iter()
        .map(|&(n, r, s)| {
            let p = Params::new(n, r, s)?;
            // the full sub-cardinality pool at n has 2^n - 1 sets; grow the
            // cap with the sweep unless one was pinned explicitly
            let opts = search_options(
                Some(cap_brute.unwrap_or_else(|| {
                    SearchOptions::default().brute_cap.max((1usize << n) - 1)
                })),
                cap_flow,
            );
            let result = run_search(&p, method, false, &opts)?;
            let bound = compute_bound(&p);
            let pass = bound == result.value;
            Ok(VerifyRow {
                n,
                r,
                s,
                bound: bound.to_string(),
                search_value: result.value,
                method,
                pass,
            })
        })
        .collect();
    let mut rows = rows?;
    rows.sort_by_key(|row| (row.n, row.r, row.s));

    let all_pass = rows.iter().all(|row| row.pass);
    let mut text = String::new();
    match output {
        OutputFormat::Csv => {
            text.push_str("n,r,s,bound,search_value,method,pass\n");
            for row in &rows {
                writeln!(
                    text,
                    "{},{},{},{},{},{},{}",
                    row.n, row.r, row.s, row.bound, row.search_value, row.method, row.pass
                )
                .unwrap();
            }
        }
        OutputFormat::Text => {
            for row in &rows {
                writeln!(
                    text,
                    "n={} r={} s={} bound={} search={} [{}]",
                    row.n,
                    row.r,
                    row.s,
                    row.bound,
                    row.search_value,
                    if row.pass { "PASS" } else { "FAIL" }
                )
                .unwrap();
            }
            writeln!(
                text,
                "{} of {} cells agree ({})",
                rows.iter().filter(|r| r.pass).count(),
                rows.len(),
                method
            )
            .unwrap();
        }
        OutputFormat::Json => {
            let cells: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    serde_json::json!({
                        "n": row.n,
                        "r": row.r,
                        "s": row.s,
                        "bound": row.bound,
                        "search_value": row.search_value,
                        "method": row.method.to_string(),
                        "pass": row.pass,
                    })
                })
                .collect();
            text = serde_json::Value::Array(cells).to_string();
        }
    }
    emit(out, &text)?;
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(5) })
}

fn cmd_trace(
    input: &Option<PathBuf>,
    r: Option<u32>,
    s: Option<u32>,
    output: OutputFormat,
    out: &Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    if let Some(code) = usage_rejects_csv(output) {
        return Ok(code);
    }
    let (a, b) = parse_pair(&read_input(input)?)?;
    let r = r.unwrap_or_else(|| a.max_card().max(1));
    let s = s.unwrap_or(b.max_card()).max(r);
    let p = Params::new(a.n(), r, s)?;
    let trace = ProofTrace::build(&a, &b, &p)?;
    let text = match output {
        OutputFormat::Text => trace.render_report(),
        OutputFormat::Json => trace.to_json(),
        OutputFormat::Csv => unreachable!(),
    };
    emit(out, &text)?;
    Ok(if trace.all_ok() { ExitCode::SUCCESS } else { ExitCode::from(5) })
}

fn cmd_fuzz(
    seed: u64,
    max_n: u32,
    output: OutputFormat,
    out: &Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    if let Some(code) = usage_rejects_csv(output) {
        return Ok(code);
    }
    let report = fuzz::run(seed, max_n, FUZZ_PAIRS);
    let text = match output {
        OutputFormat::Text => report.to_string(),
        OutputFormat::Json => serde_json::json!({
            "seed": report.seed,
            "max_n": report.max_n,
            "pairs": report.pairs,
            "steps": report.steps,
            "size_failures": report.size_failures,
            "cardinality_failures": report.cardinality_failures,
            "cross_failures": report.cross_failures,
            "potential_failures": report.potential_failures,
            "fixpoint_failures": report.fixpoint_failures,
            "ok": report.ok(),
        })
        .to_string(),
        OutputFormat::Csv => unreachable!(),
    };
    emit(out, &text)?;
    Ok(if report.ok() { ExitCode::SUCCESS } else { ExitCode::from(5) })
}
