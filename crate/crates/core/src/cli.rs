//! The `fibsum` command line.
//!
//! Exit codes: 0 success, 1 a `normal` entry failed verification, 2 usage
//! or parse error, 3 I/O error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::bench::{bench_entry, bench_fib, log_spaced, to_csv, BenchError};
use crate::bigfib::{fib, lucas};
use crate::catalog::{default_catalog_dir, load_catalog, Catalog, CatalogError, Status};
use crate::dsl::{parse_file, Binding, Evaluator};
use crate::verify::{verify_all, ParamGrid, VerificationReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURES: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "fibsum",
    version,
    about = "Exact checks of binomial Fibonacci and Lucas sum identities"
)]
struct Cli {
    /// Catalog directory (default: $FIBSUM_CATALOG, then the shipped corpus)
    #[arg(long, global = true, value_name = "DIR")]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print F(j)
    Fib {
        #[arg(allow_negative_numbers = true)]
        j: i64,
    },
    /// Print L(j)
    Lucas {
        #[arg(allow_negative_numbers = true)]
        j: i64,
    },
    /// Evaluate an identity from a .fib file at one binding
    Eval(EvalArgs),
    /// Check catalog entries over parameter grids
    Verify(VerifyArgs),
    /// List catalog entries
    List {
        #[arg(long)]
        group: Option<String>,
    },
    /// Timing runs, written as CSV
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args, Debug)]
struct EvalArgs {
    file: PathBuf,
    /// Parameter values, e.g. `n=2,s=0`
    #[arg(long, default_value = "")]
    bind: String,
    #[arg(long, value_enum)]
    side: Option<SideArg>,
    /// Which identity of the file, when it holds several
    #[arg(long)]
    id: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SideArg {
    Lhs,
    Rhs,
}

#[derive(Args, Debug)]
#[group(skip)]
#[command(group(ArgGroup::new("selection").required(true).args(["id", "group", "all"])))]
struct VerifyArgs {
    /// Entry id, bare or `group/id`; may be repeated
    #[arg(long)]
    id: Vec<String>,
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    all: bool,
    /// Grid overrides, e.g. `n=0..30;s=-6..6;cap=1000`
    #[arg(long)]
    grid: Option<String>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Also write the reports as JSON to this path
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum BenchCommand {
    /// Fast doubling against the linear recurrence
    Fib {
        /// Comma-separated sizes (default: log-spaced 1000..100000)
        #[arg(long, value_delimiter = ',')]
        n: Vec<i64>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed right side against summed left side of one entry
    Entry {
        id: String,
        #[arg(long, default_value_t = 100_000)]
        n: i64,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// An error with its exit code.
struct Fail(u8, String);

impl From<CatalogError> for Fail {
    fn from(e: CatalogError) -> Self {
        let code = if matches!(e, CatalogError::Io { .. }) {
            EXIT_IO
        } else {
            EXIT_USAGE
        };
        Fail(code, e.to_string())
    }
}

impl From<BenchError> for Fail {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Catalog(c) => c.into(),
            other => Fail(EXIT_USAGE, other.to_string()),
        }
    }
}

fn io_fail(path: &Path, e: io::Error) -> Fail {
    Fail(EXIT_IO, format!("{}: {e}", path.display()))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli, &mut out) {
        Ok(code) => code,
        Err(Fail(code, message)) => {
            let _ = out.flush();
            eprintln!("fibsum: {message}");
            code
        }
    }
}

fn open_catalog(dir: Option<PathBuf>) -> Result<Catalog, Fail> {
    let dir = dir.unwrap_or_else(default_catalog_dir);
    let catalog = load_catalog(&dir)?;
    for w in &catalog.warnings {
        eprintln!("fibsum: warning: {w}");
    }
    Ok(catalog)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Fail> {
    out.write_all(text.as_bytes())
        .map_err(|e| Fail(EXIT_IO, format!("stdout: {e}")))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_fail(p, e)),
        None => write_out(out, text),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<u8, Fail> {
    match cli.command {
        Command::Fib { j } => write_out(out, &format!("{}\n", fib(j)))?,
        Command::Lucas { j } => write_out(out, &format!("{}\n", lucas(j)))?,
        Command::Eval(args) => eval_cmd(args, out)?,
        Command::Verify(args) => return verify_cmd(open_catalog(cli.catalog)?, args, out),
        Command::List { group } => {
            let catalog = open_catalog(cli.catalog)?;
            let mut text = String::new();
            for e in catalog
                .entries
                .iter()
                .filter(|e| group.as_ref().is_none_or(|g| &e.group == g))
            {
                let params: Vec<&str> = e.spec.params.iter().map(|p| p.name.as_str()).collect();
                text.push_str(&format!(
                    "{}\t{}\t{}\t{}\n",
                    e.qualified_id(),
                    e.status,
                    params.join(","),
                    e.source
                ));
            }
            write_out(out, &text)?;
        }
        Command::Bench(BenchCommand::Fib { n, reps, out: path }) => {
            let ns = if n.is_empty() { log_spaced(1000, 100_000) } else { n };
            emit(out, path.as_deref(), &to_csv(&bench_fib(&ns, reps)?))?;
        }
        Command::Bench(BenchCommand::Entry { id, n, reps, out: path }) => {
            let catalog = open_catalog(cli.catalog)?;
            let (l, r) = bench_entry(&catalog, &id, n, reps)?;
            emit(out, path.as_deref(), &to_csv(&[l, r]))?;
        }
    }
    Ok(EXIT_OK)
}

fn eval_cmd(args: EvalArgs, out: &mut dyn Write) -> Result<(), Fail> {
    let text = fs::read_to_string(&args.file).map_err(|e| io_fail(&args.file, e))?;
    let blocks = parse_file(&text).map_err(|e| Fail(EXIT_USAGE, format!("{}:{e}", args.file.display())))?;
    // plain DSL is enough here; catalog pragmas are ignored
    let spec = match &args.id {
        Some(id) => blocks.iter().find(|b| &b.spec.id == id).map(|b| &b.spec),
        None if blocks.len() == 1 => Some(&blocks[0].spec),
        None => None,
    }
    .ok_or_else(|| match &args.id {
        Some(id) => Fail(EXIT_USAGE, format!("no identity `{id}` in {}", args.file.display())),
        None => Fail(
            EXIT_USAGE,
            format!(
                "{} holds {} identities; pick one with --id",
                args.file.display(),
                blocks.len()
            ),
        ),
    })?;
    let binding = Binding::parse(&args.bind).map_err(|e| Fail(EXIT_USAGE, format!("--bind: {e}")))?;
    let mut ev = Evaluator::new();
    let eval_fail = |e: crate::dsl::EvalError| Fail(EXIT_USAGE, format!("{} at {binding}: {e}", spec.id));
    if !ev.admissible(spec, &binding).map_err(eval_fail)? {
        return Err(Fail(
            EXIT_USAGE,
            format!("{binding} is outside the domain of {}", spec.id),
        ));
    }
    let lhs = || -> Result<String, Fail> {
        Ok(Evaluator::new()
            .eval(&spec.lhs, &binding)
            .map_err(eval_fail)?
            .to_string())
    };
    let rhs = || -> Result<String, Fail> {
        let mut ev = Evaluator::new();
        let case = ev.active_case(spec, &binding).map_err(eval_fail)?;
        Ok(ev.eval(&spec.rhs[case].expr, &binding).map_err(eval_fail)?.to_string())
    };
    let text = match args.side {
        Some(SideArg::Lhs) => format!("{}\n", lhs()?),
        Some(SideArg::Rhs) => format!("{}\n", rhs()?),
        None => format!("lhs = {}\nrhs = {}\n", lhs()?, rhs()?),
    };
    write_out(out, &text)
}

fn verify_cmd(catalog: Catalog, args: VerifyArgs, out: &mut dyn Write) -> Result<u8, Fail> {
    let overrides = match &args.grid {
        Some(g) => g.parse::<ParamGrid>().map_err(|e| Fail(EXIT_USAGE, e.to_string()))?,
        None => ParamGrid::new(),
    };
    let entries: Vec<_> = if args.all {
        catalog.entries.clone()
    } else if let Some(g) = &args.group {
        let found: Vec<_> = catalog.group(g).cloned().collect();
        if found.is_empty() {
            return Err(Fail(EXIT_USAGE, format!("no entries in group `{g}`")));
        }
        found
    } else {
        args.id
            .iter()
            .map(|id| catalog.entry(id).cloned())
            .collect::<Result<_, _>>()?
    };
    let workers = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Fail(EXIT_USAGE, "--jobs must be at least 1".into()));
    }
    let reports = verify_all(&entries, &overrides, workers).map_err(|e| Fail(EXIT_USAGE, e.to_string()))?;

    let mut text = String::new();
    for r in &reports {
        text.push_str(&r.render());
    }
    let summary = Summary::of(&reports);
    text.push_str(&format!(
        "{} entries: {} passed, {} failed ({} suspect); {} cases\n",
        reports.len(),
        summary.passed,
        summary.failed_normal + summary.failed_suspect,
        summary.failed_suspect,
        summary.cases
    ));
    write_out(out, &text)?;

    if let Some(path) = &args.json {
        let doc = serde_json::json!({
            "grid": overrides.to_string(),
            "reports": reports.iter().map(VerificationReport::to_json).collect::<Vec<_>>(),
            "summary": {
                "entries": reports.len(),
                "passed": summary.passed,
                "failed_normal": summary.failed_normal,
                "failed_suspect": summary.failed_suspect,
                "cases": summary.cases,
            },
        });
        let mut body = serde_json::to_string_pretty(&doc).expect("reports serialise");
        body.push('\n');
        fs::write(path, body).map_err(|e| io_fail(path, e))?;
    }
    Ok(if summary.failed_normal > 0 {
        EXIT_FAILURES
    } else {
        EXIT_OK
    })
}

struct Summary {
    passed: usize,
    failed_normal: usize,
    failed_suspect: usize,
    cases: u64,
}

impl Summary {
    fn of(reports: &[VerificationReport]) -> Summary {
        let mut s = Summary {
            passed: 0,
            failed_normal: 0,
            failed_suspect: 0,
            cases: 0,
        };
        for r in reports {
            s.cases += r.cases_checked;
            match (r.passed(), r.status) {
                (true, _) => s.passed += 1,
                (false, Status::Normal) => s.failed_normal += 1,
                (false, Status::Suspect) => s.failed_suspect += 1,
            }
        }
        s
    }
}
