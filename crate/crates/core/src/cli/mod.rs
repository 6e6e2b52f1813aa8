//! Command-line front end: batch queries, the REPL and differential checks.
//!
//! Exit codes: 0 when at least one solution was found, 1 when there is none,
//! 2 on errors (bad flags, load or parse errors), 3 when the search was cut
//! off by the depth bound without finding a solution.

mod output;
mod repl;

use std::collections::HashSet;
use std::ffi::OsString;
use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use output::{failure_json, solution_json, write_failure, write_solution, Format, Style};
pub use repl::{run_repl, ReplState};

use crate::ast::{FreeVarDefault, QueryPolicy};
use crate::check::{self, Verdict};
use crate::engine::{Binding, GroundnessMode, Outcome, SolveConfig, Solver, Status};
use crate::oracle::{format_answer_set, OracleConfig, DEFAULT_DEPTH};
use crate::session::Session;

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_NO_SOLUTION: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_INCOMPLETE: i32 = 3;

pub const NO_COLOR_VAR: &str = "PROLOGTHETA_NO_COLOR";

#[derive(Debug, Parser)]
#[command(name = "prologtheta", version, about = "Horn-clause interpreter with noisy quantifiers")]
#[command(args_conflicts_with_subcommands = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load modules and answer one query (the default).
    Run(RunArgs),
    /// Interactive session.
    Repl(ReplArgs),
    /// Compare the engine against the brute-force oracle.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Groundness {
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FreeVars {
    /// Free query variables are reported (`some*`).
    Noisy,
    /// Free query variables are not reported (`some`).
    Silent,
}

#[derive(Debug, Clone, Args)]
pub struct SolveFlags {
    /// Bound on proof-tree height.
    #[arg(long, value_name = "N")]
    pub max_depth: Option<u32>,
    /// Whether non-ground noisy witnesses are rejected or flagged.
    #[arg(long, value_enum, default_value = "strict")]
    pub groundness: Groundness,
    /// Occurs check during unification.
    #[arg(long, value_enum, default_value = "on")]
    pub occurs_check: Switch,
    /// How free variables of a query are quantified.
    #[arg(long, value_enum, default_value = "noisy")]
    pub free_vars: FreeVars,
    /// Print the bottom-up proof trace of every solution.
    #[arg(long)]
    pub trace: bool,
    /// Output format; json emits one document per line.
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

impl SolveFlags {
    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            groundness: match self.groundness {
                Groundness::Strict => GroundnessMode::Strict,
                Groundness::Lenient => GroundnessMode::Lenient,
            },
            max_depth: self.max_depth,
            max_solutions: None,
            occurs_check: self.occurs_check == Switch::On,
            trace_enabled: self.trace || self.format == Format::Json,
        }
    }

    pub fn policy(&self) -> QueryPolicy {
        QueryPolicy {
            default_free_var: match self.free_vars {
                FreeVars::Noisy => FreeVarDefault::NoisyExistential,
                FreeVars::Silent => FreeVarDefault::SilentExistential,
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Module file to load (repeatable).
    #[arg(long = "module", short = 'm', value_name = "PATH")]
    pub modules: Vec<PathBuf>,
    /// Query to solve.
    #[arg(long, short = 'q', value_name = "TEXT")]
    pub query: Option<String>,
    /// Print every solution.
    #[arg(long, conflicts_with = "max_solutions")]
    pub all: bool,
    /// Stop after N solutions (default 1).
    #[arg(long, value_name = "N")]
    pub max_solutions: Option<usize>,
    /// Skip solutions whose answer repeats an earlier one.
    #[arg(long)]
    pub distinct: bool,
    #[command(flatten)]
    pub solve: SolveFlags,
}

#[derive(Debug, Clone, Args)]
pub struct ReplArgs {
    /// Module file to load (repeatable).
    #[arg(long = "module", short = 'm', value_name = "PATH")]
    pub modules: Vec<PathBuf>,
    #[command(flatten)]
    pub solve: SolveFlags,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Module file to load (repeatable).
    #[arg(long = "module", short = 'm', value_name = "PATH")]
    pub modules: Vec<PathBuf>,
    /// Query to check.
    #[arg(long, short = 'q', value_name = "TEXT")]
    pub query: Option<String>,
    /// Check N generated program/query pairs instead.
    #[arg(long, value_name = "N", conflicts_with = "query")]
    pub fuzz: Option<usize>,
    /// Seed for the program generator.
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub seed: u64,
    /// Bound on proof-tree height for both engine and oracle.
    #[arg(long, value_name = "N", default_value_t = DEFAULT_DEPTH)]
    pub max_depth: u32,
    #[arg(long, value_enum, default_value = "noisy")]
    pub free_vars: FreeVars,
}

/// Output streams and terminal facts for one invocation.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
    pub style: Style,
}

/// Entry point used by the binary.
pub fn main_from_env() -> i32 {
    let stdin = io::stdin();
    let mut stdin = stdin.lock();
    let stdout = io::stdout();
    let color = stdout.is_terminal() && std::env::var_os(NO_COLOR_VAR).is_none();
    let mut stdout = stdout.lock();
    let mut stderr = io::stderr();
    let mut io = Io { stdin: &mut stdin, stdout: &mut stdout, stderr: &mut stderr, style: Style { color } };
    run_cli(std::env::args_os(), &mut io)
}

pub fn run_cli<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_SUCCESS };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { io.stderr } else { io.stdout };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    let code = match cli.command {
        Some(Command::Run(args)) => run_batch(&args, io),
        Some(Command::Repl(args)) => repl::start(&args, io),
        Some(Command::Check(args)) => run_check(&args, io),
        None => run_batch(&cli.run, io),
    };
    let _ = io.stdout.flush();
    code
}

fn load_modules(session: &mut Session, modules: &[PathBuf], err: &mut dyn Write) -> bool {
    for path in modules {
        if let Err(e) = session.load_path(path) {
            for d in e.diagnostics() {
                let _ = writeln!(err, "error: {}: {d}", path.display());
            }
            return false;
        }
    }
    true
}

/// Prints up to `limit` solutions of `solver`. Returns the overall status.
pub fn print_solutions(
    solver: &mut Solver,
    limit: Option<usize>,
    distinct: bool,
    flags: &SolveFlags,
    out: &mut dyn Write,
    style: Style,
) -> io::Result<Status> {
    let mut seen: HashSet<Vec<Binding>> = HashSet::new();
    let mut printed = 0usize;
    let mut incomplete = false;
    while limit.is_none_or(|n| printed < n) {
        match solver.next_solution() {
            Outcome::Solution(sol) => {
                if distinct && !seen.insert(sol.answer.clone()) {
                    continue;
                }
                if printed > 0 && flags.format == Format::Text {
                    writeln!(out)?;
                }
                write_solution(out, &sol, flags.format, flags.trace, style)?;
                printed += 1;
            }
            Outcome::Exhausted => break,
            Outcome::Incomplete => {
                incomplete = true;
                break;
            }
        }
    }
    let status = if printed > 0 {
        Status::Success
    } else if incomplete {
        Status::Incomplete
    } else {
        Status::Fail
    };
    if printed == 0 {
        write_failure(out, status, flags.format)?;
    }
    Ok(status)
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Success => EXIT_SUCCESS,
        Status::Fail => EXIT_NO_SOLUTION,
        Status::Incomplete => EXIT_INCOMPLETE,
    }
}

pub fn run_batch(args: &RunArgs, io: &mut Io<'_>) -> i32 {
    let Some(query) = &args.query else {
        let _ = writeln!(io.stderr, "error: no query given (use --query, or the repl subcommand)");
        return EXIT_ERROR;
    };
    let mut session = Session::new();
    session.policy = args.solve.policy();
    if !load_modules(&mut session, &args.modules, io.stderr) {
        return EXIT_ERROR;
    }
    let mut solver = match session.solver(query, &args.solve.solve_config()) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: query: {e}");
            return EXIT_ERROR;
        }
    };
    let limit = if args.all { None } else { Some(args.max_solutions.unwrap_or(1)) };
    match print_solutions(&mut solver, limit, args.distinct, &args.solve, io.stdout, io.style) {
        Ok(status) => exit_code(status),
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn run_check(args: &CheckArgs, io: &mut Io<'_>) -> i32 {
    let config = OracleConfig { depth: args.max_depth, ..OracleConfig::default() };
    if let Some(n) = args.fuzz {
        let summary = check::fuzz(args.seed, n, config);
        let _ = write!(io.stdout, "{summary}");
        let _ = writeln!(io.stdout, "{}/{} MATCH", summary.matches, summary.total);
        return if summary.mismatches > 0 {
            EXIT_NO_SOLUTION
        } else if summary.overflows > 0 {
            EXIT_INCOMPLETE
        } else {
            EXIT_SUCCESS
        };
    }
    let Some(query) = &args.query else {
        let _ = writeln!(io.stderr, "error: check needs --query or --fuzz N");
        return EXIT_ERROR;
    };
    let mut session = Session::new();
    session.policy = SolveFlags {
        max_depth: None,
        groundness: Groundness::Strict,
        occurs_check: Switch::On,
        free_vars: args.free_vars,
        trace: false,
        format: Format::Text,
    }
    .policy();
    if !load_modules(&mut session, &args.modules, io.stderr) {
        return EXIT_ERROR;
    }
    let goal = match session.query(query) {
        Ok(g) => g,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: query: {e}");
            return EXIT_ERROR;
        }
    };
    let report = check::check_case(session.program(), &goal, config);
    let _ = writeln!(io.stdout, "{}", report.verdict.label());
    let _ = writeln!(io.stdout, "engine: {}", format_answer_set(&report.engine));
    match &report.oracle {
        Some(o) => {
            let _ = writeln!(io.stdout, "oracle: {}", format_answer_set(o));
        }
        None => {
            let _ = writeln!(io.stdout, "oracle: overflow (universe or work limit exceeded)");
        }
    }
    match report.verdict {
        Verdict::Match => EXIT_SUCCESS,
        Verdict::Mismatch { .. } => EXIT_NO_SOLUTION,
        Verdict::Overflow => EXIT_INCOMPLETE,
    }
}
