//! Interactive loop.

use std::io::{self, BufRead, Write};
use std::path::Path;

use super::output::Format;
use super::{load_modules, print_solutions, FreeVars, Groundness, Io, ReplArgs, SolveFlags, Style, Switch};
use crate::engine::Solver;
use crate::session::Session;

const HELP: &str = "\
commands:
  <query>              solve a query, e.g. some* Y : phone(tom, _, Y).
  :more                next solution of the last query
  :load <path>         load a module
  :set <flag> <value>  groundness strict|lenient, occurs-check on|off,
                       max-depth N|none, free-vars noisy|silent,
                       format text|json, trace on|off
  :trace on|off        toggle proof traces
  :quit                leave
";

pub struct ReplState {
    pub session: Session,
    pub flags: SolveFlags,
    pub history: Vec<String>,
    solver: Option<Solver>,
}

impl ReplState {
    pub fn new(flags: SolveFlags) -> Self {
        let mut session = Session::new();
        session.policy = flags.policy();
        ReplState { session, flags, history: Vec::new(), solver: None }
    }
}

pub(super) fn start(args: &ReplArgs, io: &mut Io<'_>) -> i32 {
    let mut state = ReplState::new(args.solve.clone());
    if !load_modules(&mut state.session, &args.modules, io.stderr) {
        return super::EXIT_ERROR;
    }
    match run_repl(&mut state, io.stdin, io.stdout, io.style) {
        Ok(()) => super::EXIT_SUCCESS,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            super::EXIT_ERROR
        }
    }
}

/// Reads commands and queries from `input` until `:quit` or end of input.
pub fn run_repl(state: &mut ReplState, input: &mut dyn BufRead, out: &mut dyn Write, style: Style) -> io::Result<()> {
    let mut line = String::new();
    loop {
        write!(out, "?- ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            return Ok(());
        }
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(cmd) = text.strip_prefix(':') {
            if !command(state, cmd.trim(), out, style)? {
                return Ok(());
            }
        } else {
            query(state, text, out, style)?;
        }
    }
}

fn query(state: &mut ReplState, text: &str, out: &mut dyn Write, style: Style) -> io::Result<()> {
    state.history.push(text.to_string());
    state.session.policy = state.flags.policy();
    match state.session.solver(text, &state.flags.solve_config()) {
        Ok(mut solver) => {
            print_solutions(&mut solver, Some(1), false, &state.flags, out, style)?;
            state.solver = Some(solver);
        }
        Err(e) => {
            writeln!(out, "error: {e}")?;
            state.solver = None;
        }
    }
    Ok(())
}

/// Returns false on `:quit`.
fn command(state: &mut ReplState, cmd: &str, out: &mut dyn Write, style: Style) -> io::Result<bool> {
    let mut parts = cmd.split_whitespace();
    let name = parts.next().unwrap_or("");
    let rest: Vec<&str> = parts.collect();
    match (name, rest.as_slice()) {
        ("quit" | "q", []) => return Ok(false),
        ("help" | "h", []) => write!(out, "{HELP}")?,
        ("more" | "m", []) => match state.solver.as_mut() {
            None => writeln!(out, "no more solutions.")?,
            Some(solver) => {
                use crate::engine::Outcome;
                match solver.next_solution() {
                    Outcome::Solution(sol) => {
                        super::write_solution(out, &sol, state.flags.format, state.flags.trace, style)?;
                    }
                    Outcome::Exhausted => {
                        writeln!(out, "no more solutions.")?;
                        state.solver = None;
                    }
                    Outcome::Incomplete => {
                        writeln!(out, "no more solutions within the depth limit (search incomplete).")?;
                        state.solver = None;
                    }
                }
            }
        },
        ("load", [path]) => {
            let mut err = Vec::new();
            if load_modules(&mut state.session, &[Path::new(path).to_path_buf()], &mut err) {
                let m = state.session.modules().last().expect("just loaded");
                writeln!(out, "loaded module {} ({} clauses).", m.name, m.clauses.len())?;
            } else {
                out.write_all(&err)?;
            }
        }
        ("trace", [v]) => set(state, "trace", v, out)?,
        ("set", [flag, v]) => set(state, flag, v, out)?,
        _ => writeln!(out, "error: unknown command `:{cmd}` (try :help)")?,
    }
    Ok(true)
}

fn set(state: &mut ReplState, flag: &str, value: &str, out: &mut dyn Write) -> io::Result<()> {
    let f = &mut state.flags;
    let ok = match (flag, value) {
        ("groundness", "strict") => {
            f.groundness = Groundness::Strict;
            true
        }
        ("groundness", "lenient") => {
            f.groundness = Groundness::Lenient;
            true
        }
        ("occurs-check", v @ ("on" | "off")) => {
            f.occurs_check = if v == "on" { Switch::On } else { Switch::Off };
            true
        }
        ("trace", v @ ("on" | "off")) => {
            f.trace = v == "on";
            true
        }
        ("free-vars", "noisy") => {
            f.free_vars = FreeVars::Noisy;
            true
        }
        ("free-vars", "silent") => {
            f.free_vars = FreeVars::Silent;
            true
        }
        ("format", "text") => {
            f.format = Format::Text;
            true
        }
        ("format", "json") => {
            f.format = Format::Json;
            true
        }
        ("max-depth", "none") => {
            f.max_depth = None;
            true
        }
        ("max-depth", n) => match n.parse() {
            Ok(n) => {
                f.max_depth = Some(n);
                true
            }
            Err(_) => false,
        },
        _ => false,
    };
    if ok {
        writeln!(out, "{flag} = {value}.")
    } else {
        writeln!(out, "error: cannot set `{flag}` to `{value}` (try :help)")
    }
}
