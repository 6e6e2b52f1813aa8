//! Differential testing of the engine against the brute-force oracle.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::ast::{Goal, QueryPolicy};
use crate::engine::{GroundnessMode, Outcome, SolveConfig, Solver};
use crate::fuzz::{generate, FuzzCase, FuzzOptions};
use crate::loader::{LoadError, Loader, Program};
use crate::oracle::{self, format_answer_set, AnswerSet, OracleConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Match,
    Mismatch { engine_only: AnswerSet, oracle_only: AnswerSet },
    Overflow,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Match => "MATCH",
            Verdict::Mismatch { .. } => "MISMATCH",
            Verdict::Overflow => "OVERFLOW",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CaseReport {
    pub verdict: Verdict,
    pub engine: AnswerSet,
    pub oracle: Option<AnswerSet>,
}

/// Answer set of the engine in strict mode, all solutions, depth `depth`.
pub fn engine_answers(program: &Program, goal: &Goal, depth: u32) -> AnswerSet {
    let config = SolveConfig {
        groundness: GroundnessMode::Strict,
        max_depth: Some(depth),
        max_solutions: None,
        occurs_check: true,
        trace_enabled: false,
    };
    let mut solver = Solver::new(Arc::new(program.clone()), goal.clone(), config);
    let mut out = BTreeSet::new();
    while let Outcome::Solution(sol) = solver.next_solution() {
        out.insert(sol.answer.into_iter().map(|b| (b.var, b.term)).collect());
    }
    out
}

/// Compares `answers` against the oracle's set for the same bound.
pub fn check_with(
    program: &Program,
    goal: &Goal,
    config: OracleConfig,
    answers: impl FnOnce(&Program, &Goal, u32) -> AnswerSet,
) -> CaseReport {
    let engine = answers(program, goal, config.depth);
    let universe = oracle::herbrand_universe_for(program, goal, 0);
    match oracle::oracle_solve_with(program, goal, &universe, config) {
        Err(_) => CaseReport { verdict: Verdict::Overflow, engine, oracle: None },
        Ok(expected) => {
            let verdict = if expected == engine {
                Verdict::Match
            } else {
                Verdict::Mismatch {
                    engine_only: engine.difference(&expected).cloned().collect(),
                    oracle_only: expected.difference(&engine).cloned().collect(),
                }
            };
            CaseReport { verdict, engine, oracle: Some(expected) }
        }
    }
}

pub fn check_case(program: &Program, goal: &Goal, config: OracleConfig) -> CaseReport {
    check_with(program, goal, config, engine_answers)
}

/// Loads a generated case with a fresh loader.
pub fn load_case(case: &FuzzCase) -> Result<(Program, Goal), LoadError> {
    let mut loader = Loader::new();
    let program = loader.load_str(&case.program, "fuzz")?;
    let goal = loader.query(&case.query, QueryPolicy::default(), &program)?;
    Ok((program, goal))
}

#[derive(Debug, Clone, Default)]
pub struct FuzzSummary {
    pub total: usize,
    pub matches: usize,
    pub overflows: usize,
    pub mismatches: usize,
    /// The smallest mismatching case, if any.
    pub counterexample: Option<(FuzzCase, CaseReport)>,
}

impl FuzzSummary {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

impl fmt::Display for FuzzSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} cases: {} MATCH, {} MISMATCH, {} OVERFLOW",
            self.total, self.matches, self.mismatches, self.overflows
        )?;
        if let Some((case, report)) = &self.counterexample {
            writeln!(f, "counterexample (seed {}):", case.seed)?;
            for line in case.program.lines() {
                writeln!(f, "  {line}")?;
            }
            writeln!(f, "  ?- {}", case.query)?;
            writeln!(f, "  engine: {}", format_answer_set(&report.engine))?;
            if let Some(o) = &report.oracle {
                writeln!(f, "  oracle: {}", format_answer_set(o))?;
            }
        }
        Ok(())
    }
}

/// Runs `n` generated cases through `answers` and the oracle.
pub fn fuzz_with(
    seed: u64,
    n: usize,
    config: OracleConfig,
    answers: impl Fn(&Program, &Goal, u32) -> AnswerSet,
) -> FuzzSummary {
    let mut summary = FuzzSummary::default();
    for case in generate(seed, n, &FuzzOptions::default()) {
        let (program, goal) = match load_case(&case) {
            Ok(x) => x,
            Err(e) => panic!("generated case failed to load: {e}\n{}", case.program),
        };
        let report = check_with(&program, &goal, config, &answers);
        summary.total += 1;
        match report.verdict {
            Verdict::Match => summary.matches += 1,
            Verdict::Overflow => summary.overflows += 1,
            Verdict::Mismatch { .. } => {
                summary.mismatches += 1;
                let size = case.program.len() + case.query.len();
                let smaller =
                    summary.counterexample.as_ref().is_none_or(|(c, _)| size < c.program.len() + c.query.len());
                if smaller {
                    summary.counterexample = Some((case, report));
                }
            }
        }
    }
    summary
}

pub fn fuzz(seed: u64, n: usize, config: OracleConfig) -> FuzzSummary {
    fuzz_with(seed, n, config, engine_answers)
}
