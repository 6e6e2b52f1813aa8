//! The two-phase proof procedure.
//!
//! Goal reduction (`pv`) takes a goal apart until it reaches atoms; an atom is
//! then proved by backchaining (`bc`) on the program, decomposing a clause
//! until a fact or rule head matches. Quantifier instances are chosen by
//! introducing a fresh logic variable and letting unification pick the term.
//! Alternatives are explored depth-first, left to right, in clause order, with
//! chronological backtracking.
//!
//! The machine keeps a persistent continuation of pending tasks and a stack of
//! choice points. Each proof step is emitted once all of its premises have
//! been proved, so the recorded trace is naturally in bottom-up order.

mod trace;

use std::collections::HashMap;
use std::sync::Arc;

pub use trace::{
    answer_labels, collect_answer, format_answer, format_proof, replay, Answer, Binding, Focus, GroundnessMode,
    ProofStep, ProofTrace, StepKind,
};

use crate::ast::{Atom, Clause, Goal};
use crate::loader::Program;
use crate::subst::{Substitution, TrailMark};
use crate::term::{Name, Term, VarSupply};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveConfig {
    pub groundness: GroundnessMode,
    /// Bound on the height of the proof tree; `None` is unlimited.
    pub max_depth: Option<u32>,
    /// `None` is unlimited.
    pub max_solutions: Option<usize>,
    pub occurs_check: bool,
    pub trace_enabled: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            groundness: GroundnessMode::Strict,
            max_depth: None,
            max_solutions: Some(1),
            occurs_check: true,
            trace_enabled: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// Noisy instantiations in step order.
    pub answer: Vec<Binding>,
    /// Empty when tracing is disabled.
    pub trace: ProofTrace,
    pub final_subst: Substitution,
    /// False only in lenient mode, when some answer term has variables left.
    pub ground: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Solution(Solution),
    /// No further proofs exist.
    Exhausted,
    /// No further proofs within the depth bound, but some branch was cut off.
    Incomplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    Fail,
    Incomplete,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Success => "success",
            Status::Fail => "fail",
            Status::Incomplete => "incomplete",
        }
    }
}

/// Solutions gathered by [`Solver::run`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub solutions: Vec<Solution>,
    /// The search space was fully explored.
    pub exhausted: bool,
    /// Some branch hit the depth bound.
    pub incomplete: bool,
}

impl Report {
    pub fn status(&self) -> Status {
        if !self.solutions.is_empty() {
            Status::Success
        } else if self.incomplete {
            Status::Incomplete
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone)]
struct PendingStep {
    kind: StepKind,
    focus: Focus,
    goal: Goal,
    theta: Option<Binding>,
}

#[derive(Debug, Clone)]
enum Task {
    Prove {
        goal: Goal,
        depth: u32,
    },
    /// Backchain on the whole program (the clause-choice step).
    Dispatch {
        atom: Atom,
        depth: u32,
    },
    Backchain {
        clause: Clause,
        atom: Atom,
        depth: u32,
    },
    Emit(PendingStep),
}

#[derive(Debug)]
struct Node {
    task: Task,
    next: Cont,
}

/// Persistent list of pending tasks; cloning is O(1).
#[derive(Debug, Clone, Default)]
struct Cont(Option<Arc<Node>>);

impl Cont {
    fn push(self, task: Task) -> Cont {
        Cont(Some(Arc::new(Node { task, next: self })))
    }

    fn pop(&self) -> Option<(Task, Cont)> {
        self.0.as_ref().map(|n| (n.task.clone(), n.next.clone()))
    }
}

#[derive(Debug)]
enum Alternatives {
    Clauses { atom: Atom, depth: u32, candidates: Arc<[usize]>, next: usize },
    Right { whole: Clause, right: Clause, atom: Atom, depth: u32 },
}

#[derive(Debug)]
struct ChoicePoint {
    alternatives: Alternatives,
    cont: Cont,
    mark: TrailMark,
    steps: usize,
    noisy: usize,
    next_var: u64,
}

/// Lazy proof search for one goal.
pub struct Solver {
    program: Arc<Program>,
    goal: Goal,
    config: SolveConfig,
    index: HashMap<(Name, usize), Arc<[usize]>>,
    subst: Substitution,
    vars: VarSupply,
    cont: Cont,
    choices: Vec<ChoicePoint>,
    steps: Vec<PendingStep>,
    noisy: Vec<Binding>,
    started: bool,
    finished: Option<Outcome>,
    incomplete: bool,
}

/// Starts a lazy search for proofs of `goal` from `program`.
pub fn solve(program: &Program, goal: &Goal, config: &SolveConfig) -> Solver {
    Solver::new(Arc::new(program.clone()), goal.clone(), config.clone())
}

impl Solver {
    pub fn new(program: Arc<Program>, goal: Goal, config: SolveConfig) -> Self {
        let mut index: HashMap<(Name, usize), Vec<usize>> = HashMap::new();
        for (i, c) in program.clauses.iter().enumerate() {
            for key in c.head_keys() {
                let list = index.entry(key).or_default();
                if list.last() != Some(&i) {
                    list.push(i);
                }
            }
        }
        let first_free = program.max_var_id().max(goal.max_var_id());
        Solver {
            index: index.into_iter().map(|(k, v)| (k, v.into())).collect(),
            program,
            cont: Cont::default().push(Task::Prove { goal: goal.clone(), depth: 1 }),
            goal,
            config,
            subst: Substitution::new(),
            vars: VarSupply::starting_after(first_free),
            choices: Vec::new(),
            steps: Vec::new(),
            noisy: Vec::new(),
            started: false,
            finished: None,
            incomplete: false,
        }
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn goal(&self) -> &Goal {
        &self.goal
    }

    pub fn config(&self) -> &SolveConfig {
        &self.config
    }

    /// True once some branch was cut off by the depth bound.
    pub fn hit_depth_limit(&self) -> bool {
        self.incomplete
    }

    /// Collects up to `config.max_solutions` solutions.
    pub fn run(mut self) -> Report {
        let mut solutions = Vec::new();
        let limit = self.config.max_solutions.unwrap_or(usize::MAX);
        let mut exhausted = false;
        while solutions.len() < limit {
            match self.next_solution() {
                Outcome::Solution(s) => solutions.push(s),
                Outcome::Exhausted | Outcome::Incomplete => {
                    exhausted = true;
                    break;
                }
            }
        }
        Report { solutions, exhausted, incomplete: self.incomplete }
    }

    pub fn next_solution(&mut self) -> Outcome {
        if let Some(done) = &self.finished {
            return done.clone();
        }
        if self.started && !self.backtrack() {
            return self.finish();
        }
        self.started = true;
        loop {
            let Some((task, rest)) = self.cont.pop() else {
                if let Some(sol) = self.solution() {
                    return Outcome::Solution(sol);
                }
                if !self.backtrack() {
                    return self.finish();
                }
                continue;
            };
            self.cont = rest;
            if !self.step(task) && !self.backtrack() {
                return self.finish();
            }
        }
    }

    fn finish(&mut self) -> Outcome {
        let out = if self.incomplete { Outcome::Incomplete } else { Outcome::Exhausted };
        self.finished = Some(out.clone());
        out
    }

    fn solution(&self) -> Option<Solution> {
        let answer = trace::answer_from(self.noisy.iter(), &self.subst, self.config.groundness)?;
        let steps = if self.config.trace_enabled {
            self.steps
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    ProofStep {
                        index: i + 1,
                        kind: p.kind,
                        focus: p.focus.clone(),
                        goal: p.goal.clone(),
                        theta: p.theta.clone(),
                    }
                    .resolve(&self.subst)
                })
                .collect()
        } else {
            Vec::new()
        };
        Some(Solution {
            answer: answer.bindings,
            trace: ProofTrace { steps },
            final_subst: self.subst.clone(),
            ground: answer.ground,
        })
    }

    fn within_depth(&mut self, depth: u32) -> bool {
        match self.config.max_depth {
            Some(max) if depth > max => {
                self.incomplete = true;
                false
            }
            _ => true,
        }
    }

    fn fresh(&mut self) -> Term {
        let id = self.vars.next_id();
        Term::Var(crate::term::Var::new(format!("_G{id}"), id))
    }

    fn push(&mut self, task: Task) {
        self.cont = std::mem::take(&mut self.cont).push(task);
    }

    fn emit_then(&mut self, step: PendingStep) {
        self.push(Task::Emit(step));
    }

    /// Runs one task. Returns false on failure.
    fn step(&mut self, task: Task) -> bool {
        match task {
            Task::Emit(step) => {
                if let Some(b) = &step.theta {
                    self.noisy.push(b.clone());
                }
                if self.config.trace_enabled {
                    self.steps.push(step);
                }
                true
            }
            Task::Prove { goal, depth } => {
                if !self.within_depth(depth) {
                    return false;
                }
                self.reduce_goal(goal, depth);
                true
            }
            Task::Dispatch { atom, depth } => self.dispatch(atom, depth),
            Task::Backchain { clause, atom, depth } => {
                if !self.within_depth(depth) {
                    return false;
                }
                self.backchain(clause, atom, depth)
            }
        }
    }

    /// Goal reduction: atom, conjunction, silent and noisy existentials.
    fn reduce_goal(&mut self, goal: Goal, depth: u32) {
        match &goal {
            Goal::Atom(a) => {
                let atom = a.clone();
                self.emit_then(pv(goal, None));
                self.push(Task::Dispatch { atom, depth: depth + 1 });
            }
            Goal::Conj(l, r) => {
                let (l, r) = ((**l).clone(), (**r).clone());
                self.emit_then(pv(goal, None));
                self.push(Task::Prove { goal: r, depth: depth + 1 });
                self.push(Task::Prove { goal: l, depth: depth + 1 });
            }
            Goal::Exists { var, body, noisy } => {
                let witness = self.fresh();
                let instance = body.substitute(var.id, &witness);
                let theta = noisy.then(|| Binding { var: var.clone(), term: witness });
                self.emit_then(pv(goal, theta));
                self.push(Task::Prove { goal: instance, depth: depth + 1 });
            }
        }
    }

    /// Backchaining on the whole program: with a single clause the program is
    /// that clause; otherwise one clause is chosen, in textual order.
    fn dispatch(&mut self, atom: Atom, depth: u32) -> bool {
        if let [only] = self.program.clauses.as_slice() {
            let clause = only.clone();
            return self.step(Task::Backchain { clause, atom, depth });
        }
        if !self.within_depth(depth) {
            return false;
        }
        let Some(candidates) = self.index.get(&atom.key()).cloned() else {
            return false;
        };
        let alternatives = Alternatives::Clauses { atom, depth, candidates, next: 0 };
        self.choose(alternatives)
    }

    fn backchain(&mut self, clause: Clause, atom: Atom, depth: u32) -> bool {
        match &clause {
            Clause::Fact(head) => {
                if !self.unify_atoms(head, &atom) {
                    return false;
                }
                self.emit_then(bc(clause, atom, None));
                true
            }
            Clause::Rule { body, head } => {
                if !self.unify_atoms(head, &atom) {
                    return false;
                }
                let body = body.clone();
                self.emit_then(bc(clause, atom, None));
                self.push(Task::Prove { goal: body, depth: depth + 1 });
                true
            }
            Clause::Forall { var, inner, noisy } => {
                let witness = self.fresh();
                let instance = inner.substitute(var.id, &witness);
                let theta = noisy.then(|| Binding { var: var.clone(), term: witness });
                self.emit_then(bc(clause.clone(), atom.clone(), theta));
                self.push(Task::Backchain { clause: instance, atom, depth: depth + 1 });
                true
            }
            Clause::Conj(l, r) => {
                let alternatives =
                    Alternatives::Right { whole: clause.clone(), right: (**r).clone(), atom: atom.clone(), depth };
                let left = (**l).clone();
                self.choose_first(alternatives, clause, left, atom, depth)
            }
        }
    }

    fn unify_atoms(&mut self, head: &Atom, atom: &Atom) -> bool {
        head.pred == atom.pred
            && head.args.len() == atom.args.len()
            && self.subst.unify_in_place(&head.to_term(), &atom.to_term(), self.config.occurs_check)
    }

    fn choice_point(&self, alternatives: Alternatives) -> ChoicePoint {
        ChoicePoint {
            alternatives,
            cont: self.cont.clone(),
            mark: self.subst.mark(),
            steps: self.steps.len(),
            noisy: self.noisy.len(),
            next_var: self.vars.peek(),
        }
    }

    fn choose(&mut self, alternatives: Alternatives) -> bool {
        let cp = self.choice_point(alternatives);
        self.choices.push(cp);
        self.resume_top()
    }

    fn choose_first(&mut self, right: Alternatives, whole: Clause, left: Clause, atom: Atom, depth: u32) -> bool {
        let cp = self.choice_point(right);
        self.choices.push(cp);
        self.emit_then(bc(whole, atom.clone(), None));
        self.push(Task::Backchain { clause: left, atom, depth: depth + 1 });
        true
    }

    /// Takes the next alternative of the newest choice point, dropping the
    /// point once it has none left. State must already be restored.
    fn resume_top(&mut self) -> bool {
        let Some(cp) = self.choices.last_mut() else {
            return false;
        };
        self.cont = cp.cont.clone();
        match &mut cp.alternatives {
            Alternatives::Clauses { atom, depth, candidates, next } => {
                let i = candidates[*next];
                *next += 1;
                let (atom, depth) = (atom.clone(), *depth);
                if *next == candidates.len() {
                    self.choices.pop();
                }
                let clause = self.program.clauses[i].clone();
                self.emit_then(PendingStep {
                    kind: StepKind::Bc,
                    focus: Focus::Program,
                    goal: Goal::Atom(atom.clone()),
                    theta: None,
                });
                self.push(Task::Backchain { clause, atom, depth: depth + 1 });
                true
            }
            Alternatives::Right { whole, right, atom, depth } => {
                let (whole, right, atom, depth) = (whole.clone(), right.clone(), atom.clone(), *depth);
                self.choices.pop();
                self.emit_then(bc(whole, atom.clone(), None));
                self.push(Task::Backchain { clause: right, atom, depth: depth + 1 });
                true
            }
        }
    }

    fn backtrack(&mut self) -> bool {
        let Some(cp) = self.choices.last() else {
            return false;
        };
        let (mark, steps, noisy, next_var) = (cp.mark, cp.steps, cp.noisy, cp.next_var);
        self.subst.undo_to(mark);
        self.steps.truncate(steps);
        self.noisy.truncate(noisy);
        self.vars.reset(next_var);
        self.resume_top()
    }
}

impl Iterator for Solver {
    type Item = Solution;

    fn next(&mut self) -> Option<Solution> {
        match self.next_solution() {
            Outcome::Solution(s) => Some(s),
            Outcome::Exhausted | Outcome::Incomplete => None,
        }
    }
}

fn pv(goal: Goal, theta: Option<Binding>) -> PendingStep {
    PendingStep { kind: StepKind::Pv, focus: Focus::Program, goal, theta }
}

fn bc(clause: Clause, atom: Atom, theta: Option<Binding>) -> PendingStep {
    PendingStep { kind: StepKind::Bc, focus: Focus::Clause(clause), goal: Goal::Atom(atom), theta }
}
