//! Proof steps, traces and answer substitutions.
//!
//! A trace lists the `pv` (goal reduction) and `bc` (backchaining) judgments of
//! one proof in post-order: every step comes after the steps it depends on, so
//! step 1 is the deepest leaf and the last step proves the original goal from
//! the whole program.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::ast::{Atom, Clause, Goal};
use crate::loader::Program;
use crate::subst::Substitution;
use crate::term::{Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Pv,
    Bc,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Pv => "pv",
            StepKind::Bc => "bc",
        })
    }
}

/// What a step works on: the whole program, or one (instantiated) clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Focus {
    Program,
    Clause(Clause),
}

impl fmt::Display for Focus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Focus::Program => f.write_str("D"),
            Focus::Clause(c) => c.fmt(f),
        }
    }
}

/// One recorded instantiation `<x, t>` of a noisy quantifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binding {
    /// The quantified variable as written in the formula.
    pub var: Var,
    pub term: Term,
}

impl Binding {
    pub fn resolve(&self, s: &Substitution) -> Binding {
        Binding { var: self.var.clone(), term: s.apply(&self.term) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProofStep {
    /// 1-based position in the trace.
    pub index: usize,
    pub kind: StepKind,
    pub focus: Focus,
    pub goal: Goal,
    pub theta: Option<Binding>,
}

impl ProofStep {
    pub fn resolve(&self, s: &Substitution) -> ProofStep {
        ProofStep {
            index: self.index,
            kind: self.kind,
            focus: match &self.focus {
                Focus::Program => Focus::Program,
                Focus::Clause(c) => Focus::Clause(c.apply(s)),
            },
            goal: self.goal.apply(s),
            theta: self.theta.as_ref().map(|b| b.resolve(s)),
        }
    }
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}. {}(", self.index, self.kind)?;
        if self.kind == StepKind::Bc {
            write!(f, "{}, ", self.focus)?;
        }
        write!(f, "D, {}, ", self.goal)?;
        match &self.theta {
            Some(b) => write!(f, "<{}, {}>)", b.var, b.term),
            None => f.write_str("nil)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProofTrace {
    pub steps: Vec<ProofStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroundnessMode {
    /// Noisy witnesses must be ground; other solutions are discarded.
    #[default]
    Strict,
    /// Non-ground witnesses are kept and the solution is flagged.
    Lenient,
}

/// Answer assembled from a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub bindings: Vec<Binding>,
    pub ground: bool,
}

/// Gathers the recorded instantiations of `trace` in step order, resolved
/// through `final_subst`. Returns `None` when strict mode rejects a
/// non-ground witness.
pub fn collect_answer(trace: &ProofTrace, final_subst: &Substitution, mode: GroundnessMode) -> Option<Answer> {
    answer_from(trace.steps.iter().filter_map(|s| s.theta.as_ref()), final_subst, mode)
}

pub(crate) fn answer_from<'a>(
    thetas: impl Iterator<Item = &'a Binding>,
    final_subst: &Substitution,
    mode: GroundnessMode,
) -> Option<Answer> {
    let bindings: Vec<Binding> = thetas.map(|b| b.resolve(final_subst)).collect();
    let ground = bindings.iter().all(|b| b.term.is_ground());
    if !ground && mode == GroundnessMode::Strict {
        return None;
    }
    Some(Answer { bindings, ground })
}

/// Display labels for answer variables: a name quantified more than once is
/// suffixed from its second occurrence on (`Y`, `Y#2`).
pub fn answer_labels(bindings: &[Binding]) -> Vec<String> {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    bindings
        .iter()
        .map(|b| {
            let n = seen.entry(&b.var.name).or_insert(0);
            *n += 1;
            if *n == 1 {
                b.var.name.to_string()
            } else {
                format!("{}#{}", b.var.name, n)
            }
        })
        .collect()
}

/// `{Y = 4450, ...}`
pub fn format_answer(bindings: &[Binding]) -> String {
    let parts: Vec<String> =
        answer_labels(bindings).into_iter().zip(bindings).map(|(l, b)| format!("{l} = {}", b.term)).collect();
    format!("{{{}}}", parts.join(", "))
}

/// One line per step, deepest first, then the answer line.
pub fn format_proof(trace: &ProofTrace, answer: &[Binding]) -> String {
    let mut out = String::new();
    for step in &trace.steps {
        let _ = writeln!(out, "{step}");
    }
    let _ = writeln!(out, "answer: {}", format_answer(answer));
    out
}

// Replay: rebuild the proof tree from the post-order step list and check every
// step against the inference rule it claims to apply.

struct Node<'a> {
    step: &'a ProofStep,
}

/// Checks that `trace` is a well-formed proof of `goal` from `program`.
pub fn replay(trace: &ProofTrace, program: &Program, goal: &Goal) -> Result<(), String> {
    let mut stack: Vec<Node<'_>> = Vec::new();
    for (i, step) in trace.steps.iter().enumerate() {
        if step.index != i + 1 {
            return Err(format!("step {} carries index {}", i + 1, step.index));
        }
        let arity = premise_count(step, program)?;
        if stack.len() < arity {
            return Err(format!("step {} is missing premises", step.index));
        }
        let premises: Vec<&ProofStep> = stack.drain(stack.len() - arity..).map(|n| n.step).collect();
        check_step(step, &premises, program).map_err(|e| format!("step {}: {e}", step.index))?;
        stack.push(Node { step });
    }
    match stack.as_slice() {
        [root] => {
            let s = root.step;
            if s.kind != StepKind::Pv || s.focus != Focus::Program || s.goal != *goal {
                return Err("last step is not pv(D, G) for the query".into());
            }
            Ok(())
        }
        [] => Err("empty trace".into()),
        _ => Err(format!("{} disconnected subproofs", stack.len())),
    }
}

fn premise_count(step: &ProofStep, program: &Program) -> Result<usize, String> {
    Ok(match (&step.kind, &step.focus, &step.goal) {
        (StepKind::Pv, Focus::Program, Goal::Atom(_)) => 1,
        (StepKind::Pv, Focus::Program, Goal::Conj(..)) => 2,
        (StepKind::Pv, Focus::Program, Goal::Exists { .. }) => 1,
        (StepKind::Bc, Focus::Program, Goal::Atom(_)) if program.clauses.len() > 1 => 1,
        (StepKind::Bc, Focus::Clause(Clause::Fact(_)), Goal::Atom(_)) => 0,
        (StepKind::Bc, Focus::Clause(_), Goal::Atom(_)) => 1,
        _ => return Err(format!("step {} has an impossible shape", step.index)),
    })
}

fn expect(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn atom_of(g: &Goal) -> Option<&Atom> {
    match g {
        Goal::Atom(a) => Some(a),
        _ => None,
    }
}

fn is_bc_of<'a>(p: &'a ProofStep, atom: &Atom) -> Option<&'a Focus> {
    (p.kind == StepKind::Bc && atom_of(&p.goal) == Some(atom)).then_some(&p.focus)
}

fn check_step(step: &ProofStep, premises: &[&ProofStep], program: &Program) -> Result<(), String> {
    let pv_of = |p: &ProofStep, g: &Goal| p.kind == StepKind::Pv && p.focus == Focus::Program && p.goal == *g;
    match (&step.kind, &step.focus, &step.goal) {
        (StepKind::Pv, _, Goal::Atom(a)) => {
            expect(step.theta.is_none(), "atomic goal records a binding")?;
            let focus = is_bc_of(premises[0], a).ok_or("premise is not backchaining on the atom")?;
            match program.clauses.as_slice() {
                [only] => expect(*focus == Focus::Clause(only.clone()), "premise is not the program"),
                _ => expect(*focus == Focus::Program, "premise is not the program"),
            }
        }
        (StepKind::Pv, _, Goal::Conj(l, r)) => {
            expect(step.theta.is_none(), "conjunction records a binding")?;
            expect(pv_of(premises[0], l) && pv_of(premises[1], r), "premises do not prove the conjuncts")
        }
        (StepKind::Pv, _, Goal::Exists { var, body, noisy }) => {
            let p = premises[0];
            expect(p.kind == StepKind::Pv && p.focus == Focus::Program, "premise is not goal reduction")?;
            let mut witness = None;
            expect(match_goal(body, var.id, &p.goal, &mut witness), "premise is not an instance of the body")?;
            check_theta(step, var, *noisy, witness)
        }
        (StepKind::Bc, Focus::Program, Goal::Atom(a)) => {
            expect(step.theta.is_none(), "clause choice records a binding")?;
            match is_bc_of(premises[0], a) {
                Some(Focus::Clause(c)) => expect(program.clauses.contains(c), "premise clause is not in the program"),
                _ => Err("premise is not backchaining on a program clause".into()),
            }
        }
        (StepKind::Bc, Focus::Clause(clause), Goal::Atom(a)) => match clause {
            Clause::Fact(h) => {
                expect(step.theta.is_none(), "fact records a binding")?;
                expect(h == a, "fact does not match the atom")
            }
            Clause::Rule { body, head } => {
                expect(step.theta.is_none(), "rule records a binding")?;
                expect(head == a, "rule head does not match the atom")?;
                expect(pv_of(premises[0], body), "premise does not prove the rule body")
            }
            Clause::Forall { var, inner, noisy } => {
                let Some(Focus::Clause(c)) = is_bc_of(premises[0], a) else {
                    return Err("premise is not backchaining on an instance".into());
                };
                let mut witness = None;
                expect(match_clause(inner, var.id, c, &mut witness), "premise is not an instance")?;
                check_theta(step, var, *noisy, witness)
            }
            Clause::Conj(l, r) => {
                expect(step.theta.is_none(), "conjunction records a binding")?;
                match is_bc_of(premises[0], a) {
                    Some(Focus::Clause(c)) => expect(c == &**l || c == &**r, "premise is neither conjunct"),
                    _ => Err("premise is not backchaining on a conjunct".into()),
                }
            }
        },
        _ => Err("impossible step".into()),
    }
}

fn check_theta(step: &ProofStep, var: &Var, noisy: bool, witness: Option<Term>) -> Result<(), String> {
    match (&step.theta, noisy) {
        (None, false) => Ok(()),
        (Some(b), true) => {
            expect(b.var == *var, "binding names the wrong variable")?;
            match witness {
                // A vacuous quantifier leaves the witness unconstrained.
                None => Ok(()),
                Some(t) => expect(t == b.term, "binding disagrees with the instance"),
            }
        }
        (None, true) => Err("noisy quantifier without a recorded binding".into()),
        (Some(_), false) => Err("silent quantifier with a recorded binding".into()),
    }
}

fn match_term(pattern: &Term, x: u64, concrete: &Term, witness: &mut Option<Term>) -> bool {
    match (pattern, concrete) {
        (Term::Var(v), t) if v.id == x => match witness {
            Some(w) => w == t,
            None => {
                *witness = Some(t.clone());
                true
            }
        },
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(p, c)| match_term(p, x, c, witness))
        }
        (p, c) => p == c,
    }
}

fn match_atom(p: &Atom, x: u64, c: &Atom, w: &mut Option<Term>) -> bool {
    p.pred == c.pred && p.args.len() == c.args.len() && p.args.iter().zip(&c.args).all(|(p, c)| match_term(p, x, c, w))
}

fn match_goal(p: &Goal, x: u64, c: &Goal, w: &mut Option<Term>) -> bool {
    match (p, c) {
        (Goal::Atom(p), Goal::Atom(c)) => match_atom(p, x, c, w),
        (Goal::Conj(pl, pr), Goal::Conj(cl, cr)) => match_goal(pl, x, cl, w) && match_goal(pr, x, cr, w),
        (Goal::Exists { var: pv, body: pb, noisy: pn }, Goal::Exists { var: cv, body: cb, noisy: cn }) => {
            pv == cv && pn == cn && match_goal(pb, x, cb, w)
        }
        _ => false,
    }
}

fn match_clause(p: &Clause, x: u64, c: &Clause, w: &mut Option<Term>) -> bool {
    match (p, c) {
        (Clause::Fact(p), Clause::Fact(c)) => match_atom(p, x, c, w),
        (Clause::Rule { body: pb, head: ph }, Clause::Rule { body: cb, head: ch }) => {
            match_atom(ph, x, ch, w) && match_goal(pb, x, cb, w)
        }
        (Clause::Forall { var: pv, inner: pi, noisy: pn }, Clause::Forall { var: cv, inner: ci, noisy: cn }) => {
            pv == cv && pn == cn && match_clause(pi, x, ci, w)
        }
        (Clause::Conj(pl, pr), Clause::Conj(cl, cr)) => match_clause(pl, x, cl, w) && match_clause(pr, x, cr, w),
        _ => false,
    }
}
