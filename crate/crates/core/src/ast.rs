//! Goal formulas (G) and program clauses (D).
//!
//! ```text
//! G ::= A | G, G | some X : G | some* X : G
//! D ::= A | A :- G | all X : D | all* X : D | D & D
//! ```
//!
//! The starred quantifiers are noisy: their instantiation is recorded in the
//! answer substitution.

use std::collections::BTreeSet;
use std::fmt;

use crate::subst::Substitution;
use crate::term::{write_list, Name, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Name,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<Name>, args: Vec<Term>) -> Self {
        Atom { pred: pred.into(), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn key(&self) -> (Name, usize) {
        (self.pred.clone(), self.args.len())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    /// The atom viewed as a term, for unification.
    pub fn to_term(&self) -> Term {
        Term::compound(self.pred.clone(), self.args.clone())
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Option<Term>) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.map_vars(f)).collect() }
    }

    pub fn apply(&self, s: &Substitution) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| s.apply(a)).collect() }
    }

    pub fn for_each_var<'a>(&'a self, f: &mut impl FnMut(&'a Var)) {
        self.args.iter().for_each(|a| a.for_each_var(f));
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Goal {
    Atom(Atom),
    Conj(Box<Goal>, Box<Goal>),
    Exists { var: Var, body: Box<Goal>, noisy: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Clause {
    Fact(Atom),
    /// `head :- body`, i.e. `body ⊃ head`.
    Rule {
        body: Goal,
        head: Atom,
    },
    Forall {
        var: Var,
        inner: Box<Clause>,
        noisy: bool,
    },
    Conj(Box<Clause>, Box<Clause>),
}

/// How named free variables of a query are closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FreeVarDefault {
    #[default]
    NoisyExistential,
    SilentExistential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QueryPolicy {
    pub default_free_var: FreeVarDefault,
}

impl Goal {
    pub fn atom(pred: impl Into<Name>, args: Vec<Term>) -> Goal {
        Goal::Atom(Atom::new(pred, args))
    }

    pub fn conj(left: Goal, right: Goal) -> Goal {
        Goal::Conj(Box::new(left), Box::new(right))
    }

    pub fn exists(var: Var, body: Goal, noisy: bool) -> Goal {
        Goal::Exists { var, body: Box::new(body), noisy }
    }

    /// Replaces free occurrences of variable `id`.
    pub fn substitute(&self, id: u64, by: &Term) -> Goal {
        match self {
            Goal::Atom(a) => Goal::Atom(a.map_vars(&mut |v| (v.id == id).then(|| by.clone()))),
            Goal::Conj(l, r) => Goal::conj(l.substitute(id, by), r.substitute(id, by)),
            Goal::Exists { var, body, noisy } => {
                if var.id == id {
                    self.clone()
                } else {
                    Goal::exists(var.clone(), body.substitute(id, by), *noisy)
                }
            }
        }
    }

    /// Applies `s` to every variable occurrence. Binder variables must not be
    /// in the domain of `s`.
    pub fn apply(&self, s: &Substitution) -> Goal {
        match self {
            Goal::Atom(a) => Goal::Atom(a.apply(s)),
            Goal::Conj(l, r) => Goal::conj(l.apply(s), r.apply(s)),
            Goal::Exists { var, body, noisy } => Goal::exists(var.clone(), body.apply(s), *noisy),
        }
    }

    /// Rebuilds the goal, replacing variable occurrences (not binders) for
    /// which `f` returns `Some`.
    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Option<Term>) -> Goal {
        match self {
            Goal::Atom(a) => Goal::Atom(a.map_vars(f)),
            Goal::Conj(l, r) => Goal::conj(l.map_vars(f), r.map_vars(f)),
            Goal::Exists { var, body, noisy } => Goal::exists(var.clone(), body.map_vars(f), *noisy),
        }
    }

    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Goal::Atom(a) => f(a),
            Goal::Conj(l, r) => {
                l.for_each_atom(f);
                r.for_each_atom(f);
            }
            Goal::Exists { body, .. } => body.for_each_atom(f),
        }
    }

    pub fn max_var_id(&self) -> u64 {
        let mut max = 0;
        self.for_each_binder(&mut |v, _| max = max.max(v.id));
        self.for_each_atom(&mut |a| a.for_each_var(&mut |v| max = max.max(v.id)));
        max
    }

    pub fn for_each_binder<'a>(&'a self, f: &mut impl FnMut(&'a Var, bool)) {
        match self {
            Goal::Atom(_) => {}
            Goal::Conj(l, r) => {
                l.for_each_binder(f);
                r.for_each_binder(f);
            }
            Goal::Exists { var, body, noisy } => {
                f(var, *noisy);
                body.for_each_binder(f);
            }
        }
    }

    pub fn collect_constants(&self, out: &mut BTreeSet<Term>) {
        self.for_each_atom(&mut |a| a.args.iter().for_each(|t| t.collect_constants(out)));
    }

    /// Every noisy existential made silent.
    pub fn silenced(&self) -> Goal {
        match self {
            Goal::Atom(_) => self.clone(),
            Goal::Conj(l, r) => Goal::conj(l.silenced(), r.silenced()),
            Goal::Exists { var, body, .. } => Goal::exists(var.clone(), body.silenced(), false),
        }
    }
}

impl Clause {
    pub fn fact(head: Atom) -> Clause {
        Clause::Fact(head)
    }

    pub fn rule(head: Atom, body: Goal) -> Clause {
        Clause::Rule { body, head }
    }

    pub fn forall(var: Var, inner: Clause, noisy: bool) -> Clause {
        Clause::Forall { var, inner: Box::new(inner), noisy }
    }

    pub fn conj(left: Clause, right: Clause) -> Clause {
        Clause::Conj(Box::new(left), Box::new(right))
    }

    pub fn substitute(&self, id: u64, by: &Term) -> Clause {
        let mut f = |v: &Var| (v.id == id).then(|| by.clone());
        match self {
            Clause::Fact(h) => Clause::Fact(h.map_vars(&mut f)),
            Clause::Rule { body, head } => Clause::Rule { body: body.substitute(id, by), head: head.map_vars(&mut f) },
            Clause::Forall { var, inner, noisy } => {
                if var.id == id {
                    self.clone()
                } else {
                    Clause::forall(var.clone(), inner.substitute(id, by), *noisy)
                }
            }
            Clause::Conj(l, r) => Clause::conj(l.substitute(id, by), r.substitute(id, by)),
        }
    }

    pub fn apply(&self, s: &Substitution) -> Clause {
        match self {
            Clause::Fact(h) => Clause::Fact(h.apply(s)),
            Clause::Rule { body, head } => Clause::Rule { body: body.apply(s), head: head.apply(s) },
            Clause::Forall { var, inner, noisy } => Clause::forall(var.clone(), inner.apply(s), *noisy),
            Clause::Conj(l, r) => Clause::conj(l.apply(s), r.apply(s)),
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Option<Term>) -> Clause {
        match self {
            Clause::Fact(h) => Clause::Fact(h.map_vars(f)),
            Clause::Rule { body, head } => Clause::Rule { body: body.map_vars(f), head: head.map_vars(f) },
            Clause::Forall { var, inner, noisy } => Clause::forall(var.clone(), inner.map_vars(f), *noisy),
            Clause::Conj(l, r) => Clause::conj(l.map_vars(f), r.map_vars(f)),
        }
    }

    /// Head atoms and rule bodies, in textual order.
    pub fn for_each_part<'a>(&'a self, f: &mut impl FnMut(&'a Atom, Option<&'a Goal>)) {
        match self {
            Clause::Fact(h) => f(h, None),
            Clause::Rule { body, head } => f(head, Some(body)),
            Clause::Forall { inner, .. } => inner.for_each_part(f),
            Clause::Conj(l, r) => {
                l.for_each_part(f);
                r.for_each_part(f);
            }
        }
    }

    /// `(predicate, arity)` of every head in the clause.
    pub fn head_keys(&self) -> Vec<(Name, usize)> {
        let mut keys = Vec::new();
        self.for_each_part(&mut |h, _| keys.push(h.key()));
        keys
    }

    pub fn for_each_binder<'a>(&'a self, f: &mut impl FnMut(&'a Var, bool)) {
        match self {
            Clause::Fact(_) => {}
            Clause::Rule { body, .. } => body.for_each_binder(f),
            Clause::Forall { var, inner, noisy } => {
                f(var, *noisy);
                inner.for_each_binder(f);
            }
            Clause::Conj(l, r) => {
                l.for_each_binder(f);
                r.for_each_binder(f);
            }
        }
    }

    pub fn max_var_id(&self) -> u64 {
        let mut max = 0;
        self.for_each_binder(&mut |v, _| max = max.max(v.id));
        self.for_each_part(&mut |h, body| {
            h.for_each_var(&mut |v| max = max.max(v.id));
            if let Some(b) = body {
                max = max.max(b.max_var_id());
            }
        });
        max
    }

    pub fn collect_constants(&self, out: &mut BTreeSet<Term>) {
        self.for_each_part(&mut |h, body| {
            h.args.iter().for_each(|t| t.collect_constants(out));
            if let Some(b) = body {
                b.collect_constants(out);
            }
        });
    }

    /// Every noisy quantifier (clause and body) made silent.
    pub fn silenced(&self) -> Clause {
        match self {
            Clause::Fact(_) => self.clone(),
            Clause::Rule { body, head } => Clause::rule(head.clone(), body.silenced()),
            Clause::Forall { var, inner, .. } => Clause::forall(var.clone(), inner.silenced(), false),
            Clause::Conj(l, r) => Clause::conj(l.silenced(), r.silenced()),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            write_list(f, &self.args)?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn quantifier(f: &mut fmt::Formatter<'_>, word: &str, noisy: bool, var: &Var) -> fmt::Result {
    write!(f, "{word}{} {var} : ", if noisy { "*" } else { "" })
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Atom(a) => a.fmt(f),
            Goal::Conj(l, r) => {
                // `,` is right-associative and a quantifier scopes to the end
                // of its group, so only the left operand may need parentheses.
                match **l {
                    Goal::Atom(_) => l.fmt(f)?,
                    _ => write!(f, "({l})")?,
                }
                write!(f, ", {r}")
            }
            Goal::Exists { var, body, noisy } => {
                quantifier(f, "some", *noisy, var)?;
                body.fmt(f)
            }
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Fact(h) => h.fmt(f),
            Clause::Rule { body, head } => write!(f, "{head} :- {body}"),
            Clause::Forall { var, inner, noisy } => {
                quantifier(f, "all", *noisy, var)?;
                inner.fmt(f)
            }
            Clause::Conj(l, r) => write!(f, "({l}) & ({r})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(name: &str, id: u64) -> Var {
        Var::new(name, id)
    }

    #[test]
    fn goal_display_parenthesizes_left_operands_only() {
        let a = Goal::atom("a", vec![]);
        let b = Goal::atom("b", vec![]);
        let c = Goal::atom("c", vec![]);
        let right = Goal::conj(a.clone(), Goal::conj(b.clone(), c.clone()));
        assert_eq!(right.to_string(), "a, b, c");
        let left = Goal::conj(Goal::conj(a.clone(), b.clone()), c.clone());
        assert_eq!(left.to_string(), "(a, b), c");
        let x = var("X", 1);
        let q = Goal::exists(x.clone(), Goal::atom("p", vec![Term::Var(x.clone())]), true);
        assert_eq!(Goal::conj(q.clone(), a).to_string(), "(some* X : p(X)), a");
    }

    #[test]
    fn substitute_respects_binders() {
        let x = var("X", 1);
        let y = var("Y", 2);
        let g = Goal::exists(
            y.clone(),
            Goal::atom("phone", vec![Term::constant("tom"), x.clone().into(), y.clone().into()]),
            true,
        );
        let g2 = g.substitute(1, &Term::constant("cs"));
        assert_eq!(g2.to_string(), "some* Y : phone(tom, cs, Y)");
        assert_eq!(g.substitute(2, &Term::constant("cs")), g);
    }

    #[test]
    fn clause_display() {
        let x = var("X", 1);
        let c = Clause::forall(
            x.clone(),
            Clause::rule(Atom::new("p", vec![x.clone().into()]), Goal::atom("q", vec![x.clone().into()])),
            true,
        );
        assert_eq!(c.to_string(), "all* X : p(X) :- q(X)");
        assert_eq!(c.head_keys(), vec![("p".into(), 1)]);
    }
}
