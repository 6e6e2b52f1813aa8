use std::collections::BTreeMap;
use std::fmt;

use crate::ast::{Atom, Clause, Goal};
use crate::parser::Pos;
use crate::term::{Name, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WfError {
    pub message: String,
    pub pos: Option<Pos>,
}

impl fmt::Display for WfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(p) => write!(f, "{p}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Predicate arities, fixed by first use.
#[derive(Debug, Clone, Default)]
pub struct ArityTable {
    arities: BTreeMap<Name, usize>,
}

impl ArityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, pred: &str) -> Option<usize> {
        self.arities.get(pred).copied()
    }
}

pub enum Ast<'a> {
    Goal(&'a Goal),
    Clause(&'a Clause),
}

/// Checks a single goal or clause against a fresh arity table.
pub fn wellformed(ast: Ast<'_>) -> Result<(), Vec<WfError>> {
    let mut table = ArityTable::new();
    match ast {
        Ast::Goal(g) => check_goal(g, &mut table, None),
        Ast::Clause(c) => check_clause(c, &mut table, None),
    }
}

pub fn check_clause(c: &Clause, table: &mut ArityTable, pos: Option<Pos>) -> Result<(), Vec<WfError>> {
    let mut cx = Checker { table, scope: Vec::new(), errors: Vec::new(), pos };
    cx.clause(c);
    cx.finish()
}

pub fn check_goal(g: &Goal, table: &mut ArityTable, pos: Option<Pos>) -> Result<(), Vec<WfError>> {
    let mut cx = Checker { table, scope: Vec::new(), errors: Vec::new(), pos };
    cx.goal(g);
    cx.finish()
}

struct Checker<'t> {
    table: &'t mut ArityTable,
    scope: Vec<u64>,
    errors: Vec<WfError>,
    pos: Option<Pos>,
}

impl Checker<'_> {
    fn finish(self) -> Result<(), Vec<WfError>> {
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(self.errors)
        }
    }

    fn error(&mut self, message: String) {
        if !self.errors.iter().any(|e| e.message == message) {
            self.errors.push(WfError { message, pos: self.pos });
        }
    }

    fn atom(&mut self, a: &Atom) {
        match self.table.arities.get(&a.pred) {
            Some(&n) if n != a.arity() => {
                self.error(format!("predicate `{}` used with arity {}, but earlier with arity {n}", a.pred, a.arity()))
            }
            Some(_) => {}
            None => {
                self.table.arities.insert(a.pred.clone(), a.arity());
            }
        }
        for t in &a.args {
            self.term(t);
        }
    }

    fn term(&mut self, t: &Term) {
        match t {
            Term::Var(v) if v.is_star() => self.error("unresolved `*` placeholder".into()),
            Term::Var(v) if v.is_raw() || !self.scope.contains(&v.id) => self.error(format!("unbound variable `{v}`")),
            Term::Var(_) | Term::Const(_) | Term::Unknown(_) => {}
            Term::Compound(f, args) => {
                if args.is_empty() {
                    self.error(format!("compound `{f}` has no arguments"));
                }
                args.iter().for_each(|a| self.term(a));
            }
        }
    }

    fn goal(&mut self, g: &Goal) {
        match g {
            Goal::Atom(a) => self.atom(a),
            Goal::Conj(l, r) => {
                self.goal(l);
                self.goal(r);
            }
            Goal::Exists { var, body, .. } => {
                self.scope.push(var.id);
                self.goal(body);
                self.scope.pop();
            }
        }
    }

    fn clause(&mut self, c: &Clause) {
        match c {
            Clause::Fact(h) => self.atom(h),
            Clause::Rule { body, head } => {
                self.atom(head);
                self.goal(body);
            }
            Clause::Forall { var, inner, .. } => {
                self.scope.push(var.id);
                self.clause(inner);
                self.scope.pop();
            }
            Clause::Conj(l, r) => {
                self.clause(l);
                self.clause(r);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desugar::desugar_clause_vars;
    use crate::parser::parse_clause;
    use crate::term::{Var, VarSupply};

    #[test]
    fn closed_fact_is_wellformed() {
        let x = Var::new("X", 1);
        let c = Clause::forall(x.clone(), Clause::Fact(Atom::new("p", vec![x.into()])), false);
        assert_eq!(wellformed(Ast::Clause(&c)), Ok(()));
    }

    #[test]
    fn free_variable_is_reported() {
        let c = Clause::Fact(Atom::new("p", vec![Var::new("X", 1).into()]));
        let errs = wellformed(Ast::Clause(&c)).unwrap_err();
        assert!(errs[0].message.contains("unbound variable"));
        let raw = parse_clause("p(X).").unwrap();
        assert!(wellformed(Ast::Clause(&raw)).is_err());
    }

    #[test]
    fn arity_is_fixed_by_first_use() {
        let mut s = VarSupply::new();
        let c = desugar_clause_vars(&parse_clause("p(X) :- p(X, X).").unwrap(), &mut s);
        let errs = wellformed(Ast::Clause(&c)).unwrap_err();
        assert!(errs[0].message.contains("arity"));
    }

    #[test]
    fn placeholder_must_be_resolved() {
        let raw = parse_clause("p(*).").unwrap();
        let errs = wellformed(Ast::Clause(&raw)).unwrap_err();
        assert!(errs[0].message.contains("`*`"));
    }

    #[test]
    fn empty_compound_rejected() {
        let c = Clause::Fact(Atom::new("p", vec![Term::Compound("f".into(), vec![])]));
        assert!(wellformed(Ast::Clause(&c)).is_err());
    }
}
