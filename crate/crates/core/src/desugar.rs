//! Closing raw clauses and queries under quantifiers.
//!
//! Free variables of a clause become silent universals. Free variables of a
//! query become existentials, noisy or silent according to the
//! [`QueryPolicy`]. Every `_` is a separate silent quantifier in both cases.
//! Binders get session-unique ids; variables that already carry an id are left
//! untouched, which makes desugaring idempotent.

use crate::ast::{Atom, Clause, FreeVarDefault, Goal, QueryPolicy};
use crate::term::{Name, Term, Var, VarSupply};

#[derive(Debug, Clone)]
struct Free {
    var: Var,
    anonymous: bool,
}

struct Closer<'s> {
    supply: &'s mut VarSupply,
    scope: Vec<(Name, Var)>,
    free: Vec<Free>,
    anon_count: usize,
}

impl<'s> Closer<'s> {
    fn new(supply: &'s mut VarSupply) -> Self {
        Closer { supply, scope: Vec::new(), free: Vec::new(), anon_count: 0 }
    }

    fn bind(&mut self, v: &Var) -> Var {
        if v.is_raw() {
            self.supply.fresh(&v.name)
        } else {
            v.clone()
        }
    }

    fn occurrence(&mut self, v: &Var) -> Option<Term> {
        if !v.is_raw() || v.is_star() {
            return None;
        }
        if v.is_anonymous() {
            self.anon_count += 1;
            let fresh = self.supply.fresh(&format!("_{}", self.anon_count));
            self.free.push(Free { var: fresh.clone(), anonymous: true });
            return Some(Term::Var(fresh));
        }
        if let Some((_, bound)) = self.scope.iter().rev().find(|(n, _)| *n == v.name) {
            return Some(Term::Var(bound.clone()));
        }
        if let Some(f) = self.free.iter().find(|f| !f.anonymous && f.var.name == v.name) {
            return Some(Term::Var(f.var.clone()));
        }
        let fresh = self.supply.fresh(&v.name);
        self.free.push(Free { var: fresh.clone(), anonymous: false });
        Some(Term::Var(fresh))
    }

    fn atom(&mut self, a: &Atom) -> Atom {
        a.map_vars(&mut |v| self.occurrence(v))
    }

    fn goal(&mut self, g: &Goal) -> Goal {
        match g {
            Goal::Atom(a) => Goal::Atom(self.atom(a)),
            Goal::Conj(l, r) => {
                let l = self.goal(l);
                Goal::conj(l, self.goal(r))
            }
            Goal::Exists { var, body, noisy } => {
                let bound = self.bind(var);
                self.scope.push((var.name.clone(), bound.clone()));
                let body = self.goal(body);
                self.scope.pop();
                Goal::exists(bound, body, *noisy)
            }
        }
    }

    fn clause(&mut self, c: &Clause) -> Clause {
        match c {
            Clause::Fact(h) => Clause::Fact(self.atom(h)),
            Clause::Rule { body, head } => {
                let head = self.atom(head);
                Clause::rule(head, self.goal(body))
            }
            Clause::Forall { var, inner, noisy } => {
                let bound = self.bind(var);
                self.scope.push((var.name.clone(), bound.clone()));
                let inner = self.clause(inner);
                self.scope.pop();
                Clause::forall(bound, inner, *noisy)
            }
            Clause::Conj(l, r) => {
                let l = self.clause(l);
                Clause::conj(l, self.clause(r))
            }
        }
    }
}

/// Closes a raw clause: every free variable and every `_` gets its own silent
/// universal, outermost in order of first occurrence.
pub fn desugar_clause_vars(raw: &Clause, supply: &mut VarSupply) -> Clause {
    let mut closer = Closer::new(supply);
    let body = closer.clause(raw);
    closer.free.into_iter().rev().fold(body, |c, f| Clause::forall(f.var, c, false))
}

/// Closes a raw query. Named free variables follow `policy`; each `_` is a
/// silent existential.
pub fn desugar_query_vars(raw: &Goal, policy: QueryPolicy, supply: &mut VarSupply) -> Goal {
    let mut closer = Closer::new(supply);
    let body = closer.goal(raw);
    let named_noisy = policy.default_free_var == FreeVarDefault::NoisyExistential;
    closer.free.into_iter().rev().fold(body, |g, f| {
        let noisy = named_noisy && !f.anonymous;
        Goal::exists(f.var, g, noisy)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_clause, parse_query};

    fn count_clause_quantifiers(c: &Clause) -> usize {
        let mut n = 0;
        c.for_each_binder(&mut |_, _| n += 1);
        n
    }

    #[test]
    fn rule_free_variables_become_silent_universals() {
        let mut s = VarSupply::new();
        let c = desugar_clause_vars(&parse_clause("p(X) :- q(X).").unwrap(), &mut s);
        let Clause::Forall { var, inner, noisy } = &c else { panic!("expected forall, got {c}") };
        assert!(!noisy);
        assert_eq!(&*var.name, "X");
        let Clause::Rule { body, head } = &**inner else { panic!() };
        assert_eq!(head.args[0], Term::Var(var.clone()));
        assert_eq!(*body, Goal::atom("q", vec![Term::Var(var.clone())]));
    }

    #[test]
    fn each_anonymous_variable_is_distinct() {
        let mut s = VarSupply::new();
        let c = desugar_clause_vars(&parse_clause("p(_, _).").unwrap(), &mut s);
        let Clause::Forall { var: v1, inner, noisy: false } = &c else { panic!() };
        let Clause::Forall { var: v2, inner, noisy: false } = &**inner else { panic!() };
        assert_ne!(v1, v2);
        assert_eq!(**inner, Clause::Fact(Atom::new("p", vec![v1.clone().into(), v2.clone().into()])));
    }

    #[test]
    fn explicit_noisy_prefix_is_kept() {
        let mut s = VarSupply::new();
        let c = desugar_clause_vars(&parse_clause("all* X : p(X) :- q(X).").unwrap(), &mut s);
        assert!(matches!(c, Clause::Forall { noisy: true, .. }));
        assert_eq!(count_clause_quantifiers(&c), 1);
    }

    #[test]
    fn anonymous_query_variable_is_silent_named_is_noisy() {
        let mut s = VarSupply::new();
        let g = desugar_query_vars(&parse_query("phone(tom, _, Y)").unwrap(), QueryPolicy::default(), &mut s);
        let Goal::Exists { noisy: false, body, .. } = &g else { panic!("{g}") };
        let Goal::Exists { noisy: true, var, .. } = &**body else { panic!("{g}") };
        assert_eq!(&*var.name, "Y");
    }

    #[test]
    fn silent_policy() {
        let mut s = VarSupply::new();
        let policy = QueryPolicy { default_free_var: FreeVarDefault::SilentExistential };
        let g = desugar_query_vars(&parse_query("p(Y)").unwrap(), policy, &mut s);
        assert!(matches!(g, Goal::Exists { noisy: false, .. }));
    }

    #[test]
    fn explicit_binders_are_preserved() {
        let mut s = VarSupply::new();
        let g = desugar_query_vars(
            &parse_query("some X : some* Y : phone(tom, X, Y)").unwrap(),
            QueryPolicy::default(),
            &mut s,
        );
        assert_eq!(g.to_string(), "some X : some* Y : phone(tom, X, Y)");
        let Goal::Exists { var: x, body, noisy: false } = &g else { panic!() };
        let Goal::Exists { var: y, body, noisy: true } = &**body else { panic!() };
        assert_eq!(**body, Goal::atom("phone", vec![Term::constant("tom"), x.clone().into(), y.clone().into()]));
    }

    #[test]
    fn ground_query_unchanged() {
        let mut s = VarSupply::new();
        let raw = parse_query("p(a)").unwrap();
        assert_eq!(desugar_query_vars(&raw, QueryPolicy::default(), &mut s), raw);
    }

    #[test]
    fn shadowing_binds_innermost() {
        let mut s = VarSupply::new();
        let c = desugar_clause_vars(&parse_clause("p(X) :- some X : q(X).").unwrap(), &mut s);
        let Clause::Forall { var: outer, inner, .. } = &c else { panic!() };
        let Clause::Rule { body: Goal::Exists { var: inner_var, body, .. }, head } = &**inner else { panic!() };
        assert_ne!(outer.id, inner_var.id);
        assert_eq!(head.args[0], Term::Var(outer.clone()));
        assert_eq!(**body, Goal::atom("q", vec![inner_var.clone().into()]));
    }

    #[test]
    fn idempotent_on_closed_input() {
        let mut s = VarSupply::new();
        let c = desugar_clause_vars(&parse_clause("p(X, _) :- q(X, Y).").unwrap(), &mut s);
        assert_eq!(desugar_clause_vars(&c, &mut s), c);
        let g = desugar_query_vars(&parse_query("p(X, _), some Z : q(Z)").unwrap(), QueryPolicy::default(), &mut s);
        assert_eq!(desugar_query_vars(&g, QueryPolicy::default(), &mut s), g);
    }

    #[test]
    fn quantifiers_added_equals_free_names_plus_anonymous() {
        let mut s = VarSupply::new();
        let raw = parse_clause("all Z : p(X, _, Y, X, _, Z).").unwrap();
        let c = desugar_clause_vars(&raw, &mut s);
        // X, Y, two `_`, plus the explicit Z.
        assert_eq!(count_clause_quantifiers(&c), 2 + 2 + 1);
    }
}
