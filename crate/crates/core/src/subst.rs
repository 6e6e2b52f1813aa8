//! Substitutions and unification.
//!
//! Bindings are kept in triangular form (a variable may be bound to a term that
//! mentions other bound variables) together with a trail, so the proof engine
//! can undo bindings on backtracking in time proportional to what it undoes.
//! The public view (`apply`, `resolved`, equality) is always the idempotent,
//! fully resolved form.
//!
//! A composition need not be idempotent (`{Y ↦ g(Z)}` then `{Z ↦ Y}` maps `Y`
//! to `g(Y)`). Such results are stored in parallel form: every binding is
//! applied exactly once, simultaneously.

use std::collections::BTreeMap;

use crate::term::{Term, Var};

#[derive(Debug, Clone, Default)]
pub struct Substitution {
    bindings: BTreeMap<u64, (Var, Term)>,
    trail: Vec<u64>,
    parallel: bool,
}

/// Position in the trail; see [`Substitution::mark`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrailMark(usize);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// True for a non-idempotent composition, whose bindings apply once.
    pub fn is_parallel(&self) -> bool {
        self.parallel
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_bound(&self, id: u64) -> bool {
        self.bindings.contains_key(&id)
    }

    /// Records `var ↦ term` without any checks. The caller guarantees `var` is
    /// unbound.
    pub fn bind(&mut self, var: Var, term: Term) {
        debug_assert!(!self.bindings.contains_key(&var.id));
        self.trail.push(var.id);
        self.bindings.insert(var.id, (var, term));
    }

    pub fn mark(&self) -> TrailMark {
        TrailMark(self.trail.len())
    }

    /// Drops every binding made since `mark`.
    pub fn undo_to(&mut self, mark: TrailMark) {
        while self.trail.len() > mark.0 {
            let id = self.trail.pop().expect("trail length checked");
            self.bindings.remove(&id);
        }
    }

    /// Follows variable bindings at the top level only.
    pub fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.bindings.get(&v.id) {
                Some((_, next)) => t = next,
                None => break,
            }
            if self.parallel {
                break;
            }
        }
        t
    }

    /// Fully resolves `t`. Cyclic bindings (possible only with the occurs check
    /// disabled) are cut at the variable that closes the cycle.
    pub fn apply(&self, t: &Term) -> Term {
        if self.parallel {
            return t.map_vars(&mut |v| self.bindings.get(&v.id).map(|(_, b)| b.clone()));
        }
        let mut active = Vec::new();
        self.resolve(t, &mut active)
    }

    fn resolve(&self, t: &Term, active: &mut Vec<u64>) -> Term {
        match t {
            Term::Var(v) => {
                if active.contains(&v.id) {
                    return t.clone();
                }
                match self.bindings.get(&v.id) {
                    Some((_, bound)) => {
                        active.push(v.id);
                        let r = self.resolve(bound, active);
                        active.pop();
                        r
                    }
                    None => t.clone(),
                }
            }
            Term::Const(_) | Term::Unknown(_) => t.clone(),
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| self.resolve(a, active)).collect())
            }
        }
    }

    /// Resolved bindings, ordered by variable id.
    pub fn resolved(&self) -> Vec<(Var, Term)> {
        self.bindings.values().map(|(v, _)| (v.clone(), self.apply(&Term::Var(v.clone())))).collect()
    }

    /// Unifies `a` and `b` in place. On failure the substitution is left as it
    /// was.
    pub fn unify_in_place(&mut self, a: &Term, b: &Term, occurs_check: bool) -> bool {
        if self.parallel {
            // Unify the instances, then extend by composition.
            let mut theta = Substitution::new();
            if !theta.unify_in_place(&self.apply(a), &self.apply(b), occurs_check) {
                return false;
            }
            *self = compose(self, &theta);
            return true;
        }
        let mark = self.mark();
        if self.unify_rec(a, b, occurs_check) {
            true
        } else {
            self.undo_to(mark);
            false
        }
    }

    fn unify_rec(&mut self, a: &Term, b: &Term, occurs_check: bool) -> bool {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x.id == y.id => true,
            (Term::Var(x), Term::Var(y)) => {
                // Bind the younger variable to the older one so the result does
                // not depend on argument order.
                let (young, old) = if x.id > y.id { (x, y) } else { (y, x) };
                self.bind(young, Term::Var(old));
                true
            }
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if occurs_check && self.occurs_deep(x.id, &t) {
                    return false;
                }
                self.bind(x, t);
                true
            }
            (Term::Const(p), Term::Const(q)) => p == q,
            (Term::Unknown(p), Term::Unknown(q)) => p.id == q.id,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(&ys).all(|(x, y)| self.unify_rec(x, y, occurs_check))
            }
            _ => false,
        }
    }

    fn occurs_deep(&self, id: u64, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(v) => v.id == id,
            Term::Const(_) | Term::Unknown(_) => false,
            Term::Compound(_, args) => args.iter().any(|a| self.occurs_deep(id, a)),
        }
    }
}

impl PartialEq for Substitution {
    fn eq(&self, other: &Self) -> bool {
        self.resolved() == other.resolved()
    }
}

impl Eq for Substitution {}

/// Most general unifier of `s(t1)` and `s(t2)` extending `s`, with the occurs
/// check enabled.
pub fn unify(t1: &Term, t2: &Term, s: &Substitution) -> Option<Substitution> {
    unify_with(t1, t2, s, true)
}

pub fn unify_with(t1: &Term, t2: &Term, s: &Substitution, occurs_check: bool) -> Option<Substitution> {
    let mut out = s.clone();
    out.unify_in_place(t1, t2, occurs_check).then_some(out)
}

pub fn apply(s: &Substitution, t: &Term) -> Term {
    s.apply(t)
}

/// `compose(s1, s2)` behaves as `s1` followed by `s2`. The result is stored
/// resolved; it is idempotent whenever no variable of `s2`'s range lies in
/// either domain.
pub fn compose(s1: &Substitution, s2: &Substitution) -> Substitution {
    let mut out = Substitution::new();
    for (v, t) in s1.resolved() {
        let t = s2.apply(&t);
        if t != Term::Var(v.clone()) {
            out.bindings.insert(v.id, (v, t));
        }
    }
    for (v, t) in s2.resolved() {
        if !s1.is_bound(v.id) && t != Term::Var(v.clone()) {
            out.bindings.insert(v.id, (v, t));
        }
    }
    out.trail = out.bindings.keys().copied().collect();
    out.parallel = out.bindings.values().any(|(_, t)| {
        let mut hit = false;
        t.for_each_var(&mut |v| hit |= out.bindings.contains_key(&v.id));
        hit
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Unknown;

    fn v(name: &str, id: u64) -> Term {
        Term::Var(Var::new(name, id))
    }

    fn c(s: &str) -> Term {
        Term::constant(s)
    }

    fn f(name: &str, args: Vec<Term>) -> Term {
        Term::compound(name, args)
    }

    fn unknown(id: u32) -> Term {
        Term::Unknown(Unknown { id, origin: "emp".into() })
    }

    #[test]
    fn binds_variable_to_constant() {
        let s = unify(&v("X", 1), &c("tom"), &Substitution::new()).unwrap();
        assert_eq!(s.resolved(), vec![(Var::new("X", 1), c("tom"))]);
    }

    #[test]
    fn identical_constants_need_no_binding() {
        let s = unify(&c("tom"), &c("tom"), &Substitution::new()).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn occurs_check_rejects_cycles() {
        let x = v("X", 1);
        let fx = f("f", vec![x.clone()]);
        assert!(unify(&x, &fx, &Substitution::new()).is_none());
        let s = unify_with(&x, &fx, &Substitution::new(), false).unwrap();
        // Cyclic binding resolves without looping.
        assert_eq!(s.apply(&x), f("f", vec![x.clone()]));
    }

    #[test]
    fn distinct_unknowns_do_not_unify() {
        assert!(unify(&unknown(1), &unknown(2), &Substitution::new()).is_none());
        assert!(unify(&unknown(1), &unknown(1), &Substitution::new()).unwrap().is_empty());
        assert!(unify(&unknown(1), &c("k1"), &Substitution::new()).is_none());
        assert!(unify(&v("N", 3), &unknown(1), &Substitution::new()).is_some());
    }

    #[test]
    fn apply_replaces_bound_variables() {
        let s = unify(&v("X", 1), &c("tom"), &Substitution::new()).unwrap();
        let t = f("phone", vec![v("X", 1), v("Y", 2)]);
        assert_eq!(s.apply(&t), f("phone", vec![c("tom"), v("Y", 2)]));
        assert_eq!(Substitution::new().apply(&t), t);

        let s = unify(&v("X", 1), &c("4450"), &Substitution::new()).unwrap();
        let t = f("phone", vec![c("tom"), c("cs"), v("X", 1)]);
        assert_eq!(s.apply(&t), f("phone", vec![c("tom"), c("cs"), c("4450")]));
    }

    #[test]
    fn functor_and_arity_clashes_fail() {
        let s = Substitution::new();
        assert!(unify(&f("f", vec![c("a")]), &f("g", vec![c("a")]), &s).is_none());
        assert!(unify(&f("f", vec![c("a")]), &f("f", vec![c("a"), c("b")]), &s).is_none());
        assert!(unify(&c("a"), &f("a", vec![c("a")]), &s).is_none());
    }

    #[test]
    fn failed_unification_leaves_substitution_untouched() {
        let mut s = Substitution::new();
        let lhs = f("p", vec![v("X", 1), c("a")]);
        let rhs = f("p", vec![c("b"), c("c")]);
        assert!(!s.unify_in_place(&lhs, &rhs, true));
        assert!(s.is_empty());
    }

    #[test]
    fn chains_resolve_through_triangular_bindings() {
        let mut s = Substitution::new();
        assert!(s.unify_in_place(&v("X", 1), &v("Y", 2), true));
        assert!(s.unify_in_place(&v("Y", 2), &f("g", vec![v("Z", 3)]), true));
        assert!(s.unify_in_place(&v("Z", 3), &c("a"), true));
        assert_eq!(s.apply(&v("X", 1)), f("g", vec![c("a")]));
        let mark = s.mark();
        assert!(s.unify_in_place(&v("W", 4), &c("b"), true));
        s.undo_to(mark);
        assert!(!s.is_bound(4));
    }

    #[test]
    fn non_idempotent_composition_applies_once() {
        let mut s1 = Substitution::new();
        s1.bind(Var::new("Y", 2), Term::compound("g", vec![v("Z", 3)]));
        let mut s2 = Substitution::new();
        s2.bind(Var::new("Z", 3), v("Y", 2));
        let c = compose(&s1, &s2);
        assert!(c.is_parallel());
        let t = Term::compound("f", vec![v("Y", 2), v("Z", 3)]);
        assert_eq!(apply(&c, &t), apply(&s2, &apply(&s1, &t)));
        assert_eq!(apply(&c, &t).to_string(), "f(g(Y), Y)");
        let r = unify(&v("Y", 2), &Term::compound("g", vec![Term::constant("a")]), &c).unwrap();
        assert_eq!(apply(&r, &t).to_string(), "f(g(a), a)");
    }
}
