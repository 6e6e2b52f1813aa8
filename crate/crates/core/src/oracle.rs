//! Brute-force reference prover.
//!
//! Every quantifier, in the goal and in program clauses, is instantiated with
//! every term of a finite Herbrand universe, and derivability of the resulting
//! ground formulas is decided by exhaustive rule application under a bound on
//! the height of the proof tree. Heights are counted the same way as the
//! engine's depth bound: one level per `pv`/`bc` judgment, including the
//! clause-choice step when the program has more than one clause.
//!
//! Nothing here uses unification or substitutions; ground instances are built
//! by plain variable replacement and compared structurally.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use thiserror::Error;

use crate::ast::{Atom, Clause, Goal};
use crate::loader::Program;
use crate::term::{Name, Term, Var};

/// Noisy instantiations of one derivation, in proof-step order.
pub type AnswerList = Vec<(Var, Term)>;
pub type AnswerSet = BTreeSet<AnswerList>;

pub const DEFAULT_DEPTH: u32 = 32;
const MAX_UNIVERSE: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    pub terms: BTreeSet<Term>,
    pub depth_bound: u32,
    /// Construction stopped early because the universe grew too large.
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("oracle overflow: combinatorial limit of {limit} exceeded")]
pub struct OracleOverflow {
    pub limit: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Bound on proof-tree height.
    pub depth: u32,
    /// Bound on enumeration work before giving up with [`OracleOverflow`].
    pub max_work: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { depth: DEFAULT_DEPTH, max_work: 20_000_000 }
    }
}

fn symbols_of_term(t: &Term, consts: &mut BTreeSet<Term>, functors: &mut BTreeSet<(Name, usize)>) {
    match t {
        Term::Var(_) => {}
        Term::Const(_) | Term::Unknown(_) => {
            consts.insert(t.clone());
        }
        Term::Compound(f, args) => {
            functors.insert((f.clone(), args.len()));
            args.iter().for_each(|a| symbols_of_term(a, consts, functors));
        }
    }
}

fn symbols_of_goal(g: &Goal, consts: &mut BTreeSet<Term>, functors: &mut BTreeSet<(Name, usize)>) {
    g.for_each_atom(&mut |a| a.args.iter().for_each(|t| symbols_of_term(t, consts, functors)));
}

fn build(consts: BTreeSet<Term>, functors: &BTreeSet<(Name, usize)>, depth_bound: u32) -> Universe {
    let mut terms = consts;
    let mut truncated = false;
    if !terms.is_empty() {
        for _ in 0..depth_bound {
            let base: Vec<Term> = terms.iter().cloned().collect();
            let mut added = Vec::new();
            'grow: for (f, n) in functors {
                for args in tuples(&base, *n) {
                    let t = Term::Compound(f.clone(), args);
                    if !terms.contains(&t) {
                        added.push(t);
                    }
                    if terms.len() + added.len() > MAX_UNIVERSE {
                        truncated = true;
                        break 'grow;
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            terms.extend(added);
            if truncated {
                break;
            }
        }
    }
    Universe { terms, depth_bound, truncated }
}

fn tuples(base: &[Term], n: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                base.iter().map(move |t| {
                    let mut next = prefix.clone();
                    next.push(t.clone());
                    next
                })
            })
            .collect();
        if out.len() > MAX_UNIVERSE {
            out.truncate(MAX_UNIVERSE);
        }
    }
    out
}

/// Ground terms built from the program's constants, unknowns and function
/// symbols, nested at most `depth_bound` deep.
pub fn herbrand_universe(program: &Program, depth_bound: u32) -> Universe {
    let mut consts = BTreeSet::new();
    let mut functors = BTreeSet::new();
    for c in &program.clauses {
        c.for_each_part(&mut |head, body| {
            head.args.iter().for_each(|t| symbols_of_term(t, &mut consts, &mut functors));
            if let Some(b) = body {
                symbols_of_goal(b, &mut consts, &mut functors);
            }
        });
    }
    build(consts, &functors, depth_bound)
}

/// The program's universe extended with the symbols of `goal`.
pub fn herbrand_universe_for(program: &Program, goal: &Goal, depth_bound: u32) -> Universe {
    let base = herbrand_universe(program, depth_bound);
    let mut consts: BTreeSet<Term> = base.terms.iter().filter(|t| !matches!(t, Term::Compound(..))).cloned().collect();
    let mut functors = BTreeSet::new();
    for c in &program.clauses {
        c.for_each_part(&mut |head, body| {
            head.args.iter().for_each(|t| symbols_of_term(t, &mut BTreeSet::new(), &mut functors));
            if let Some(b) = body {
                symbols_of_goal(b, &mut BTreeSet::new(), &mut functors);
            }
        });
    }
    symbols_of_goal(goal, &mut consts, &mut functors);
    build(consts, &functors, depth_bound)
}

/// All answer lists of derivations of `goal` with instantiations drawn from
/// `universe`, under the default height bound.
pub fn oracle_solve(program: &Program, goal: &Goal, universe: &Universe) -> Result<AnswerSet, OracleOverflow> {
    oracle_solve_with(program, goal, universe, OracleConfig::default())
}

pub fn oracle_solve_with(
    program: &Program,
    goal: &Goal,
    universe: &Universe,
    config: OracleConfig,
) -> Result<AnswerSet, OracleOverflow> {
    let mut o = Oracle {
        program,
        universe: universe.terms.iter().cloned().collect(),
        work: 0,
        max_work: config.max_work,
        memo: HashMap::new(),
    };
    let lists = o.goal(goal, config.depth)?;
    Ok((*lists).clone())
}

type Lists = Rc<AnswerSet>;

struct Oracle<'p> {
    program: &'p Program,
    universe: Vec<Term>,
    work: u64,
    max_work: u64,
    memo: HashMap<(Atom, u32), Lists>,
}

fn empty() -> Lists {
    Rc::new(BTreeSet::new())
}

fn unit() -> Lists {
    Rc::new(BTreeSet::from([Vec::new()]))
}

fn ground_replace(t: &Term, id: u64, by: &Term) -> Term {
    match t {
        Term::Var(v) if v.id == id => by.clone(),
        Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| ground_replace(a, id, by)).collect()),
        _ => t.clone(),
    }
}

fn replace_atom(a: &Atom, id: u64, by: &Term) -> Atom {
    Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| ground_replace(t, id, by)).collect() }
}

fn replace_goal(g: &Goal, id: u64, by: &Term) -> Goal {
    match g {
        Goal::Atom(a) => Goal::Atom(replace_atom(a, id, by)),
        Goal::Conj(l, r) => Goal::Conj(Box::new(replace_goal(l, id, by)), Box::new(replace_goal(r, id, by))),
        Goal::Exists { var, body, noisy } => Goal::Exists {
            var: var.clone(),
            body: Box::new(if var.id == id { (**body).clone() } else { replace_goal(body, id, by) }),
            noisy: *noisy,
        },
    }
}

fn replace_clause(c: &Clause, id: u64, by: &Term) -> Clause {
    match c {
        Clause::Fact(h) => Clause::Fact(replace_atom(h, id, by)),
        Clause::Rule { body, head } => {
            Clause::Rule { body: replace_goal(body, id, by), head: replace_atom(head, id, by) }
        }
        Clause::Forall { var, inner, noisy } => Clause::Forall {
            var: var.clone(),
            inner: Box::new(if var.id == id { (**inner).clone() } else { replace_clause(inner, id, by) }),
            noisy: *noisy,
        },
        Clause::Conj(l, r) => Clause::Conj(Box::new(replace_clause(l, id, by)), Box::new(replace_clause(r, id, by))),
    }
}

/// Whether some instance of a head could equal the ground atom `a`: every
/// ground argument position must already agree.
fn may_match(c: &Clause, a: &Atom) -> bool {
    match c {
        Clause::Fact(h) | Clause::Rule { head: h, .. } => {
            h.pred == a.pred
                && h.args.len() == a.args.len()
                && h.args.iter().zip(&a.args).all(|(x, y)| !x.is_ground() || x == y)
        }
        Clause::Forall { inner, .. } => may_match(inner, a),
        Clause::Conj(l, r) => may_match(l, a) || may_match(r, a),
    }
}

fn with_binding(lists: &AnswerSet, var: &Var, t: &Term) -> impl Iterator<Item = AnswerList> {
    let entry = (var.clone(), t.clone());
    lists.clone().into_iter().map(move |mut l| {
        l.push(entry.clone());
        l
    })
}

impl Oracle<'_> {
    fn tick(&mut self, n: u64) -> Result<(), OracleOverflow> {
        self.work += n;
        if self.work > self.max_work {
            Err(OracleOverflow { limit: self.max_work })
        } else {
            Ok(())
        }
    }

    /// `pv(D, A)` at remaining height `h`.
    fn atom(&mut self, a: &Atom, h: u32) -> Result<Lists, OracleOverflow> {
        if h == 0 {
            return Ok(empty());
        }
        let key = (a.clone(), h);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        self.tick(1)?;
        let program = self.program;
        let result = match program.clauses.as_slice() {
            [] => empty(),
            [only] => self.clause(only, a, h - 1)?,
            many if h >= 2 => {
                let mut acc = BTreeSet::new();
                for c in many {
                    acc.extend(self.clause(c, a, h - 2)?.iter().cloned());
                }
                Rc::new(acc)
            }
            _ => empty(),
        };
        self.memo.insert(key, result.clone());
        Ok(result)
    }

    /// `bc(c, D, A)` at remaining height `h`.
    fn clause(&mut self, c: &Clause, a: &Atom, h: u32) -> Result<Lists, OracleOverflow> {
        if h == 0 || !may_match(c, a) {
            return Ok(empty());
        }
        self.tick(1)?;
        match c {
            Clause::Fact(head) => Ok(if head == a { unit() } else { empty() }),
            Clause::Rule { body, head } => {
                if head == a {
                    self.goal(body, h - 1)
                } else {
                    Ok(empty())
                }
            }
            Clause::Forall { var, inner, noisy } => {
                let mut acc = BTreeSet::new();
                for t in self.universe.clone() {
                    let instance = replace_clause(inner, var.id, &t);
                    let lists = self.clause(&instance, a, h - 1)?;
                    self.tick(lists.len() as u64)?;
                    if *noisy {
                        acc.extend(with_binding(&lists, var, &t));
                    } else {
                        acc.extend(lists.iter().cloned());
                    }
                }
                Ok(Rc::new(acc))
            }
            Clause::Conj(l, r) => {
                let mut acc: AnswerSet = (*self.clause(l, a, h - 1)?).clone();
                acc.extend(self.clause(r, a, h - 1)?.iter().cloned());
                Ok(Rc::new(acc))
            }
        }
    }

    /// `pv(D, G)` at remaining height `h`.
    fn goal(&mut self, g: &Goal, h: u32) -> Result<Lists, OracleOverflow> {
        if h == 0 {
            return Ok(empty());
        }
        match g {
            Goal::Atom(a) => self.atom(a, h),
            Goal::Conj(l, r) => {
                let left = self.goal(l, h - 1)?;
                if left.is_empty() {
                    return Ok(empty());
                }
                let right = self.goal(r, h - 1)?;
                self.tick((left.len() * right.len()) as u64)?;
                let mut acc = BTreeSet::new();
                for x in left.iter() {
                    for y in right.iter() {
                        let mut l = x.clone();
                        l.extend(y.iter().cloned());
                        acc.insert(l);
                    }
                }
                Ok(Rc::new(acc))
            }
            Goal::Exists { var, body, noisy } => {
                let mut acc = BTreeSet::new();
                for t in self.universe.clone() {
                    let instance = replace_goal(body, var.id, &t);
                    let lists = self.goal(&instance, h - 1)?;
                    self.tick(lists.len() as u64 + 1)?;
                    if *noisy {
                        acc.extend(with_binding(&lists, var, &t));
                    } else {
                        acc.extend(lists.iter().cloned());
                    }
                }
                Ok(Rc::new(acc))
            }
        }
    }
}

/// Renders an answer set as `{[Y = 4450], ...}`, for reports.
pub fn format_answer_set(set: &AnswerSet) -> String {
    let lists: Vec<String> = set
        .iter()
        .map(|l| {
            let parts: Vec<String> = l.iter().map(|(v, t)| format!("{v} = {t}")).collect();
            format!("[{}]", parts.join(", "))
        })
        .collect();
    format!("{{{}}}", lists.join(", "))
}

/// Groups an answer set by variable name, for quick inspection in tests.
pub fn witnesses(set: &AnswerSet) -> BTreeMap<String, BTreeSet<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for l in set {
        for (v, t) in l {
            out.entry(v.name.to_string()).or_default().insert(t.to_string());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::QueryPolicy;
    use crate::loader::Loader;

    fn setup(program: &str, query: &str) -> (Program, Goal) {
        let mut l = Loader::new();
        let p = l.load_str(program, "t").unwrap();
        let g = l.query(query, QueryPolicy::default(), &p).unwrap();
        (p, g)
    }

    fn names(u: &Universe) -> Vec<String> {
        u.terms.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn universe_of_phone_program() {
        let (p, _) = setup("phone(tom, cs, 4450).", "p");
        let mut got = names(&herbrand_universe(&p, 0));
        got.sort();
        assert_eq!(got, ["4450", "cs", "tom"]);
    }

    #[test]
    fn universe_of_emp_program() {
        let (p, _) = setup(
            "unknown X, Y.\nphone(tom, 434433).\nphone(pete, 200312).\nphone(sue, X).\nphone(john, X).\nphone(tim, Y).",
            "p",
        );
        let mut got = names(&herbrand_universe(&p, 0));
        got.sort();
        assert_eq!(got, ["200312", "434433", "?k1", "?k2", "john", "pete", "sue", "tim", "tom"]);
    }

    #[test]
    fn universe_without_constants_is_empty() {
        let (p, _) = setup("all X : p(X).", "p(Y)");
        assert!(herbrand_universe(&p, 2).terms.is_empty());
    }

    #[test]
    fn universe_with_function_symbols() {
        let (p, _) = setup("n(z).\nall X : n(s(X)) :- n(X).", "n(X)");
        let u = herbrand_universe(&p, 2);
        assert_eq!(names(&u), ["z", "s(z)", "s(s(z))"]);
    }

    #[test]
    fn phone_query() {
        let (p, g) = setup("phone(tom, cs, 4450).", "some X : some* Y : phone(tom, X, Y)");
        let u = herbrand_universe_for(&p, &g, 0);
        let set = oracle_solve(&p, &g, &u).unwrap();
        assert_eq!(format_answer_set(&set), "{[Y = 4450]}");
    }

    #[test]
    fn distinct_unknowns_share_no_witness() {
        let text =
            "unknown X, Y.\nphone(tom, 434433).\nphone(pete, 200312).\nphone(sue, X).\nphone(john, X).\nphone(tim, Y).";
        let (p, g) = setup(text, "some* N : (phone(sue, N), phone(tim, N))");
        let u = herbrand_universe_for(&p, &g, 0);
        assert!(oracle_solve(&p, &g, &u).unwrap().is_empty());
        let (p, g) = setup(text, "some* N : (phone(sue, N), phone(john, N))");
        let u = herbrand_universe_for(&p, &g, 0);
        assert_eq!(format_answer_set(&oracle_solve(&p, &g, &u).unwrap()), "{[N = ?k1]}");
    }

    #[test]
    fn unsatisfiable_atom() {
        let (p, g) = setup("p(a).", "p(b)");
        let u = herbrand_universe_for(&p, &g, 0);
        assert!(oracle_solve(&p, &g, &u).unwrap().is_empty());
    }

    #[test]
    fn no_ground_witness_in_empty_universe() {
        let (p, g) = setup("all X : p(X).", "some* Y : p(Y)");
        let u = herbrand_universe_for(&p, &g, 0);
        assert!(oracle_solve(&p, &g, &u).unwrap().is_empty());
    }

    #[test]
    fn noisy_universal_recorded() {
        let (p, g) = setup("all* X : p(X) :- q(X).\nq(a).", "p(a)");
        let u = herbrand_universe_for(&p, &g, 0);
        assert_eq!(format_answer_set(&oracle_solve(&p, &g, &u).unwrap()), "{[X = a]}");
    }

    #[test]
    fn larger_bounds_never_lose_answers() {
        let (p, g) = setup("all* X : p(X) :- p(X).\np(a).\np(b).", "some* Y : p(Y)");
        let u = herbrand_universe_for(&p, &g, 0);
        let mut prev = AnswerSet::new();
        for depth in 1..12 {
            let cfg = OracleConfig { depth, ..OracleConfig::default() };
            let now = oracle_solve_with(&p, &g, &u, cfg).unwrap();
            assert!(prev.is_subset(&now), "depth {depth}");
            prev = now;
        }
        assert!(prev.len() > 2);
    }

    #[test]
    fn overflow_is_reported() {
        let (p, g) = setup(
            "d(a).\nd(b).\nd(c).\nd(e).\nall* X : all* Y : all* Z : t(X, Y, Z) :- d(X), d(Y), d(Z).",
            "t(A, B, C), t(D, E, F)",
        );
        let u = herbrand_universe_for(&p, &g, 0);
        let cfg = OracleConfig { depth: 32, max_work: 1_000 };
        assert!(oracle_solve_with(&p, &g, &u, cfg).is_err());
    }
}
