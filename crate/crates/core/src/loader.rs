//! Turning parsed modules into closed programs.
//!
//! Loading runs the module's initialization: every name declared with
//! `unknown X, Y.` is replaced by one fresh don't-know constant shared by all
//! clauses of the module, every `*` becomes a don't-know constant of its own,
//! and the remaining variables are closed by silent universals.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::ast::{Clause, Goal, QueryPolicy};
use crate::desugar::{desugar_clause_vars, desugar_query_vars};
use crate::parser::{parse_module_named, parse_query, SourceModule, DEFAULT_MODULE_NAME};
use crate::term::{Name, Term, Unknown, UnknownSupply, VarSupply};
use crate::wellformed::{check_clause, check_goal, ArityTable, WfError};

pub type Diagnostic = WfError;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}", render(.0))]
    Invalid(Vec<Diagnostic>),
}

fn render(diags: &[Diagnostic]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

impl LoadError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            LoadError::Io { .. } => vec![Diagnostic { message: self.to_string(), pos: None }],
            LoadError::Invalid(d) => d.clone(),
        }
    }
}

/// A closed, well-formed program: the conjunction of its clauses.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub name: Name,
    pub clauses: Vec<Clause>,
    /// Declared unknown name → its don't-know constant. `*` constants are not
    /// listed.
    pub unknown_table: BTreeMap<Name, Unknown>,
}

impl Program {
    pub fn empty() -> Self {
        Program { name: DEFAULT_MODULE_NAME.into(), clauses: Vec::new(), unknown_table: BTreeMap::new() }
    }

    /// Concatenates clause lists in order. With several modules, unknown names
    /// are qualified as `module.Name`.
    pub fn combine(programs: &[Program]) -> Program {
        match programs {
            [] => Program::empty(),
            [one] => one.clone(),
            many => {
                let name: Vec<&str> = many.iter().map(|p| &*p.name).collect();
                let mut unknown_table = BTreeMap::new();
                for p in many {
                    for (n, u) in &p.unknown_table {
                        unknown_table.insert(format!("{}.{n}", p.name).into(), u.clone());
                    }
                }
                Program {
                    name: name.join("+").into(),
                    clauses: many.iter().flat_map(|p| p.clauses.iter().cloned()).collect(),
                    unknown_table,
                }
            }
        }
    }

    pub fn max_var_id(&self) -> u64 {
        self.clauses.iter().map(Clause::max_var_id).max().unwrap_or(0)
    }

    pub fn arity_table(&self) -> ArityTable {
        let mut table = ArityTable::new();
        for c in &self.clauses {
            // Loaded programs are already consistent.
            let _ = check_clause(c, &mut table, None);
        }
        table
    }

    /// Checks that a closed query is well formed and agrees with the program's
    /// predicate arities.
    pub fn check_query(&self, goal: &Goal) -> Result<(), Vec<Diagnostic>> {
        check_goal(goal, &mut self.arity_table(), None)
    }
}

/// Loads modules and queries, owning the session's fresh-name supplies.
#[derive(Debug, Clone, Default)]
pub struct Loader {
    vars: VarSupply,
    unknowns: UnknownSupply,
}

impl Loader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vars(&mut self) -> &mut VarSupply {
        &mut self.vars
    }

    /// Loads module text. A module without a header is named `default_name`.
    pub fn load_str(&mut self, text: &str, default_name: &str) -> Result<Program, LoadError> {
        let module = parse_module_named(text, default_name).map_err(|errs| {
            LoadError::Invalid(errs.into_iter().map(|e| Diagnostic { message: e.message, pos: Some(e.pos) }).collect())
        })?;
        self.skolemize(&module)
    }

    /// Loads a module file; a headerless file is named after its stem.
    pub fn load_path(&mut self, path: &Path) -> Result<Program, LoadError> {
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_owned(), source })?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(DEFAULT_MODULE_NAME);
        self.load_str(&text, stem)
    }

    pub fn skolemize(&mut self, m: &SourceModule) -> Result<Program, LoadError> {
        skolemize(m, &mut self.vars, &mut self.unknowns)
    }

    /// Parses and closes a query, checking it against `program`.
    pub fn query(&mut self, text: &str, policy: QueryPolicy, program: &Program) -> Result<Goal, LoadError> {
        let raw = parse_query(text)
            .map_err(|e| LoadError::Invalid(vec![Diagnostic { message: e.message, pos: Some(e.pos) }]))?;
        let goal = desugar_query_vars(&raw, policy, &mut self.vars);
        program.check_query(&goal).map_err(LoadError::Invalid)?;
        Ok(goal)
    }
}

/// Replaces declared unknowns by shared don't-know constants and each `*` by a
/// fresh one, then closes and checks every clause.
pub fn skolemize(m: &SourceModule, vars: &mut VarSupply, unknowns: &mut UnknownSupply) -> Result<Program, LoadError> {
    let mut diags = Vec::new();
    let mut unknown_table = BTreeMap::new();
    for (name, _) in &m.unknown_decls {
        unknown_table.insert(name.clone(), unknowns.fresh(&m.name));
    }

    let mut clauses = Vec::with_capacity(m.clauses.len());
    let mut arities = ArityTable::new();
    for sc in &m.clauses {
        if let Some(name) = bound_unknown(&sc.clause, &unknown_table) {
            diags.push(Diagnostic {
                message: format!("ambiguous unknown scope: `{name}` is declared unknown and also quantified"),
                pos: Some(sc.pos),
            });
            continue;
        }
        let replaced = sc.clause.map_vars(&mut |v| {
            if v.is_star() {
                Some(Term::Unknown(unknowns.fresh(&m.name)))
            } else if v.is_raw() {
                unknown_table.get(&v.name).cloned().map(Term::Unknown)
            } else {
                None
            }
        });
        let closed = desugar_clause_vars(&replaced, vars);
        if let Err(errs) = check_clause(&closed, &mut arities, Some(sc.pos)) {
            diags.extend(errs);
        }
        clauses.push(closed);
    }

    if !diags.is_empty() {
        return Err(LoadError::Invalid(diags));
    }
    Ok(Program { name: m.name.clone(), clauses, unknown_table })
}

fn bound_unknown(c: &Clause, table: &BTreeMap<Name, Unknown>) -> Option<Name> {
    let mut hit = None;
    c.for_each_binder(&mut |v, _| {
        if hit.is_none() && table.contains_key(&v.name) {
            hit = Some(v.name.clone());
        }
    });
    hit
}

/// Convenience: loads a single module from text with a fresh [`Loader`].
pub fn load(text: &str) -> Result<Program, LoadError> {
    Loader::new().load_str(text, DEFAULT_MODULE_NAME)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Atom;

    const EMP: &str = "\
module emp.
unknown X, Y.
phone(tom, 434433).
phone(pete, 200312).
phone(sue, X).
phone(john, X).
phone(tim, Y).
";

    fn second_arg(c: &Clause) -> Term {
        let Clause::Fact(Atom { args, .. }) = c else { panic!("expected a ground fact, got {c}") };
        args[1].clone()
    }

    #[test]
    fn declared_unknowns_are_shared() {
        let p = load(EMP).unwrap();
        assert_eq!(p.clauses.len(), 5);
        assert_eq!(p.unknown_table.len(), 2);
        let sue = second_arg(&p.clauses[2]);
        let john = second_arg(&p.clauses[3]);
        let tim = second_arg(&p.clauses[4]);
        assert_eq!(sue, john);
        assert_ne!(sue, tim);
        assert_eq!(sue.to_string(), "?k1");
        assert_eq!(tim.to_string(), "?k2");
        assert_eq!(p.clauses[2].to_string(), "phone(sue, ?k1)");
    }

    #[test]
    fn stars_are_independent() {
        let p = load("phone(sue, *).\nphone(john, *).\n").unwrap();
        assert_ne!(second_arg(&p.clauses[0]), second_arg(&p.clauses[1]));
        assert!(p.unknown_table.is_empty());
    }

    #[test]
    fn no_unknowns_only_closes_variables() {
        let p = load("p(a).\nq(X) :- p(X).\n").unwrap();
        assert_eq!(p.clauses[0].to_string(), "p(a)");
        assert_eq!(p.clauses[1].to_string(), "all X : q(X) :- p(X)");
    }

    #[test]
    fn empty_module() {
        let p = load("module nothing.\n").unwrap();
        assert!(p.clauses.is_empty());
        assert_eq!(&*p.name, "nothing");
    }

    #[test]
    fn reserved_token() {
        let err = load("phone(sue, ?k1).").unwrap_err();
        assert!(err.to_string().contains("reserved token"));
    }

    #[test]
    fn unknown_name_quantified_in_clause() {
        let err = load("unknown X.\nall X : p(X).\n").unwrap_err();
        assert!(err.to_string().contains("ambiguous unknown scope"));
        let err = load("unknown X.\np(a) :- some X : q(X).\n").unwrap_err();
        assert!(err.to_string().contains("ambiguous unknown scope"));
    }

    #[test]
    fn modules_get_disjoint_unknowns() {
        let mut loader = Loader::new();
        let a = loader.load_str("unknown X.\np(X).", "a").unwrap();
        let b = loader.load_str("unknown X.\np(X).", "b").unwrap();
        assert_ne!(a.unknown_table["X"], b.unknown_table["X"]);
        let both = Program::combine(&[a, b]);
        assert_eq!(both.clauses.len(), 2);
        assert!(both.unknown_table.contains_key("a.X"));
    }

    #[test]
    fn arity_errors_are_aggregated_with_positions() {
        let err = load("p(a).\np(a, b).\nq(X).\nq(X, Y).\n").unwrap_err();
        let diags = err.diagnostics();
        assert_eq!(diags.len(), 2);
        assert_eq!(diags[0].pos.unwrap().line, 2);
        assert_eq!(diags[1].pos.unwrap().line, 4);
    }

    #[test]
    fn query_checked_against_program_arities() {
        let mut loader = Loader::new();
        let p = loader.load_str("p(a).", "m").unwrap();
        assert!(loader.query("p(X)", QueryPolicy::default(), &p).is_ok());
        assert!(loader.query("p(X, Y)", QueryPolicy::default(), &p).is_err());
        assert!(loader.query("missing(X)", QueryPolicy::default(), &p).is_ok());
    }

    #[test]
    fn loading_is_deterministic() {
        assert_eq!(load(EMP).unwrap(), load(EMP).unwrap());
    }
}
