//! Concrete syntax for modules, clauses and queries.
//!
//! ```text
//! module  ::= ("module" IDENT ".")? ("unknown" VAR ("," VAR)* ".")* clause*
//! clause  ::= prefix* atom (":-" goal)? "."
//! prefix  ::= ("all" | "all*") VAR ("," VAR)* ":"
//! goal    ::= unit ("," goal)?
//! unit    ::= atom | "(" goal ")" | ("some" | "some*") VAR ":" goal
//! atom    ::= IDENT ("(" term ("," term)* ")")?
//! term    ::= VAR | INT | IDENT ("(" term ("," term)* ")")? | "*"
//! ```
//!
//! `*` is accepted only inside the arguments of a fact. Variables come out raw
//! (id 0); see [`crate::desugar`] for closing them.

mod lexer;

use thiserror::Error;

use crate::ast::{Atom, Clause, Goal};
use crate::term::{Name, Term, Var, STAR};

use lexer::{tokenize, Token};
pub use lexer::{Pos, Tok};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError { pos, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceClause {
    pub clause: Clause,
    pub pos: Pos,
}

/// A parsed but not yet loaded module.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModule {
    pub name: Name,
    /// Whether the text carried an explicit `module <name>.` header.
    pub has_header: bool,
    pub unknown_decls: Vec<(Name, Pos)>,
    pub clauses: Vec<SourceClause>,
}

pub const DEFAULT_MODULE_NAME: &str = "user";

/// Parses a module. Without a header the module is called
/// [`DEFAULT_MODULE_NAME`].
pub fn parse_module(text: &str) -> Result<SourceModule, Vec<ParseError>> {
    parse_module_named(text, DEFAULT_MODULE_NAME)
}

/// Like [`parse_module`], naming a headerless module `default_name`.
pub fn parse_module_named(text: &str, default_name: &str) -> Result<SourceModule, Vec<ParseError>> {
    let mut p = Parser::new(text);
    let mut errors = Vec::new();
    let mut module =
        SourceModule { name: default_name.into(), has_header: false, unknown_decls: Vec::new(), clauses: Vec::new() };

    while !p.at(&Tok::Eof) {
        let start = p.pos();
        let start_idx = p.at;
        let result = if p.at_word("module") && matches!(p.peek_at(1), Tok::Ident(_)) {
            p.module_header(&mut module)
        } else if p.at_word("unknown") && matches!(p.peek_at(1), Tok::Var(_)) {
            p.unknown_decl(&mut module)
        } else {
            p.clause().map(|clause| {
                module.clauses.push(SourceClause { clause, pos: start });
            })
        };
        if let Err(e) = result {
            errors.push(e);
            let finished = p.at > start_idx && p.toks[p.at - 1].tok == Tok::Dot;
            if !finished {
                p.recover();
            }
        }
    }

    if errors.is_empty() {
        Ok(module)
    } else {
        Err(errors)
    }
}

/// Parses a single clause, with or without the terminating `.`.
pub fn parse_clause(text: &str) -> Result<Clause, ParseError> {
    let mut p = Parser::new(text);
    let c = p.clause_body()?;
    p.eat(&Tok::Dot);
    p.expect_eof()?;
    Ok(c)
}

/// Parses a query, with or without a trailing `.`.
pub fn parse_query(text: &str) -> Result<Goal, ParseError> {
    let mut p = Parser::new(text);
    let g = p.goal()?;
    p.eat(&Tok::Dot);
    p.expect_eof()?;
    Ok(g)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text);
    let t = p.term(false)?;
    p.expect_eof()?;
    Ok(t)
}

/// Renders a term in source syntax; unknowns render as `?k<N>`.
pub fn format_term(t: &Term) -> String {
    t.to_string()
}

/// Renders a module so that [`parse_module`] reads it back.
pub fn format_module(m: &SourceModule) -> String {
    let mut out = String::new();
    if m.has_header {
        out.push_str(&format!("module {}.\n", m.name));
    }
    if !m.unknown_decls.is_empty() {
        let names: Vec<&str> = m.unknown_decls.iter().map(|(n, _)| &**n).collect();
        out.push_str(&format!("unknown {}.\n", names.join(", ")));
    }
    for c in &m.clauses {
        out.push_str(&format!("{}.\n", c.clause));
    }
    out
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser { toks: tokenize(text), at: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at < self.toks.len() - 1 {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Tok::Error(msg) => ParseError::new(self.pos(), msg.clone()),
            t => ParseError::new(self.pos(), format!("expected {wanted}, found {t}")),
        }
    }

    fn expect(&mut self, t: &Tok, wanted: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if self.at(&Tok::Eof) {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    /// Skips past the next `.` so parsing resumes at the following clause.
    fn recover(&mut self) {
        loop {
            match self.advance() {
                Tok::Dot | Tok::Eof => return,
                _ => {}
            }
        }
    }

    fn module_header(&mut self, m: &mut SourceModule) -> Result<(), ParseError> {
        let pos = self.pos();
        self.advance();
        let Tok::Ident(name) = self.advance() else { unreachable!("checked by caller") };
        self.expect(&Tok::Dot, "`.` after module name")?;
        if m.has_header {
            return Err(ParseError::new(pos, "duplicate module header"));
        }
        if !m.clauses.is_empty() || !m.unknown_decls.is_empty() {
            return Err(ParseError::new(pos, "module header must come first"));
        }
        m.name = name.into();
        m.has_header = true;
        Ok(())
    }

    fn unknown_decl(&mut self, m: &mut SourceModule) -> Result<(), ParseError> {
        let pos = self.pos();
        self.advance();
        let names = self.var_list()?;
        self.expect(&Tok::Dot, "`.` after unknown declaration")?;
        if !m.clauses.is_empty() {
            return Err(ParseError::new(pos, "unknown declarations must precede clauses"));
        }
        for (name, p) in names {
            if m.unknown_decls.iter().any(|(n, _)| *n == name) {
                return Err(ParseError::new(p, format!("unknown `{name}` declared twice")));
            }
            m.unknown_decls.push((name, p));
        }
        Ok(())
    }

    fn var_list(&mut self) -> Result<Vec<(Name, Pos)>, ParseError> {
        let mut out = Vec::new();
        loop {
            let pos = self.pos();
            match self.peek().clone() {
                Tok::Var(v) if v == "_" => {
                    return Err(ParseError::new(pos, "`_` cannot be quantified"));
                }
                Tok::Var(v) => {
                    self.advance();
                    out.push((v.into(), pos));
                }
                _ => return Err(self.unexpected("a variable")),
            }
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    /// `Some(noisy)` when the next tokens open a `word` / `word*` quantifier.
    fn quantifier_ahead(&self, word: &str) -> Option<bool> {
        if !self.at_word(word) {
            return None;
        }
        match (self.peek_at(1), self.peek_at(2)) {
            (Tok::Var(_), _) => Some(false),
            (Tok::Star, Tok::Var(_)) => Some(true),
            _ => None,
        }
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        let c = self.clause_body()?;
        self.expect(&Tok::Dot, "`.` at end of clause")?;
        Ok(c)
    }

    fn clause_body(&mut self) -> Result<Clause, ParseError> {
        if self.quantifier_ahead("some").is_some() {
            return Err(ParseError::new(self.pos(), "existential not allowed in D-formula"));
        }
        if let Some(noisy) = self.quantifier_ahead("all") {
            self.advance();
            if noisy {
                self.advance();
            }
            let vars = self.var_list()?;
            self.expect(&Tok::Colon, "`:` after quantified variables")?;
            let inner = self.clause_body()?;
            return Ok(vars.into_iter().rev().fold(inner, |c, (v, _)| Clause::forall(Var::raw(v), c, noisy)));
        }
        let head = self.atom(true)?;
        if self.eat(&Tok::Neck) {
            if head.args.iter().any(contains_star) {
                return Err(ParseError::new(self.pos(), "`*` is only allowed in the arguments of a fact"));
            }
            let body = self.goal()?;
            Ok(Clause::rule(head, body))
        } else {
            Ok(Clause::fact(head))
        }
    }

    fn goal(&mut self) -> Result<Goal, ParseError> {
        let left = self.goal_unit()?;
        if self.eat(&Tok::Comma) {
            let right = self.goal()?;
            Ok(Goal::conj(left, right))
        } else {
            Ok(left)
        }
    }

    fn goal_unit(&mut self) -> Result<Goal, ParseError> {
        if self.quantifier_ahead("all").is_some() {
            return Err(ParseError::new(self.pos(), "universal not allowed in G-formula"));
        }
        if let Some(noisy) = self.quantifier_ahead("some") {
            self.advance();
            if noisy {
                self.advance();
            }
            let pos = self.pos();
            let Tok::Var(v) = self.advance() else { unreachable!("checked by quantifier_ahead") };
            if v == "_" {
                return Err(ParseError::new(pos, "`_` cannot be quantified"));
            }
            self.expect(&Tok::Colon, "`:` after quantified variable")?;
            let body = self.goal()?;
            return Ok(Goal::exists(Var::raw(v), body, noisy));
        }
        if self.eat(&Tok::LParen) {
            let g = self.goal()?;
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(g);
        }
        Ok(Goal::Atom(self.atom(false)?))
    }

    fn atom(&mut self, allow_star: bool) -> Result<Atom, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                let args = self.args(allow_star)?;
                Ok(Atom::new(name, args))
            }
            _ => Err(self.unexpected("an atom")),
        }
    }

    fn args(&mut self, allow_star: bool) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.term(allow_star)?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen, "`,` or `)`")?;
        }
        Ok(args)
    }

    fn term(&mut self, allow_star: bool) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Var(v) => {
                self.advance();
                Ok(Term::Var(Var::raw(v)))
            }
            Tok::Int(n) => {
                self.advance();
                Ok(Term::constant(n))
            }
            Tok::Ident(name) => {
                self.advance();
                let args = self.args(allow_star)?;
                Ok(Term::compound(name, args))
            }
            Tok::Star if allow_star => {
                self.advance();
                Ok(Term::Var(Var::raw(STAR)))
            }
            Tok::Star => Err(ParseError::new(pos, "`*` is only allowed in the arguments of a fact")),
            _ => Err(self.unexpected("a term")),
        }
    }
}

fn contains_star(t: &Term) -> bool {
    let mut found = false;
    t.for_each_var(&mut |v| found |= v.is_star());
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    const EMP: &str = "\
module emp.
unknown X, Y.
phone(tom, 434433).
phone(pete, 200312).
phone(sue, X).
phone(john, X).
phone(tim, Y).
";

    #[test]
    fn emp_module_with_unknown_prefix() {
        let m = parse_module(EMP).unwrap();
        assert_eq!(&*m.name, "emp");
        assert_eq!(m.clauses.len(), 5);
        let decls: Vec<&str> = m.unknown_decls.iter().map(|(n, _)| &**n).collect();
        assert_eq!(decls, ["X", "Y"]);
        assert_eq!(m.clauses[2].pos, Pos { line: 5, col: 1 });
    }

    #[test]
    fn header_only_module() {
        let m = parse_module("module empty.\n% nothing here\n").unwrap();
        assert!(m.clauses.is_empty());
        assert!(m.has_header);
    }

    #[test]
    fn star_placeholder_in_fact() {
        let m = parse_module("phone(sue, *).").unwrap();
        let Clause::Fact(a) = &m.clauses[0].clause else { panic!("expected a fact") };
        assert!(a.args[1].as_var().unwrap().is_star());
    }

    #[test]
    fn star_rejected_outside_facts() {
        assert!(parse_module("p(*) :- q.").is_err());
        assert!(parse_module("p :- q(*).").is_err());
        assert!(parse_query("q(*)").is_err());
    }

    #[test]
    fn query_with_quantifier_prefixes() {
        let g = parse_query("some X : some* Y : phone(tom, X, Y)").unwrap();
        let Goal::Exists { var, body, noisy } = &g else { panic!() };
        assert_eq!(&*var.name, "X");
        assert!(!noisy);
        assert!(matches!(&**body, Goal::Exists { noisy: true, .. }));
        assert_eq!(g.to_string(), "some X : some* Y : phone(tom, X, Y)");
    }

    #[test]
    fn query_with_anonymous_variable() {
        let g = parse_query("phone(tom, _, Y).").unwrap();
        let Goal::Atom(a) = &g else { panic!() };
        assert!(a.args[1].as_var().unwrap().is_anonymous());
        assert_eq!(&*a.args[2].as_var().unwrap().name, "Y");
    }

    #[test]
    fn quantifier_scopes_to_end_of_group() {
        let g = parse_query("a, some X : p(X), q(X)").unwrap();
        assert_eq!(g.to_string(), "a, some X : p(X), q(X)");
        let Goal::Conj(_, r) = &g else { panic!() };
        assert!(matches!(&**r, Goal::Exists { .. }));
        let g = parse_query("(some X : p(X)), q(X)").unwrap();
        assert!(matches!(&g, Goal::Conj(l, _) if matches!(**l, Goal::Exists { .. })));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_query("p(,)").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 3 });
        assert!(parse_query("p()").is_err());
        assert!(parse_query("p(a) q").is_err());
    }

    #[test]
    fn quantifier_placement_follows_the_grammar() {
        let e = parse_module("some X : p(X).").unwrap_err();
        assert!(e[0].message.contains("existential not allowed in D-formula"));
        let e = parse_query("all X : p(X)").unwrap_err();
        assert!(e.message.contains("universal not allowed in G-formula"));
    }

    #[test]
    fn noisy_universal_prefix() {
        let c = parse_clause("all* X : p(X) :- q(X).").unwrap();
        assert!(matches!(c, Clause::Forall { noisy: true, .. }));
        let c = parse_clause("all X, Y : p(X, Y)").unwrap();
        assert_eq!(c.to_string(), "all X : all Y : p(X, Y)");
    }

    #[test]
    fn one_error_per_malformed_clause() {
        let errs = parse_module("p(a).\nq(,).\nr(b.\ns(c).\n").unwrap_err();
        assert_eq!(errs.len(), 2);
        assert_eq!(errs[0].pos.line, 2);
        assert_eq!(errs[1].pos.line, 3);
    }

    #[test]
    fn duplicate_header() {
        let errs = parse_module("module a.\nmodule b.\n").unwrap_err();
        assert!(errs[0].message.contains("duplicate module header"));
    }

    #[test]
    fn reserved_token_rejected() {
        let errs = parse_module("phone(sue, ?k1).").unwrap_err();
        assert!(errs[0].message.contains("reserved token"));
    }

    #[test]
    fn keywords_usable_as_predicates() {
        let g = parse_query("some(a), all, module(X)").unwrap();
        assert_eq!(g.to_string(), "some(a), all, module(X)");
    }

    #[test]
    fn module_round_trip() {
        let m = parse_module(EMP).unwrap();
        let again = parse_module(&format_module(&m)).unwrap();
        let strip = |m: &SourceModule| m.clauses.iter().map(|c| c.clause.clone()).collect::<Vec<_>>();
        assert_eq!(strip(&m), strip(&again));
        assert_eq!(m.name, again.name);
    }
}
