//! First-order terms.
//!
//! Variables carry a display name and a numeric id. Terms straight out of the
//! parser have id `0` ("raw") and are identified by name only; desugaring
//! closes them under binders and assigns session-unique ids.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Interned-ish identifier. Cheap to clone and safe to share between threads.
pub type Name = Arc<str>;

/// Id of a variable that has not been assigned a binder yet.
pub const RAW_VAR_ID: u64 = 0;

/// Placeholder name used by the parser for `*` in fact arguments.
pub const STAR: &str = "*";

/// Placeholder name used by the parser for the anonymous variable `_`.
pub const ANON: &str = "_";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Name,
    pub id: u64,
}

impl Var {
    pub fn new(name: impl Into<Name>, id: u64) -> Self {
        Var { name: name.into(), id }
    }

    /// A variable as produced by the parser, before desugaring.
    pub fn raw(name: impl Into<Name>) -> Self {
        Var::new(name, RAW_VAR_ID)
    }

    pub fn is_raw(&self) -> bool {
        self.id == RAW_VAR_ID
    }

    pub fn is_anonymous(&self) -> bool {
        self.is_raw() && &*self.name == ANON
    }

    pub fn is_star(&self) -> bool {
        self.is_raw() && &*self.name == STAR
    }
}

/// A don't-know constant: ground, opaque, equal only to itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Unknown {
    pub id: u32,
    /// Module that introduced the constant.
    pub origin: Name,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    /// Symbolic or integer constant; integers are plain digit strings.
    Const(Name),
    Unknown(Unknown),
    /// Always has at least one argument; zero-ary symbols are `Const`.
    Compound(Name, Vec<Term>),
}

impl Term {
    pub fn var(v: Var) -> Self {
        Term::Var(v)
    }

    pub fn constant(name: impl Into<Name>) -> Self {
        Term::Const(name.into())
    }

    /// Builds `functor(args...)`, collapsing to a constant when `args` is empty.
    pub fn compound(functor: impl Into<Name>, args: Vec<Term>) -> Self {
        if args.is_empty() {
            Term::Const(functor.into())
        } else {
            Term::Compound(functor.into(), args)
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    /// True iff the term contains no variables. Unknowns are ground.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) | Term::Unknown(_) => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn occurs(&self, id: u64) -> bool {
        match self {
            Term::Var(v) => v.id == id,
            Term::Const(_) | Term::Unknown(_) => false,
            Term::Compound(_, args) => args.iter().any(|a| a.occurs(id)),
        }
    }

    /// Visits every variable occurrence, left to right.
    pub fn for_each_var<'a>(&'a self, f: &mut impl FnMut(&'a Var)) {
        match self {
            Term::Var(v) => f(v),
            Term::Const(_) | Term::Unknown(_) => {}
            Term::Compound(_, args) => args.iter().for_each(|a| a.for_each_var(f)),
        }
    }

    pub fn max_var_id(&self) -> u64 {
        let mut max = 0;
        self.for_each_var(&mut |v| max = max.max(v.id));
        max
    }

    pub fn collect_constants(&self, out: &mut BTreeSet<Term>) {
        match self {
            Term::Var(_) => {}
            Term::Const(_) | Term::Unknown(_) => {
                out.insert(self.clone());
            }
            Term::Compound(_, args) => args.iter().for_each(|a| a.collect_constants(out)),
        }
    }

    /// Replaces every occurrence of the variable `id` with `by`.
    pub fn replace_var(&self, id: u64, by: &Term) -> Term {
        self.map_vars(&mut |v| (v.id == id).then(|| by.clone()))
    }

    /// Rebuilds the term, replacing variables for which `f` returns `Some`.
    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Term::Const(_) | Term::Unknown(_) => self.clone(),
            Term::Compound(name, args) => Term::Compound(name.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Self {
        Term::Var(v)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?k{}", self.id)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => v.fmt(f),
            Term::Const(c) => f.write_str(c),
            Term::Unknown(u) => u.fmt(f),
            Term::Compound(name, args) => {
                write!(f, "{name}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
        }
    }
}

pub(crate) fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        item.fmt(f)?;
    }
    Ok(())
}

/// Source of fresh variable ids. Ids start at 1; `0` is reserved for raw
/// parser variables.
#[derive(Debug, Clone)]
pub struct VarSupply {
    next: u64,
}

impl Default for VarSupply {
    fn default() -> Self {
        VarSupply { next: 1 }
    }
}

impl VarSupply {
    pub fn new() -> Self {
        Self::default()
    }

    /// Continues numbering strictly above `id`.
    pub fn starting_after(id: u64) -> Self {
        VarSupply { next: id + 1 }
    }

    pub fn next_id(&mut self) -> u64 {
        let id = self.next;
        self.next += 1;
        id
    }

    pub fn fresh_var(&mut self, hint: &str) -> Term {
        Term::Var(self.fresh(hint))
    }

    pub fn fresh(&mut self, hint: &str) -> Var {
        Var::new(hint, self.next_id())
    }

    pub(crate) fn peek(&self) -> u64 {
        self.next
    }

    pub(crate) fn reset(&mut self, next: u64) {
        self.next = next;
    }
}

/// Source of fresh don't-know constants. Numbering starts at 1 and is shared by
/// every module loaded through the same supply, so unknowns of different
/// modules never coincide.
#[derive(Debug, Clone)]
pub struct UnknownSupply {
    next: u32,
}

impl Default for UnknownSupply {
    fn default() -> Self {
        UnknownSupply { next: 1 }
    }
}

impl UnknownSupply {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self, origin: &Name) -> Unknown {
        let id = self.next;
        self.next += 1;
        Unknown { id, origin: origin.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Term {
        Term::constant(s)
    }

    #[test]
    fn groundness() {
        let phone = Term::compound("phone", vec![c("tom"), c("cs"), c("4450")]);
        assert!(phone.is_ground());
        let open = Term::compound("phone", vec![c("sue"), Term::Var(Var::new("X", 3))]);
        assert!(!open.is_ground());
        let unknown = Term::Unknown(Unknown { id: 1, origin: "emp".into() });
        let skolem = Term::compound("phone", vec![c("sue"), unknown]);
        assert!(skolem.is_ground());
    }

    #[test]
    fn fresh_ids_are_distinct() {
        let mut supply = VarSupply::new();
        let a = supply.fresh_var("X");
        let b = supply.fresh_var("X");
        assert_ne!(a, b);
        assert_eq!(a.as_var().unwrap().name.as_ref(), "X");
    }

    #[test]
    fn zero_arity_compound_is_constant() {
        assert_eq!(Term::compound("p", vec![]), c("p"));
    }

    #[test]
    fn display() {
        let t = Term::compound("phone", vec![c("tom"), c("cs"), c("4450")]);
        assert_eq!(t.to_string(), "phone(tom, cs, 4450)");
        let u = Term::Unknown(Unknown { id: 1, origin: "emp".into() });
        assert_eq!(u.to_string(), "?k1");
    }
}
