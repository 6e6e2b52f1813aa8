//! Interpreter for Horn-clause programs with noisy quantifiers.
//!
//! Besides the usual silent quantifiers, goals may use `some* X : G` and
//! clauses `all* X : D`; only the instantiations chosen for these noisy
//! quantifiers are reported in the answer substitution. Modules may declare
//! don't-know constants (`unknown X.` or `*`), which loading replaces by fresh
//! opaque constants.
//!
//! ```
//! use prologtheta::{engine::SolveConfig, Session};
//!
//! let mut session = Session::new();
//! session.load_str("phone(tom, cs, 4450).", "phones").unwrap();
//! let report = session.run("some X : some* Y : phone(tom, X, Y)", &SolveConfig::default()).unwrap();
//! let answer = &report.solutions[0].answer;
//! assert_eq!(answer.len(), 1);
//! assert_eq!(answer[0].term.to_string(), "4450");
//! ```

pub mod ast;
pub mod check;
pub mod cli;
pub mod desugar;
pub mod engine;
pub mod fuzz;
pub mod loader;
pub mod oracle;
pub mod parser;
pub mod session;
pub mod subst;
pub mod term;
pub mod wellformed;

pub use ast::{Atom, Clause, FreeVarDefault, Goal, QueryPolicy};
pub use engine::{solve, Outcome, Report, Solution, SolveConfig, Solver, Status};
pub use loader::{LoadError, Loader, Program};
pub use session::Session;
pub use subst::{apply, compose, unify, Substitution};
pub use term::{Term, Unknown, Var, VarSupply};
