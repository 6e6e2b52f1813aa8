use std::path::Path;
use std::sync::Arc;

use crate::ast::{Goal, QueryPolicy};
use crate::engine::{Report, SolveConfig, Solver};
use crate::loader::{LoadError, Loader, Program};

/// Loaded modules plus the fresh-name supplies they were loaded with.
#[derive(Debug, Clone)]
pub struct Session {
    loader: Loader,
    modules: Vec<Program>,
    program: Arc<Program>,
    pub policy: QueryPolicy,
}

impl Default for Session {
    fn default() -> Self {
        Session {
            loader: Loader::new(),
            modules: Vec::new(),
            program: Arc::new(Program::empty()),
            policy: QueryPolicy::default(),
        }
    }
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn modules(&self) -> &[Program] {
        &self.modules
    }

    /// All loaded modules' clauses, in load order.
    pub fn program(&self) -> &Arc<Program> {
        &self.program
    }

    fn add(&mut self, p: Program) -> Result<&Program, LoadError> {
        let mut modules = self.modules.clone();
        modules.push(p);
        let combined = Program::combine(&modules);
        // Arities must agree across modules too.
        let mut table = crate::wellformed::ArityTable::new();
        let mut diags = Vec::new();
        for c in &combined.clauses {
            if let Err(e) = crate::wellformed::check_clause(c, &mut table, None) {
                diags.extend(e);
            }
        }
        if !diags.is_empty() {
            return Err(LoadError::Invalid(diags));
        }
        self.modules = modules;
        self.program = Arc::new(combined);
        Ok(self.modules.last().expect("just pushed"))
    }

    pub fn load_str(&mut self, text: &str, default_name: &str) -> Result<&Program, LoadError> {
        let p = self.loader.load_str(text, default_name)?;
        self.add(p)
    }

    pub fn load_path(&mut self, path: &Path) -> Result<&Program, LoadError> {
        let p = self.loader.load_path(path)?;
        self.add(p)
    }

    pub fn query(&mut self, text: &str) -> Result<Goal, LoadError> {
        let program = self.program.clone();
        self.loader.query(text, self.policy, &program)
    }

    pub fn solver(&mut self, text: &str, config: &SolveConfig) -> Result<Solver, LoadError> {
        let goal = self.query(text)?;
        Ok(Solver::new(self.program.clone(), goal, config.clone()))
    }

    /// Parses `text` and collects solutions per `config`.
    pub fn run(&mut self, text: &str, config: &SolveConfig) -> Result<Report, LoadError> {
        Ok(self.solver(text, config)?.run())
    }
}
