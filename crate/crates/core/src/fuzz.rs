//! Seeded random programs and queries for differential testing.
//!
//! Generated programs are written out as source text so that parsing, loading
//! and Skolemization are exercised along with the prover.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzOptions {
    pub max_predicates: usize,
    pub max_constants: usize,
    pub max_clauses: usize,
    pub max_body: usize,
    /// Allow a rule body to mention its own or a later predicate.
    pub recursion: bool,
    /// Every head variable also occurs in the body; facts are ground.
    pub range_restricted: bool,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        FuzzOptions {
            max_predicates: 5,
            max_constants: 4,
            max_clauses: 3,
            max_body: 3,
            recursion: false,
            range_restricted: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzCase {
    pub seed: u64,
    pub program: String,
    pub query: String,
}

const CONSTANTS: [&str; 4] = ["a", "b", "c", "d"];
const CLAUSE_VARS: [&str; 3] = ["X", "Y", "Z"];
const QUERY_VARS: [&str; 2] = ["A", "B"];

/// `n` cases from one seed; the same seed always yields the same cases.
pub fn generate(seed: u64, n: usize, options: &FuzzOptions) -> Vec<FuzzCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let case_seed = rng.gen::<u64>();
            let mut r = ChaCha8Rng::seed_from_u64(case_seed);
            let (program, query) = Gen::new(&mut r, options).case();
            FuzzCase { seed: seed.wrapping_add(i as u64), program, query }
        })
        .collect()
}

struct Gen<'r> {
    rng: &'r mut ChaCha8Rng,
    opts: FuzzOptions,
    arities: Vec<usize>,
    constants: Vec<&'static str>,
    unknown: bool,
}

#[derive(Clone)]
enum Arg {
    Var(&'static str),
    Const(&'static str),
}

impl Arg {
    fn render(&self) -> &'static str {
        match self {
            Arg::Var(v) | Arg::Const(v) => v,
        }
    }
}

fn atom_text(pred: usize, args: &[Arg]) -> String {
    if args.is_empty() {
        format!("p{pred}")
    } else {
        let a: Vec<&str> = args.iter().map(Arg::render).collect();
        format!("p{pred}({})", a.join(", "))
    }
}

fn quantifier(kw: &str, noisy: bool, var: &str) -> String {
    format!("{kw}{} {var} : ", if noisy { "*" } else { "" })
}

impl<'r> Gen<'r> {
    fn new(rng: &'r mut ChaCha8Rng, opts: &FuzzOptions) -> Self {
        let n_preds = rng.gen_range(1..=opts.max_predicates.max(1));
        let arities = (0..n_preds).map(|_| [0, 1, 1, 2, 2][rng.gen_range(0..5)]).collect();
        let n_consts = rng.gen_range(1..=opts.max_constants.clamp(1, CONSTANTS.len()));
        let unknown = rng.gen_bool(0.25);
        Gen { rng, opts: *opts, arities, constants: CONSTANTS[..n_consts].to_vec(), unknown }
    }

    fn constant(&mut self) -> &'static str {
        if self.unknown && self.rng.gen_bool(0.1) {
            return "K";
        }
        self.constants.choose(self.rng).copied().expect("at least one constant")
    }

    fn fact_arg(&mut self) -> Arg {
        if self.rng.gen_bool(0.08) {
            Arg::Const("*")
        } else {
            Arg::Const(self.constant())
        }
    }

    fn case(mut self) -> (String, String) {
        let mut out = String::new();
        if self.unknown {
            out.push_str("unknown K.\n");
        }
        for p in 0..self.arities.len() {
            let n = self.rng.gen_range(1..=self.opts.max_clauses.max(1));
            for _ in 0..n {
                let clause = self.clause(p);
                out.push_str(&clause);
                out.push('\n');
            }
        }
        let query = self.query();
        (out, query)
    }

    fn body_preds(&self, p: usize) -> Vec<usize> {
        if self.opts.recursion {
            (0..self.arities.len()).collect()
        } else {
            (0..p).collect()
        }
    }

    fn clause(&mut self, p: usize) -> String {
        let candidates = self.body_preds(p);
        if candidates.is_empty() || self.rng.gen_bool(0.5) {
            return self.fact(p);
        }
        let len = self.rng.gen_range(1..=self.opts.max_body.max(1));
        let mut body = Vec::new();
        let mut body_vars: Vec<&'static str> = Vec::new();
        for _ in 0..len {
            let q = *candidates.choose(self.rng).expect("non-empty");
            let args: Vec<Arg> = (0..self.arities[q])
                .map(|_| {
                    if self.rng.gen_bool(0.8) {
                        Arg::Var(CLAUSE_VARS.choose(self.rng).copied().expect("vars"))
                    } else {
                        Arg::Const(self.constant())
                    }
                })
                .collect();
            for a in &args {
                if let Arg::Var(v) = a {
                    if !body_vars.contains(v) {
                        body_vars.push(v);
                    }
                }
            }
            body.push(atom_text(q, &args));
        }
        let head_args: Vec<Arg> = (0..self.arities[p])
            .map(|_| {
                let pool: Vec<&'static str> =
                    if self.opts.range_restricted { body_vars.clone() } else { CLAUSE_VARS.to_vec() };
                if !pool.is_empty() && self.rng.gen_bool(0.75) {
                    Arg::Var(pool.choose(self.rng).copied().expect("non-empty"))
                } else {
                    Arg::Const(self.constant())
                }
            })
            .collect();
        let head_vars: Vec<&'static str> = CLAUSE_VARS
            .iter()
            .copied()
            .filter(|v| head_args.iter().any(|a| matches!(a, Arg::Var(x) if x == v)))
            .collect();
        // Body-only variables may be bound inside the body instead.
        let mut body_text = body.join(", ");
        let mut outer = head_vars.clone();
        for v in body_vars.iter().copied().filter(|v| !head_vars.contains(v)) {
            if self.rng.gen_bool(0.35) {
                let noisy = self.rng.gen_bool(0.4);
                body_text = format!("{}{body_text}", quantifier("some", noisy, v));
            } else {
                outer.push(v);
            }
        }
        let mut prefix = String::new();
        for v in outer {
            if self.rng.gen_bool(0.3) {
                prefix.push_str(&quantifier("all", self.rng.gen_bool(0.4), v));
            }
            // Otherwise the variable is closed by an implicit silent `all`.
        }
        format!("{prefix}{} :- {body_text}.", atom_text(p, &head_args))
    }

    fn fact(&mut self, p: usize) -> String {
        if !self.opts.range_restricted && self.arities[p] > 0 && self.rng.gen_bool(0.3) {
            let v = CLAUSE_VARS[0];
            let mut args: Vec<Arg> = (0..self.arities[p]).map(|_| self.fact_arg()).collect();
            args[0] = Arg::Var(v);
            let noisy = self.rng.gen_bool(0.4);
            return format!("{}{}.", quantifier("all", noisy, v), atom_text(p, &args));
        }
        let args: Vec<Arg> = (0..self.arities[p]).map(|_| self.fact_arg()).collect();
        format!("{}.", atom_text(p, &args))
    }

    fn query(&mut self) -> String {
        let n = self.rng.gen_range(1..=2);
        let mut atoms = Vec::new();
        let mut vars: Vec<&'static str> = Vec::new();
        for _ in 0..n {
            let p = self.rng.gen_range(0..self.arities.len());
            let args: Vec<Arg> = (0..self.arities[p])
                .map(|_| {
                    if self.rng.gen_bool(0.6) {
                        Arg::Var(QUERY_VARS.choose(self.rng).copied().expect("vars"))
                    } else {
                        Arg::Const(self.constants.choose(self.rng).copied().expect("constants"))
                    }
                })
                .collect();
            for a in &args {
                if let Arg::Var(v) = a {
                    if !vars.contains(v) {
                        vars.push(v);
                    }
                }
            }
            atoms.push(atom_text(p, &args));
        }
        let mut text = atoms.join(", ");
        for v in vars.iter().rev() {
            match self.rng.gen_range(0..3) {
                0 => text = format!("{}{text}", quantifier("some", false, v)),
                1 => text = format!("{}{text}", quantifier("some", true, v)),
                _ => {} // free: noisy by default
            }
        }
        text
    }
}
