//! Text and JSON rendering of solutions.

use std::io::{self, Write};

use serde::Serialize;

use crate::engine::{answer_labels, ProofStep, Solution, Status, StepKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Style {
    pub color: bool,
}

impl Style {
    fn bold(&self, s: &str) -> String {
        if self.color {
            format!("\x1b[1m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    fn dim(&self, s: &str) -> String {
        if self.color {
            format!("\x1b[2m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
}

#[derive(Serialize)]
struct JsonAnswer {
    var: String,
    term: String,
    ground: bool,
}

#[derive(Serialize)]
struct JsonTheta {
    var: String,
    term: String,
}

#[derive(Serialize)]
struct JsonStep {
    index: usize,
    kind: StepKind,
    clause: String,
    goal: String,
    theta: Option<JsonTheta>,
}

#[derive(Serialize)]
struct JsonDoc {
    answers: Vec<JsonAnswer>,
    trace: Vec<JsonStep>,
    status: &'static str,
}

fn json_step(s: &ProofStep) -> JsonStep {
    JsonStep {
        index: s.index,
        kind: s.kind,
        clause: s.focus.to_string(),
        goal: s.goal.to_string(),
        theta: s.theta.as_ref().map(|b| JsonTheta { var: b.var.name.to_string(), term: b.term.to_string() }),
    }
}

/// One JSON document for a solution.
pub fn solution_json(sol: &Solution) -> String {
    let doc = JsonDoc {
        answers: answer_labels(&sol.answer)
            .into_iter()
            .zip(&sol.answer)
            .map(|(var, b)| JsonAnswer { var, term: b.term.to_string(), ground: b.term.is_ground() })
            .collect(),
        trace: sol.trace.steps.iter().map(json_step).collect(),
        status: Status::Success.as_str(),
    };
    serde_json::to_string(&doc).expect("plain data serializes")
}

/// The document printed when a query has no solution.
pub fn failure_json(status: Status) -> String {
    let doc = JsonDoc { answers: Vec::new(), trace: Vec::new(), status: status.as_str() };
    serde_json::to_string(&doc).expect("plain data serializes")
}

pub fn write_solution(
    out: &mut dyn Write,
    sol: &Solution,
    format: Format,
    trace: bool,
    style: Style,
) -> io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", solution_json(sol)),
        Format::Text => {
            if sol.answer.is_empty() {
                writeln!(out, "yes.")?;
            }
            for (label, b) in answer_labels(&sol.answer).into_iter().zip(&sol.answer) {
                if b.term.is_ground() {
                    writeln!(out, "{} = {}", style.bold(&label), b.term)?;
                } else {
                    writeln!(out, "{} = {}  {}", style.bold(&label), b.term, style.dim("(non-ground)"))?;
                }
            }
            if trace && !sol.trace.steps.is_empty() {
                writeln!(out, "{}", style.dim("proof:"))?;
                for step in &sol.trace.steps {
                    writeln!(out, "  {step}")?;
                }
            }
            Ok(())
        }
    }
}

pub fn write_failure(out: &mut dyn Write, status: Status, format: Format) -> io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", failure_json(status)),
        Format::Text => match status {
            Status::Incomplete => writeln!(out, "no (depth limit reached, search incomplete)."),
            _ => writeln!(out, "no."),
        },
    }
}
