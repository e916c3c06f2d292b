//! The search loop: smallest sketches first, each completed and verified.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::complete::{complete, Context, Counters};
use crate::config::{Clock, Config};
use crate::eval::{eval, EvalError, Inputs};
use crate::minimize::minimize_columns;
use crate::phi::Phi;
use crate::program::{OpKind, Program};
use crate::sketch::{Sketch, Worklist};
use crate::sql::{to_sql, Dialect};
use crate::table::{detect_sorted, tables_equal, Table};
use crate::value::Value;

#[derive(Clone, Debug)]
pub struct Problem {
    pub inputs: Inputs,
    pub output: Table,
    pub constants: Vec<Value>,
    pub config: Config,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error("at least one input table is required")]
    NoInputs,
    #[error("the output table needs at least one column")]
    EmptyOutput,
    #[error("constant #{0} is NULL")]
    NullConstant(usize),
}

impl Problem {
    pub fn new(inputs: Inputs, output: Table, constants: Vec<Value>) -> Self {
        Problem { inputs, output, constants, config: Config::default() }
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        if self.inputs.is_empty() {
            return Err(ProblemError::NoInputs);
        }
        if self.output.width() == 0 {
            return Err(ProblemError::EmptyOutput);
        }
        if let Some(i) = self.constants.iter().position(Value::is_null) {
            return Err(ProblemError::NullConstant(i));
        }
        Ok(())
    }

    /// Whether results are compared as row lists rather than multisets.
    pub fn as_list(&self) -> bool {
        detect_sorted(&self.output).is_sorted()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Solved,
    Timeout,
    Exhausted,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::Timeout => "timeout",
            Status::Exhausted => "exhausted",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub elapsed_ms: u64,
    pub sketches_tried: u64,
    pub candidates_checked: u64,
}

#[derive(Clone, Debug)]
pub struct SynthesisResult {
    pub status: Status,
    pub program: Option<Program>,
    pub sql: Option<String>,
    pub stats: Stats,
}

/// What happened to one sketch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Not completed: no `Project` below the root prefix, or no `Select`
    /// although constants were given.
    Skipped,
    /// Completed without producing a program equal to the output.
    Failed,
    Solved,
    /// The deadline passed while completing it.
    Timeout,
}

pub struct SketchRecord<'a> {
    pub sketch: &'a Sketch,
    pub size: usize,
    pub outcome: Outcome,
    pub counters: Counters,
}

/// Receives one record per sketch the search visits.
pub trait Observer {
    fn on_sketch(&mut self, record: &SketchRecord<'_>);
}

impl Observer for () {
    fn on_sketch(&mut self, _: &SketchRecord<'_>) {}
}

/// Evaluates `p` and compares it with the problem's output.
pub fn check(p: &Program, problem: &Problem) -> Result<bool, EvalError> {
    let t = eval(p, &problem.inputs)?;
    Ok(tables_equal(&problem.output, &t, problem.as_list()))
}

pub fn verify(p: &Program, problem: &Problem) -> bool {
    check(p, problem).unwrap_or(false)
}

fn eligible(s: &Sketch, constants: &[Value]) -> bool {
    s.has_root_project() && (constants.is_empty() || s.contains(OpKind::Select))
}

/// Searches for a smallest program mapping the inputs to the output.
pub fn synthesize(problem: &Problem, clock: &dyn Clock, observer: &mut dyn Observer) -> SynthesisResult {
    let config = &problem.config;
    let as_list = problem.as_list();
    let ctx = Context::new(&problem.inputs, &problem.output, &problem.constants, config, clock);
    let names: Vec<Arc<str>> = problem.inputs.names().cloned().collect();
    let mut stats = Stats::default();

    let finish = |status, program: Option<Program>, mut stats: Stats| {
        stats.elapsed_ms = clock.elapsed_ms();
        let sql = program.as_ref().and_then(|p| to_sql(p, &problem.inputs, Dialect::default()).ok());
        SynthesisResult { status, program, sql, stats }
    };

    let seed = if as_list { Sketch::fresh(OpKind::Order) } else { Sketch::Hole };
    let mut seen = BTreeSet::new();
    seen.insert(seed.clone());
    let mut worklist = Worklist::new();
    worklist.push(seed);

    while let Some(s) = worklist.pop_min_size() {
        if ctx.expired() {
            return finish(Status::Timeout, None, stats);
        }
        if !eligible(&s, &problem.constants) {
            observer.on_sketch(&SketchRecord { sketch: &s, size: s.size(), outcome: Outcome::Skipped, counters: Counters::default() });
        } else {
            let mut assigned: Vec<Sketch> = Vec::new();
            for a in s.assign_tables(&names) {
                let a = a.canonical();
                if !assigned.contains(&a) {
                    assigned.push(a);
                }
            }
            for a in &assigned {
                ctx.reset_counters();
                stats.sketches_tried += 1;
                let mut found = None;
                for cand in complete(a, &ctx, Phi::ROOT) {
                    stats.candidates_checked += 1;
                    if tables_equal(&problem.output, &cand.table, as_list) {
                        found = Some(cand.program);
                        break;
                    }
                    if ctx.expired() {
                        break;
                    }
                }
                let outcome = match (&found, ctx.expired()) {
                    (Some(_), _) => Outcome::Solved,
                    (None, true) => Outcome::Timeout,
                    (None, false) => Outcome::Failed,
                };
                observer.on_sketch(&SketchRecord { sketch: a, size: a.size(), outcome, counters: ctx.counters() });
                if let Some(p) = found {
                    let p = minimize_columns(&p, &problem.inputs, &problem.output, as_list);
                    debug_assert!(verify(&p, problem));
                    return finish(Status::Solved, Some(p), stats);
                }
                if outcome == Outcome::Timeout {
                    return finish(Status::Timeout, None, stats);
                }
            }
        }
        for e in s.expand() {
            if e.size() <= config.max_sketch_size && seen.insert(e.clone()) {
                worklist.push(e);
            }
        }
    }
    finish(Status::Exhausted, None, stats)
}
