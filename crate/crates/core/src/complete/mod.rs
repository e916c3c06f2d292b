//! Top-down sketch completion.
//!
//! Each operator's child is completed first under the constraint obtained by
//! [`Phi::propagate`]; the candidates it yields are extended with concrete
//! arguments for the operator and kept only when the constraint still holds
//! against the output table. All streams are lazy and stop at the deadline.

mod aggregate;
mod conds;
mod join;
mod order;
mod project;

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::Cell;

use crate::config::{Clock, Config, ProjectionMode};
use crate::eval::{self, Inputs};
use crate::phi::{OutputIndex, Phi};
use crate::program::{OpKind, Program};
use crate::sketch::Sketch;
use crate::table::Table;
use crate::value::Value;

pub use aggregate::{group_aggregates, window_choices};
pub use conds::{conds, prim_bits, prims, BitArray, Conds, PredicateCandidate};
pub use join::{join_pairs, JoinPairs};
pub use order::sort_keys;
pub use project::{baseline_projections, fast_projections};

/// A program together with its result on the inputs.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub program: Arc<Program>,
    pub table: Arc<Table>,
}

impl Candidate {
    fn new(program: Program, table: Table) -> Self {
        Candidate { program: Arc::new(program), table: Arc::new(table) }
    }
}

pub type Stream<'c> = Box<dyn Iterator<Item = Candidate> + 'c>;

/// Counters accumulated while completing sketches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    /// Candidates yielded by any completion step.
    pub candidates: u64,
    /// Table leaves rejected by their constraint.
    pub pruned_at_leaf: u64,
    /// Projection argument lists examined.
    pub projection_combos: u64,
}

/// Everything completion needs besides the sketch itself.
pub struct Context<'a> {
    leaves: Vec<(Arc<str>, Arc<Table>)>,
    out: OutputIndex<'a>,
    constants: &'a [Value],
    config: &'a Config,
    clock: &'a dyn Clock,
    counters: Cell<Counters>,
}

impl<'a> Context<'a> {
    pub fn new(inputs: &Inputs, tout: &'a Table, constants: &'a [Value], config: &'a Config, clock: &'a dyn Clock) -> Self {
        let leaves = inputs.iter().map(|(n, t)| (Arc::from(n), Arc::new(t.clone()))).collect();
        Context { leaves, out: OutputIndex::new(tout), constants, config, clock, counters: Cell::new(Counters::default()) }
    }

    pub fn tout(&self) -> &'a Table {
        self.out.table()
    }

    pub fn config(&self) -> &Config {
        self.config
    }

    pub fn counters(&self) -> Counters {
        self.counters.get()
    }

    pub fn reset_counters(&self) {
        self.counters.set(Counters::default());
    }

    pub fn expired(&self) -> bool {
        self.clock.elapsed_ms() >= self.config.timeout_ms
    }

    fn bump(&self, f: impl FnOnce(&mut Counters)) {
        let mut c = self.counters.get();
        f(&mut c);
        self.counters.set(c);
    }

    /// Counts a candidate whose constraint the caller has already checked.
    fn accept(&self, program: Program, table: Table) -> Candidate {
        self.bump(|c| c.candidates += 1);
        Candidate::new(program, table)
    }

    /// Keeps `table` if it satisfies `phi`, counting it as a candidate.
    fn keep(&self, phi: Phi, program: Program, table: Table) -> Option<Candidate> {
        if !self.out.admits_height(phi, table.height()) || !self.out.holds(phi, &table) {
            return None;
        }
        self.bump(|c| c.candidates += 1);
        Some(Candidate::new(program, table))
    }
}

/// All completions of `s` whose results satisfy `phi` against the output.
///
/// `s` must have every table leaf named.
pub fn complete<'c>(s: &Sketch, ctx: &'c Context<'_>, phi: Phi) -> Stream<'c> {
    let child_phi = |k: OpKind| phi.propagate(k);
    match s {
        Sketch::Hole => Box::new(core::iter::empty()),
        Sketch::Table(name) => complete_table(name, ctx, phi),
        Sketch::Order(c) => {
            let child = complete(c, ctx, child_phi(OpKind::Order));
            Box::new(child.filter_map(move |cand| {
                if ctx.expired() {
                    return None;
                }
                let keys = sort_keys(ctx.tout(), &cand.table);
                if keys.is_empty() {
                    return None;
                }
                let table = eval::order(&cand.table, &keys).ok()?;
                ctx.bump(|c| c.candidates += 1);
                Some(Candidate::new(Program::Order { child: cand.program, keys }, table))
            }))
        }
        Sketch::Distinct(c) => {
            let child = complete(c, ctx, child_phi(OpKind::Distinct));
            Box::new(child.filter_map(move |cand| {
                if ctx.expired() {
                    return None;
                }
                let table = eval::distinct(&cand.table);
                ctx.keep(phi, Program::Distinct { child: cand.program }, table)
            }))
        }
        Sketch::Project(c) => {
            let child = complete(c, ctx, child_phi(OpKind::Project));
            let baseline = ctx.config.projection == ProjectionMode::Baseline;
            Box::new(child.flat_map(move |cand| -> Stream<'c> {
                match (baseline, phi) {
                    (false, Phi::Rel(crate::phi::Mode::Positional, _)) => fast_projections(ctx, cand, phi),
                    _ => baseline_projections(ctx, cand, phi),
                }
            }))
        }
        Sketch::Select(c) => {
            let child = complete(c, ctx, child_phi(OpKind::Select));
            Box::new(child.flat_map(move |cand| conds::selections(ctx, cand, phi)))
        }
        Sketch::Group(c) => {
            let child = complete(c, ctx, child_phi(OpKind::Group));
            Box::new(child.flat_map(move |cand| aggregate::groups(ctx, cand, phi)))
        }
        Sketch::Window(c) => {
            let child = complete(c, ctx, child_phi(OpKind::Window));
            Box::new(child.flat_map(move |cand| aggregate::windows(ctx, cand, phi)))
        }
        Sketch::Join(l, r) => join::joins(ctx, l, r, phi, false),
        Sketch::LeftJoin(l, r) => join::joins(ctx, l, r, phi, true),
    }
}

fn complete_table<'c>(name: &Arc<str>, ctx: &'c Context<'_>, phi: Phi) -> Stream<'c> {
    let Some((_, t)) = ctx.leaves.iter().find(|(n, _)| n == name) else {
        return Box::new(core::iter::empty());
    };
    if !ctx.out.admits_height(phi, t.height()) || !ctx.out.holds(phi, t) {
        ctx.bump(|c| c.pruned_at_leaf += 1);
        return Box::new(core::iter::empty());
    }
    ctx.bump(|c| c.candidates += 1);
    Box::new(core::iter::once(Candidate { program: Arc::new(Program::Table(name.clone())), table: t.clone() }))
}

/// Yields the items produced by `f`, stopping at its first `None` or at the deadline.
///
/// Steps for which `f` returns `Some(None)` produce nothing.
fn generate<'c, T: 'c>(ctx: &'c Context<'_>, mut f: impl FnMut() -> Option<Option<T>> + 'c) -> Box<dyn Iterator<Item = T> + 'c> {
    Box::new(core::iter::from_fn(move || loop {
        if ctx.expired() {
            return None;
        }
        match f()? {
            Some(x) => return Some(x),
            None => continue,
        }
    }))
}
