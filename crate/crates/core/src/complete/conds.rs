use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use super::project::next_combination;
use super::{generate, Candidate, Context, Stream};
use crate::eval::prim_holds;
use crate::phi::Phi;
use crate::program::{BinOp, Clause, Predicate, Prim, Program};
use crate::table::Table;
use crate::value::Value;

/// One bit per row; set bits are the rows a predicate keeps.
pub type BitArray = FixedBitSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateCandidate {
    pub pred: Predicate,
    pub rows: BitArray,
}

/// Every type-compatible primitive test over `t`, column by column.
pub fn prims(t: &Table, constants: &[Value]) -> Vec<Prim> {
    let mut out = Vec::new();
    for col in 0..t.width() {
        let ct = t.ctype(col);
        for v in constants.iter().filter(|v| v.ctype().is_some_and(|vt| ct.comparable_with(vt))) {
            for op in BinOp::ALL {
                if !op.is_ordering() || ct.is_ordered() {
                    out.push(Prim::Cmp { col, op, value: v.clone() });
                }
            }
        }
        out.push(Prim::IsNull(col));
        out.push(Prim::IsNotNull(col));
    }
    out
}

pub fn prim_bits(t: &Table, p: &Prim) -> BitArray {
    let col = t.column(p.col());
    let mut bits = FixedBitSet::with_capacity(t.height());
    for (r, cell) in col.iter().enumerate() {
        if prim_holds(p, cell) {
            bits.insert(r);
        }
    }
    bits
}

enum Phase {
    Prims(usize),
    Clauses(Vec<usize>),
    Preds(Vec<usize>),
    Done,
}

/// Lazy enumeration of selection predicates over one table.
///
/// Primitive tests come first, then disjunctions of up to `max_prims` of
/// them, then conjunctions of up to `max_clauses` clauses. A predicate is
/// emitted only if its bit array is neither all ones nor all zeros and
/// differs from every bit array emitted before it.
pub struct Conds {
    raw: Vec<Prim>,
    rows: usize,
    table: Table,
    prims: Vec<(Prim, BitArray)>,
    clauses: Vec<(Clause, BitArray)>,
    seen: BTreeSet<BitArray>,
    phase: Phase,
    max_prims: usize,
    max_clauses: usize,
}

pub fn conds(t: &Table, constants: &[Value], max_prims: usize, max_clauses: usize) -> Conds {
    Conds {
        raw: prims(t, constants),
        rows: t.height(),
        table: t.clone(),
        prims: Vec::new(),
        clauses: Vec::new(),
        seen: BTreeSet::new(),
        phase: Phase::Prims(0),
        max_prims,
        max_clauses,
    }
}

impl Conds {
    fn novel(&mut self, bits: &BitArray) -> bool {
        let ones = bits.count_ones(..);
        ones != 0 && ones != self.rows && self.seen.insert(bits.clone())
    }

    /// Examines one combination. `None` when exhausted, `Some(None)` when the
    /// combination was discarded.
    pub fn step(&mut self) -> Option<Option<PredicateCandidate>> {
        match &mut self.phase {
            Phase::Done => None,
            Phase::Prims(i) => {
                let Some(p) = self.raw.get(*i).cloned() else {
                    self.phase = self.first_combination(2, true);
                    return Some(None);
                };
                *i += 1;
                let bits = prim_bits(&self.table, &p);
                if !self.novel(&bits) {
                    return Some(None);
                }
                let clause = Clause(vec![p.clone()]);
                self.prims.push((p, bits.clone()));
                self.clauses.push((clause.clone(), bits.clone()));
                Some(Some(PredicateCandidate { pred: Predicate(vec![clause]), rows: bits }))
            }
            Phase::Clauses(idx) => {
                let idx = idx.clone();
                let mut bits = self.prims[idx[0]].1.clone();
                for &j in &idx[1..] {
                    bits.union_with(&self.prims[j].1);
                }
                self.advance(idx.len(), true);
                if !self.novel(&bits) {
                    return Some(None);
                }
                let clause = Clause(idx.iter().map(|&j| self.prims[j].0.clone()).collect());
                self.clauses.push((clause.clone(), bits.clone()));
                Some(Some(PredicateCandidate { pred: Predicate(vec![clause]), rows: bits }))
            }
            Phase::Preds(idx) => {
                let idx = idx.clone();
                let mut bits = self.clauses[idx[0]].1.clone();
                for &j in &idx[1..] {
                    bits.intersect_with(&self.clauses[j].1);
                }
                self.advance(idx.len(), false);
                if !self.novel(&bits) {
                    return Some(None);
                }
                let pred = Predicate(idx.iter().map(|&j| self.clauses[j].0.clone()).collect());
                Some(Some(PredicateCandidate { pred, rows: bits }))
            }
        }
    }

    /// The phase for the first `k`-combination over the prim or clause pool,
    /// moving on to larger `k`, then to the next pool, as pools run short.
    fn first_combination(&self, mut k: usize, mut clauses: bool) -> Phase {
        loop {
            let (limit, pool) = if clauses {
                (self.max_prims, self.prims.len())
            } else {
                (self.max_clauses, self.clauses.len())
            };
            if k <= limit && k <= pool {
                let idx = (0..k).collect();
                return if clauses { Phase::Clauses(idx) } else { Phase::Preds(idx) };
            }
            if !clauses {
                return Phase::Done;
            }
            clauses = false;
            k = 2;
        }
    }

    fn advance(&mut self, k: usize, clauses: bool) {
        let pool = if clauses { self.prims.len() } else { self.clauses.len() };
        let more = match &mut self.phase {
            Phase::Clauses(idx) | Phase::Preds(idx) => next_combination(idx, pool),
            _ => false,
        };
        if !more {
            self.phase = self.first_combination(k + 1, clauses);
        }
    }
}

impl Iterator for Conds {
    type Item = PredicateCandidate;

    fn next(&mut self) -> Option<PredicateCandidate> {
        loop {
            if let Some(c) = self.step()? {
                return Some(c);
            }
        }
    }
}

pub(super) fn selections<'c>(ctx: &'c Context<'_>, cand: Candidate, phi: Phi) -> Stream<'c> {
    let cfg = ctx.config;
    let mut it = conds(&cand.table, ctx.constants, cfg.max_prims_per_clause, cfg.max_clauses);
    generate(ctx, move || {
        let pc = it.step()?;
        let Some(pc) = pc else {
            return Some(None);
        };
        if !ctx.out.admits_height(phi, pc.rows.count_ones(..)) {
            return Some(None);
        }
        let rows: Vec<usize> = pc.rows.ones().collect();
        let table = cand.table.take_rows(&rows);
        Some(ctx.keep(phi, Program::Select { child: cand.program.clone(), pred: pc.pred }, table))
    })
}
