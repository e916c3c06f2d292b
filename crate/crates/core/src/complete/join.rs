use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::project::next_combination;
use super::{complete, generate, BitArray, Candidate, Context, Stream};
use crate::eval::{join_rows, keys_match};
use crate::phi::Phi;
use crate::program::Program;
use crate::sketch::Sketch;
use crate::table::Table;

enum Phase {
    Singles(usize),
    Conj(Vec<usize>),
    Done,
}

/// Lazy enumeration of equi-join conditions between two tables.
///
/// Bit `i * |r| + j` of a condition's array is set when left row `i` and
/// right row `j` match. Single pairs come first, then conjunctions of up to
/// `max_pairs` of them; conditions matching nothing, or matching exactly the
/// rows of an earlier condition, are skipped.
pub struct JoinPairs {
    raw: Vec<(usize, usize)>,
    l: Arc<Table>,
    r: Arc<Table>,
    singles: Vec<((usize, usize), BitArray)>,
    seen: BTreeSet<BitArray>,
    phase: Phase,
    max_pairs: usize,
}

pub fn join_pairs(l: Arc<Table>, r: Arc<Table>, max_pairs: usize) -> JoinPairs {
    let mut raw = Vec::new();
    for a in 0..l.width() {
        for b in 0..r.width() {
            if l.ctype(a).comparable_with(r.ctype(b)) {
                raw.push((a, b));
            }
        }
    }
    JoinPairs { raw, l, r, singles: Vec::new(), seen: BTreeSet::new(), phase: Phase::Singles(0), max_pairs }
}

impl JoinPairs {
    fn pair_bits(&self, pair: (usize, usize)) -> BitArray {
        let (lh, rh) = (self.l.height(), self.r.height());
        let mut bits = BitArray::with_capacity(lh * rh);
        for i in 0..lh {
            for j in 0..rh {
                if keys_match(&self.l, &self.r, i, j, pair) {
                    bits.insert(i * rh + j);
                }
            }
        }
        bits
    }

    fn conj(&self, k: usize) -> Phase {
        if k <= self.max_pairs && k <= self.singles.len() {
            Phase::Conj((0..k).collect())
        } else {
            Phase::Done
        }
    }

    /// Examines one condition. `None` when exhausted, `Some(None)` when skipped.
    pub fn step(&mut self) -> Option<Option<(Vec<(usize, usize)>, BitArray)>> {
        match &mut self.phase {
            Phase::Done => None,
            Phase::Singles(i) => {
                let Some(&pair) = self.raw.get(*i) else {
                    self.phase = self.conj(2);
                    return Some(None);
                };
                *i += 1;
                let bits = self.pair_bits(pair);
                if bits.is_clear() || !self.seen.insert(bits.clone()) {
                    return Some(None);
                }
                self.singles.push((pair, bits.clone()));
                Some(Some((alloc::vec![pair], bits)))
            }
            Phase::Conj(idx) => {
                let idx = idx.clone();
                let mut bits = self.singles[idx[0]].1.clone();
                for &j in &idx[1..] {
                    bits.intersect_with(&self.singles[j].1);
                }
                let n = self.singles.len();
                let more = match &mut self.phase {
                    Phase::Conj(c) => next_combination(c, n),
                    _ => false,
                };
                if !more {
                    self.phase = self.conj(idx.len() + 1);
                }
                if bits.is_clear() || !self.seen.insert(bits.clone()) {
                    return Some(None);
                }
                Some(Some((idx.iter().map(|&j| self.singles[j].0).collect(), bits)))
            }
        }
    }
}

impl Iterator for JoinPairs {
    type Item = (Vec<(usize, usize)>, BitArray);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(x) = self.step()? {
                return Some(x);
            }
        }
    }
}

/// Matched row pairs in left-major order; with `outer`, unmatched left rows padded.
fn matched_rows(bits: &BitArray, lh: usize, rh: usize, outer: bool) -> Vec<(usize, Option<usize>)> {
    let mut rows = Vec::with_capacity(bits.count_ones(..));
    for i in 0..lh {
        let before = rows.len();
        rows.extend((i * rh..(i + 1) * rh).filter(|&b| bits.contains(b)).map(|b| (i, Some(b - i * rh))));
        if outer && rows.len() == before {
            rows.push((i, None));
        }
    }
    rows
}

fn joined<'c>(ctx: &'c Context<'_>, lc: Candidate, rc: Candidate, phi: Phi, outer: bool) -> Stream<'c> {
    let max = if outer { 1 } else { ctx.config.max_join_pairs };
    let mut pairs = join_pairs(lc.table.clone(), rc.table.clone(), max);
    let (lh, rh) = (lc.table.height(), rc.table.height());
    generate(ctx, move || {
        let Some((pairs, bits)) = pairs.step()? else {
            return Some(None);
        };
        let rows = matched_rows(&bits, lh, rh, outer);
        if !ctx.out.admits_height(phi, rows.len()) {
            return Some(None);
        }
        let table = join_rows(&lc.table, &rc.table, &rows);
        let (left, right) = (lc.program.clone(), rc.program.clone());
        let program = if outer {
            Program::LeftJoin { left, right, pair: pairs[0] }
        } else {
            Program::Join { left, right, pairs }
        };
        Some(ctx.keep(phi, program, table))
    })
}

pub(super) fn joins<'c>(ctx: &'c Context<'_>, l: &Sketch, r: &Sketch, phi: Phi, outer: bool) -> Stream<'c> {
    let left = complete(l, ctx, Phi::Top);
    let r = r.clone();
    let mut right: Option<Vec<Candidate>> = None;
    Box::new(left.flat_map(move |lc| {
        let rights = right.get_or_insert_with(|| complete(&r, ctx, Phi::Top).collect()).clone();
        rights.into_iter().flat_map(move |rc| joined(ctx, lc.clone(), rc, phi, outer))
    }))
}
