use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{generate, Candidate, Context, Stream};
use crate::eval;
use crate::phi::{Mode, Phi};
use crate::program::{AggCol, AggFunc, Program, SortKey, WinCol, WinFunc};
use crate::table::{ColumnSchema, Direction, Table};
use crate::value::Value;

/// Key lists of length 0, 1 and 2 over `n` columns, shortest first.
fn key_sets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let singles = (0..n).map(|i| vec![i]);
    let pairs = (0..n).flat_map(move |i| (i + 1..n).map(move |j| vec![i, j]));
    core::iter::once(Vec::new()).chain(singles).chain(pairs)
}

/// Every typed aggregate over `t`: `count(*)` first, then column by column.
pub fn group_aggregates(t: &Table) -> Vec<AggCol> {
    let mut aggs = vec![AggCol { func: AggFunc::CountStar, col: 0 }];
    for col in 0..t.width() {
        let ct = t.ctype(col);
        for func in AggFunc::ALL {
            if func != AggFunc::CountStar && func.accepts(ct) {
                aggs.push(AggCol { func, col });
            }
        }
    }
    aggs
}

/// Evaluates a bundle, dropping aggregates that fail on this table (integer overflow).
fn group_bundle(t: &Table, keys: &[usize], aggs: &[AggCol], parts: &[Vec<usize>]) -> Option<(Vec<AggCol>, Table)> {
    if let Ok(out) = eval::group_partitioned(t, keys, aggs, parts) {
        return Some((aggs.to_vec(), out));
    }
    let ok: Vec<AggCol> =
        aggs.iter().copied().filter(|a| eval::group_partitioned(t, keys, &[*a], parts).is_ok()).collect();
    let out = eval::group_partitioned(t, keys, &ok, parts).ok()?;
    Some((ok, out))
}

/// Prepends the key columns of `keys` to an aggregate-only table over `parts`.
fn with_keys(t: &Table, keys: &[usize], parts: &[Vec<usize>], aggs: &Table) -> Table {
    let mut schema: Vec<ColumnSchema> = keys.iter().map(|&k| t.schema()[k].clone()).collect();
    let mut columns: Vec<Arc<[Value]>> =
        keys.iter().map(|&k| parts.iter().map(|g| t.cell(g[0], k).clone()).collect::<Vec<_>>().into()).collect();
    schema.extend(aggs.schema().iter().cloned());
    columns.extend((0..aggs.width()).map(|c| aggs.shared_column(c).clone()));
    Table::assemble(schema, columns, parts.len())
}

struct Bundle {
    aggs: Vec<AggCol>,
    table: Table,
    /// Output columns matched by an aggregate column, under an existential constraint.
    covered: Option<Vec<bool>>,
}

pub(super) fn groups<'c>(ctx: &'c Context<'_>, cand: Candidate, phi: Phi) -> Stream<'c> {
    let aggs = group_aggregates(&cand.table);
    let mut keys = key_sets(cand.table.width());
    // Key sets inducing the same partition share their aggregate columns.
    let mut memo: BTreeMap<Vec<Vec<usize>>, Option<Bundle>> = BTreeMap::new();
    generate(ctx, move || {
        let keys = keys.next()?;
        let parts = eval::partition_rows(&cand.table, &keys);
        if !ctx.out.admits_height(phi, parts.len()) {
            return Some(None);
        }
        let t = &cand.table;
        let entry = memo.entry(parts.clone()).or_insert_with(|| {
            let (aggs, table) = group_bundle(t, &[], &aggs, &parts)?;
            let covered = match phi {
                Phi::Rel(Mode::Existential, rel) => Some(ctx.out.covered(&table, rel)),
                _ => None,
            };
            Some(Bundle { aggs, table, covered })
        });
        let Some(bundle) = entry.as_ref() else {
            return Some(None);
        };
        if let (Phi::Rel(_, rel), Some(covered)) = (phi, &bundle.covered) {
            let key_table = with_keys(t, &keys, &parts, &Table::empty(parts.len()));
            if !ctx.out.covers_rest(&key_table, rel, covered, 0..keys.len()) {
                return Some(None);
            }
            let table = with_keys(t, &keys, &parts, &bundle.table);
            let program = Program::Group { child: cand.program.clone(), keys, aggs: bundle.aggs.clone() };
            return Some(Some(ctx.accept(program, table)));
        }
        let table = with_keys(t, &keys, &parts, &bundle.table);
        let program = Program::Group { child: cand.program.clone(), keys, aggs: bundle.aggs.clone() };
        Some(ctx.keep(phi, program, table))
    })
}

/// Partition and sort-key choices for a window over `t`, in enumeration order.
pub fn window_choices(t: &Table) -> Vec<(Vec<usize>, SortKey)> {
    let n = t.width();
    key_sets(n)
        .flat_map(|part| {
            (0..n).flat_map(move |col| {
                let part = part.clone();
                [Direction::Asc, Direction::Desc].into_iter().map(move |dir| (part.clone(), SortKey { col, dir }))
            })
        })
        .collect()
}

/// All window functions for one partition and sort key: every typed target, then `rank`.
fn window_bundle(t: &Table, partition: &[usize], key: SortKey) -> Vec<WinCol> {
    let mut wins = Vec::new();
    for func in [WinFunc::Max, WinFunc::Min, WinFunc::Count, WinFunc::Sum] {
        for target in 0..t.width() {
            if func.accepts(t.ctype(target)) {
                wins.push(WinCol { func, target, partition: partition.to_vec(), key });
            }
        }
    }
    wins.push(WinCol { func: WinFunc::Rank, target: 0, partition: partition.to_vec(), key });
    wins
}

pub(super) fn windows<'c>(ctx: &'c Context<'_>, cand: Candidate, phi: Phi) -> Stream<'c> {
    let mut choices = window_choices(&cand.table).into_iter();
    generate(ctx, move || {
        let (partition, key) = choices.next()?;
        let mut wins = window_bundle(&cand.table, &partition, key);
        let table = match eval::window(&cand.table, &wins) {
            Ok(t) => t,
            Err(_) => {
                wins.retain(|w| eval::window(&cand.table, core::slice::from_ref(w)).is_ok());
                match eval::window(&cand.table, &wins) {
                    Ok(t) => t,
                    Err(_) => return Some(None),
                }
            }
        };
        Some(ctx.keep(phi, Program::Window { child: cand.program.clone(), wins }, table))
    })
}
