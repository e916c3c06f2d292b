//! Removal of aggregate and window columns that nothing above them reads.

use alloc::vec;
use alloc::vec::Vec;

use crate::eval::{arity, eval, EvalError, Inputs};
use crate::program::{AggFunc, Clause, Predicate, Prim, Program, SortKey, WinFunc};
use crate::table::{tables_equal, Table};
use alloc::sync::Arc;

type Map = Vec<Option<usize>>;

fn remap(m: &Map, c: usize) -> usize {
    m[c].expect("referenced columns are kept")
}

fn identity(n: usize) -> Map {
    (0..n).map(Some).collect()
}

fn mark(used: &mut [bool], cols: impl IntoIterator<Item = usize>) {
    for c in cols {
        used[c] = true;
    }
}

fn remap_pred(pred: &Predicate, m: &Map) -> Predicate {
    Predicate(
        pred.0
            .iter()
            .map(|clause| {
                Clause(
                    clause
                        .0
                        .iter()
                        .map(|p| match p {
                            Prim::Cmp { col, op, value } => Prim::Cmp { col: remap(m, *col), op: *op, value: value.clone() },
                            Prim::IsNull(c) => Prim::IsNull(remap(m, *c)),
                            Prim::IsNotNull(c) => Prim::IsNotNull(remap(m, *c)),
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

/// Rebuilds `p` keeping only the Group/Window columns needed for the output
/// columns flagged in `used`. Returns the new program and, for each old
/// output column, its new position.
fn prune(p: &Program, used: &[bool], env: &Inputs) -> Result<(Program, Map), EvalError> {
    let key = |k: &SortKey, m: &Map| SortKey { col: remap(m, k.col), dir: k.dir };
    Ok(match p {
        Program::Table(_) => (p.clone(), identity(used.len())),
        Program::Order { child, keys } => {
            let mut cu = used.to_vec();
            mark(&mut cu, keys.iter().map(|k| k.col));
            let (c, m) = prune(child, &cu, env)?;
            let keys = keys.iter().map(|k| key(k, &m)).collect();
            (Program::Order { child: Arc::new(c), keys }, m)
        }
        Program::Distinct { child } => {
            let (c, m) = prune(child, &vec![true; used.len()], env)?;
            (Program::Distinct { child: Arc::new(c) }, m)
        }
        Program::Project { child, cols } => {
            let mut cu = vec![false; arity(child, env)?];
            mark(&mut cu, cols.iter().copied());
            let (c, m) = prune(child, &cu, env)?;
            let cols = cols.iter().map(|&x| remap(&m, x)).collect();
            (Program::Project { child: Arc::new(c), cols }, identity(used.len()))
        }
        Program::Select { child, pred } => {
            let mut cu = used.to_vec();
            mark(&mut cu, pred.prims().map(Prim::col));
            let (c, m) = prune(child, &cu, env)?;
            let pred = remap_pred(pred, &m);
            (Program::Select { child: Arc::new(c), pred }, m)
        }
        Program::Group { child, keys, aggs } => {
            let nk = keys.len();
            let kept: Vec<usize> = (0..aggs.len()).filter(|&a| used[nk + a]).collect();
            let mut cu = vec![false; arity(child, env)?];
            mark(&mut cu, keys.iter().copied());
            mark(&mut cu, kept.iter().filter(|&&a| aggs[a].func != AggFunc::CountStar).map(|&a| aggs[a].col));
            let (c, m) = prune(child, &cu, env)?;
            let new_aggs = kept
                .iter()
                .map(|&a| {
                    let mut agg = aggs[a];
                    agg.col = if agg.func == AggFunc::CountStar { 0 } else { remap(&m, agg.col) };
                    agg
                })
                .collect();
            let mut map: Map = (0..nk).map(Some).collect();
            map.extend((0..aggs.len()).map(|a| kept.iter().position(|&k| k == a).map(|i| nk + i)));
            let keys = keys.iter().map(|&k| remap(&m, k)).collect();
            (Program::Group { child: Arc::new(c), keys, aggs: new_aggs }, map)
        }
        Program::Window { child, wins } => {
            let cw = arity(child, env)?;
            let kept: Vec<usize> = (0..wins.len()).filter(|&w| used[cw + w]).collect();
            let mut cu = used[..cw].to_vec();
            for &w in &kept {
                let win = &wins[w];
                if win.func != WinFunc::Rank {
                    cu[win.target] = true;
                }
                mark(&mut cu, win.partition.iter().copied());
                cu[win.key.col] = true;
            }
            let (c, m) = prune(child, &cu, env)?;
            let ncw = m.iter().flatten().count();
            let new_wins = kept
                .iter()
                .map(|&w| {
                    let mut win = wins[w].clone();
                    win.target = if win.func == WinFunc::Rank { 0 } else { remap(&m, win.target) };
                    win.partition = win.partition.iter().map(|&x| remap(&m, x)).collect();
                    win.key = key(&win.key, &m);
                    win
                })
                .collect();
            let mut map = m;
            map.extend((0..wins.len()).map(|w| kept.iter().position(|&k| k == w).map(|i| ncw + i)));
            (Program::Window { child: Arc::new(c), wins: new_wins }, map)
        }
        Program::Join { left, right, pairs } => {
            let la = arity(left, env)?;
            let (mut lu, mut ru) = (used[..la].to_vec(), used[la..].to_vec());
            mark(&mut lu, pairs.iter().map(|p| p.0));
            mark(&mut ru, pairs.iter().map(|p| p.1));
            let (l, lm) = prune(left, &lu, env)?;
            let (r, rm) = prune(right, &ru, env)?;
            let pairs = pairs.iter().map(|&(a, b)| (remap(&lm, a), remap(&rm, b))).collect();
            let map = join_map(lm, rm);
            (Program::Join { left: Arc::new(l), right: Arc::new(r), pairs }, map)
        }
        Program::LeftJoin { left, right, pair } => {
            let la = arity(left, env)?;
            let (mut lu, mut ru) = (used[..la].to_vec(), used[la..].to_vec());
            lu[pair.0] = true;
            ru[pair.1] = true;
            let (l, lm) = prune(left, &lu, env)?;
            let (r, rm) = prune(right, &ru, env)?;
            let pair = (remap(&lm, pair.0), remap(&rm, pair.1));
            let map = join_map(lm, rm);
            (Program::LeftJoin { left: Arc::new(l), right: Arc::new(r), pair }, map)
        }
    })
}

fn join_map(lm: Map, rm: Map) -> Map {
    let offset = lm.iter().flatten().count();
    let mut map = lm;
    map.extend(rm.into_iter().map(|x| x.map(|i| i + offset)));
    map
}

/// Drops every Group aggregate and Window column that no ancestor reads.
///
/// The result is returned only if it still reproduces `expected`; otherwise
/// `p` comes back unchanged.
pub fn minimize_columns(p: &Program, env: &Inputs, expected: &Table, as_list: bool) -> Program {
    let Ok(width) = arity(p, env) else {
        return p.clone();
    };
    match prune(p, &vec![true; width], env) {
        Ok((q, _)) if eval(&q, env).is_ok_and(|t| tables_equal(expected, &t, as_list)) => q,
        _ => p.clone(),
    }
}
