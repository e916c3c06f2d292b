//! Fast projection inference against the brute-force subset/permutation search.

use std::collections::BTreeSet;
use std::sync::Arc;

use sqlsynth_core::complete::{baseline_projections, fast_projections, Candidate, Context};
use sqlsynth_core::{eval, CType, ColRel, ColumnSchema, Config, Frozen, Inputs, Mode, Phi, Program, Table, Value};

use crate::Verdict;

/// Column vectors of height `h` out of which child tables are assembled.
///
/// Two integer columns share values, one has a Null, and one string column
/// is type-incompatible with the rest.
fn pool(h: usize) -> Vec<(CType, Vec<Value>)> {
    let ints = |f: &dyn Fn(usize) -> Option<i64>| (0..h).map(|r| f(r).map_or(Value::Null, Value::Int)).collect();
    vec![
        (CType::Int, ints(&|r| Some((r % 2) as i64 + 1))),
        (CType::Int, ints(&|r| if r + 1 == h { None } else { Some((r % 3) as i64 + 1) })),
        (CType::Str, (0..h).map(|r| Value::str(["x", "y"][r % 2])).collect()),
    ]
}

fn children() -> Vec<Table> {
    let mut out = Vec::new();
    for h in 0..=5 {
        let full = pool(h);
        for w in 1..=6u32 {
            // Wide children draw from the duplicated Int column and the Str one only.
            let pool: Vec<_> = if w <= 4 { full.clone() } else { vec![full[0].clone(), full[2].clone()] };
            for code in 0..pool.len().pow(w) {
                let mut c = code;
                let picks: Vec<&(CType, Vec<Value>)> = (0..w)
                    .map(|_| {
                        let p = &pool[c % pool.len()];
                        c /= pool.len();
                        p
                    })
                    .collect();
                let schema = (0..picks.len()).map(|i| ColumnSchema::new(format!("c{i}"), picks[i].0)).collect();
                let cols = picks.iter().map(|p| p.1.clone()).collect();
                out.push(Table::from_columns(schema, cols).expect("pool columns share a height"));
            }
        }
    }
    out
}

/// Output tables to infer projections for: reorderings and subsets of the
/// child's columns, with all rows and with the last row dropped.
fn outputs(child: &Table) -> Vec<Table> {
    let w = child.width();
    let mut lists = vec![vec![w - 1], (0..w).rev().collect::<Vec<_>>()];
    if w >= 2 {
        lists.push(vec![0, w - 1]);
    }
    if w >= 3 {
        lists.push(vec![w - 1, 0, 0]);
    }
    let mut out = Vec::new();
    for cols in lists {
        let t = eval::project(child, &cols).expect("columns exist");
        if t.height() > 1 {
            out.push(t.take_rows(&(0..t.height() - 1).collect::<Vec<_>>()));
        }
        out.push(t);
    }
    out
}

type Survivors = BTreeSet<Vec<usize>>;

fn survivors(stream: impl Iterator<Item = Candidate>) -> Survivors {
    stream
        .map(|c| match &*c.program {
            Program::Project { cols, .. } => cols.clone(),
            other => panic!("not a projection: {other}"),
        })
        .collect()
}

pub fn oracle() -> Verdict {
    let config = Config::default();
    let inputs = Inputs::new();
    let (mut cases, mut nonempty) = (0usize, 0usize);
    let mut discrepancies = Vec::new();
    let tables = children();
    for child in &tables {
        let cand = Candidate { program: Arc::new(Program::table("t")), table: Arc::new(child.clone()) };
        for tout in outputs(child) {
            let ctx = Context::new(&inputs, &tout, &[], &config, &Frozen);
            for rel in ColRel::ALL {
                let phi = Phi::Rel(Mode::Positional, rel);
                let fast = survivors(fast_projections(&ctx, cand.clone(), phi));
                let slow = survivors(baseline_projections(&ctx, cand.clone(), phi));
                cases += 1;
                nonempty += usize::from(!slow.is_empty());
                if fast != slow && discrepancies.len() < 5 {
                    discrepancies.push(format!(
                        "{}x{} child, {phi}: fast {fast:?} baseline {slow:?}",
                        child.height(),
                        child.width()
                    ));
                }
            }
        }
    }
    if cases < 1000 {
        return Err(format!("only {cases} cases"));
    }
    if discrepancies.is_empty() {
        Ok(format!("{cases} cases over {} child tables, {nonempty} with survivors, zero discrepancies", tables.len()))
    } else {
        Err(discrepancies.join("; "))
    }
}
