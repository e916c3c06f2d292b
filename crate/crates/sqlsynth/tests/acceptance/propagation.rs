//! Propagation soundness: whenever a constraint holds for an operator's
//! result, the propagated constraint holds for each of its children.

use sqlsynth_core::complete::prims;
use sqlsynth_core::eval::{distinct, group, join, left_join, order, project, select, window};
use sqlsynth_core::{
    phi_holds, AggCol, AggFunc, CType, Clause, ColumnSchema, OpKind, Phi, Predicate, SortKey, Table, Value, WinCol,
    WinFunc,
};

use crate::Verdict;

/// Tables of at most 4 rows and 4 columns over a few small column vectors.
fn corpus() -> Vec<Table> {
    let mut out = Vec::new();
    for h in 0..=4usize {
        let pool: Vec<(CType, Vec<Value>)> = vec![
            (CType::Int, (0..h).map(|r| Value::Int((r % 2) as i64 + 1)).collect()),
            (CType::Int, (0..h).map(|r| if r == 1 { Value::Null } else { Value::Int(r as i64) }).collect()),
            (CType::Str, (0..h).map(|r| Value::str(["x", "y", "x", "z"][r])).collect()),
        ];
        for w in 1..=4u32 {
            for code in 0..pool.len().pow(w) {
                let mut c = code;
                let mut schema = Vec::new();
                let mut cols = Vec::new();
                for i in 0..w {
                    let (t, v) = &pool[c % pool.len()];
                    c /= pool.len();
                    schema.push(ColumnSchema::new(format!("c{i}"), *t));
                    cols.push(v.clone());
                }
                out.push(Table::from_columns(schema, cols).expect("equal heights"));
            }
        }
    }
    out
}

/// Every single-operator result over `t` that the checks exercise, with its kind.
fn instances(t: &Table, other: &Table) -> Vec<(OpKind, Table)> {
    let w = t.width();
    let mut out = Vec::new();
    for c in 0..w {
        for key in [SortKey::asc(c), SortKey::desc(c)] {
            out.push((OpKind::Order, order(t, &[key]).unwrap()));
        }
    }
    out.push((OpKind::Distinct, distinct(t)));
    for a in 0..w {
        out.push((OpKind::Project, project(t, &[a]).unwrap()));
        for b in 0..w {
            if a != b {
                out.push((OpKind::Project, project(t, &[b, a]).unwrap()));
            }
        }
    }
    let ps = prims(t, &[Value::Int(1), Value::str("x")]);
    for p in &ps {
        out.push((OpKind::Select, select(t, &Predicate::prim(p.clone())).unwrap()));
    }
    for pair in ps.windows(2).step_by(3) {
        let or = Predicate(vec![Clause(pair.to_vec())]);
        out.push((OpKind::Select, select(t, &or).unwrap()));
        let and = Predicate::prim(pair[0].clone()).and(Predicate::prim(pair[1].clone()));
        out.push((OpKind::Select, select(t, &and).unwrap()));
    }
    let keysets: Vec<Vec<usize>> = std::iter::once(vec![]).chain((0..w).map(|k| vec![k])).collect();
    for keys in &keysets {
        for c in 0..w {
            for func in AggFunc::ALL {
                if func.accepts(t.ctype(c)) {
                    out.push((OpKind::Group, group(t, keys, &[AggCol { func, col: c }]).unwrap()));
                }
            }
        }
        for func in WinFunc::ALL {
            for target in 0..w {
                if func.accepts(t.ctype(target)) {
                    let win = WinCol { func, target, partition: keys.clone(), key: SortKey::asc(w - 1) };
                    out.push((OpKind::Window, window(t, &[win]).unwrap()));
                }
            }
        }
    }
    for a in 0..w {
        for b in 0..other.width() {
            if t.ctype(a).comparable_with(other.ctype(b)) {
                out.push((OpKind::Join, join(t, other, &[(a, b)]).unwrap()));
                out.push((OpKind::LeftJoin, left_join(t, other, (a, b)).unwrap()));
            }
        }
    }
    out
}

/// Output tables related to `parent`: its row subsets under a few column selections.
fn outputs(parent: &Table) -> Vec<Table> {
    let w = parent.width();
    let h = parent.height();
    let mut lists = vec![(0..w).collect::<Vec<_>>(), vec![0], vec![w - 1]];
    if w >= 2 {
        lists.push(vec![w - 1, 0]);
    }
    let mut out = Vec::new();
    for cols in lists {
        let p = project(parent, &cols).unwrap();
        let subsets = if h <= 4 { 1usize << h } else { 1 };
        for mask in 0..subsets {
            let rows: Vec<usize> = (0..h).filter(|r| mask & (1 << r) != 0).collect();
            out.push(p.take_rows(&rows));
        }
        if h > 4 {
            out.push(p);
        }
    }
    out
}

pub fn soundness() -> Verdict {
    let tables = corpus();
    let partner = &tables[tables.len() / 2];
    let (mut checked, mut premises) = (0u64, 0u64);
    let mut kinds = std::collections::BTreeSet::new();
    let mut failures = Vec::new();
    for child in &tables {
        for (kind, parent) in instances(child, partner) {
            kinds.insert(kind);
            for tout in outputs(&parent) {
                for phi in Phi::all() {
                    checked += 1;
                    if !phi_holds(phi, &tout, &parent) {
                        continue;
                    }
                    premises += 1;
                    let down = phi.propagate(kind);
                    let mut kids = vec![child];
                    if matches!(kind, OpKind::Join | OpKind::LeftJoin) {
                        kids.push(partner);
                    }
                    if kids.iter().any(|k| !phi_holds(down, &tout, k)) && failures.len() < 5 {
                        failures.push(format!("{} under {phi}: child {}x{}", kind.name(), child.height(), child.width()));
                    }
                }
            }
        }
    }
    if kinds.len() != OpKind::ALL.len() {
        return Err(format!("only {} operator kinds exercised", kinds.len()));
    }
    if failures.is_empty() {
        Ok(format!("{checked} (phi, instance, output) triples over {} tables, {premises} with the premise holding", tables.len()))
    } else {
        Err(failures.join("; "))
    }
}
