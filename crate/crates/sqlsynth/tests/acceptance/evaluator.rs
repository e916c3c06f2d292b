//! Hand-computed results of the evaluator on two small tables with Nulls.

use std::collections::BTreeSet;
use std::sync::Arc;

use sqlsynth_core::{
    eval, AggCol, AggFunc, BinOp, CType, Clause, ColumnSchema, Date, Inputs, OpKind, Predicate, Prim, Program, SortKey,
    Table, Value, WinCol, WinFunc,
};

use crate::Verdict;

use Value::{Int, Null};

fn s(x: &str) -> Value {
    Value::str(x)
}

fn d(x: &str) -> Value {
    Value::Date(x.parse::<Date>().unwrap())
}

fn f(x: f64) -> Value {
    Value::dbl(x).unwrap()
}

/// emp(id, dept, sal, bonus, hired) and dept(name, floor).
fn inputs() -> Inputs {
    let emp = Table::from_rows(
        vec![
            ColumnSchema::new("id", CType::Int),
            ColumnSchema::new("dept", CType::Str),
            ColumnSchema::new("sal", CType::Int),
            ColumnSchema::new("bonus", CType::Dbl),
            ColumnSchema::new("hired", CType::Date),
        ],
        vec![
            vec![Int(1), s("a"), Int(10), f(1.5), d("2020-01-01")],
            vec![Int(2), s("a"), Int(30), Null, d("2021-06-01")],
            vec![Int(3), s("b"), Int(20), f(2.5), d("2019-03-15")],
            vec![Int(4), s("b"), Null, f(0.5), d("2022-02-02")],
            vec![Int(5), Null, Int(20), Null, d("2020-01-01")],
        ],
    )
    .unwrap();
    let dept = Table::from_rows(
        vec![ColumnSchema::new("name", CType::Str), ColumnSchema::new("floor", CType::Int)],
        vec![vec![s("a"), Int(1)], vec![s("b"), Int(2)], vec![s("c"), Int(3)]],
    )
    .unwrap();
    Inputs::new().with("emp", emp).with("dept", dept)
}

fn emp() -> Arc<Program> {
    Arc::new(Program::table("emp"))
}

fn cmp(col: usize, op: BinOp, value: Value) -> Prim {
    Prim::Cmp { col, op, value }
}

fn sel(pred: Predicate) -> Program {
    Program::Select { child: emp(), pred }
}

fn one(p: Prim) -> Predicate {
    Predicate::prim(p)
}

fn any(ps: Vec<Prim>) -> Clause {
    Clause(ps)
}

fn proj(child: Program, cols: &[usize]) -> Program {
    Program::Project { child: Arc::new(child), cols: cols.to_vec() }
}

fn grp(keys: &[usize], aggs: &[(AggFunc, usize)]) -> Program {
    Program::Group {
        child: emp(),
        keys: keys.to_vec(),
        aggs: aggs.iter().map(|&(func, col)| AggCol { func, col }).collect(),
    }
}

/// `Window` over emp, projected to (id, new column).
fn win(func: WinFunc, target: usize, partition: &[usize], key: SortKey) -> Program {
    let w = WinCol { func, target, partition: partition.to_vec(), key };
    proj(Program::Window { child: emp(), wins: vec![w] }, &[0, 5])
}

fn col(vals: Vec<Value>) -> Vec<Vec<Value>> {
    vals.into_iter().map(|v| vec![v]).collect()
}

fn ids(ks: &[i64]) -> Vec<Vec<Value>> {
    col(ks.iter().map(|&k| Int(k)).collect())
}

fn pairs(rows: &[(i64, Value)]) -> Vec<Vec<Value>> {
    rows.iter().map(|(k, v)| vec![Int(*k), v.clone()]).collect()
}

fn cases() -> Vec<(&'static str, Program, Vec<Vec<Value>>)> {
    use AggFunc as A;
    use BinOp::*;
    use WinFunc as W;
    let id = |p: Program| proj(p, &[0]);
    vec![
        ("table leaf", id(Program::table("emp")), ids(&[1, 2, 3, 4, 5])),
        ("project reorders", proj(Program::table("dept"), &[1, 0]), vec![vec![Int(1), s("a")], vec![Int(2), s("b")], vec![Int(3), s("c")]]),
        ("greater than skips null", id(sel(one(cmp(2, Gt, Int(15))))), ids(&[2, 3, 5])),
        ("not equal skips null", id(sel(one(cmp(2, Ne, Int(20))))), ids(&[1, 2])),
        ("is null", id(sel(one(Prim::IsNull(1)))), ids(&[5])),
        ("is not null", id(sel(one(Prim::IsNotNull(3)))), ids(&[1, 3, 4])),
        ("clause with null test", id(sel(Predicate(vec![any(vec![cmp(2, Lt, Int(15)), Prim::IsNull(2)])]))), ids(&[1, 4])),
        (
            "cnf of two clauses",
            id(sel(Predicate(vec![any(vec![cmp(1, Eq, s("a")), cmp(1, Eq, s("b"))]), any(vec![cmp(2, Ge, Int(20))])]))),
            ids(&[2, 3]),
        ),
        ("date comparison", id(sel(one(cmp(4, Le, d("2020-01-01"))))), ids(&[1, 3, 5])),
        ("double comparison", id(sel(one(cmp(3, Gt, f(1.0))))), ids(&[1, 3])),
        ("int compares with double", id(sel(one(cmp(2, Eq, f(20.0))))), ids(&[3, 5])),
        ("and with not null", id(sel(one(Prim::IsNotNull(1)).and(one(cmp(2, Le, Int(20)))))), ids(&[1, 3])),
        ("order asc puts nulls first", id(Program::Order { child: emp(), keys: vec![SortKey::asc(2)] }), ids(&[4, 1, 3, 5, 2])),
        (
            "order desc puts nulls last",
            id(Program::Order { child: emp(), keys: vec![SortKey::desc(1), SortKey::asc(0)] }),
            ids(&[3, 4, 1, 2, 5]),
        ),
        ("order is stable", id(Program::Order { child: emp(), keys: vec![SortKey::asc(4)] }), ids(&[3, 1, 5, 2, 4])),
        (
            "distinct keeps first occurrences",
            Program::Distinct { child: Arc::new(proj(Program::table("emp"), &[2])) },
            col(vec![Int(10), Int(30), Int(20), Null]),
        ),
        (
            "distinct on dates",
            Program::Distinct { child: Arc::new(proj(Program::table("emp"), &[4])) },
            col(vec![d("2020-01-01"), d("2021-06-01"), d("2019-03-15"), d("2022-02-02")]),
        ),
        ("max per group", grp(&[1], &[(A::Max, 2)]), vec![vec![s("a"), Int(30)], vec![s("b"), Int(20)], vec![Null, Int(20)]]),
        ("min per group", grp(&[1], &[(A::Min, 2)]), vec![vec![s("a"), Int(10)], vec![s("b"), Int(20)], vec![Null, Int(20)]]),
        ("count ignores null", grp(&[1], &[(A::Count, 2)]), vec![vec![s("a"), Int(2)], vec![s("b"), Int(1)], vec![Null, Int(1)]]),
        ("sum per group", grp(&[1], &[(A::Sum, 2)]), vec![vec![s("a"), Int(40)], vec![s("b"), Int(20)], vec![Null, Int(20)]]),
        ("avg of doubles", grp(&[1], &[(A::Avg, 3)]), vec![vec![s("a"), f(1.5)], vec![s("b"), f(1.5)], vec![Null, Null]]),
        ("avg of ints", grp(&[], &[(A::Avg, 2)]), col(vec![f(20.0)])),
        ("count distinct", grp(&[], &[(A::CountDistinct, 4)]), col(vec![Int(4)])),
        ("concat with commas", grp(&[], &[(A::ConcatComma, 1)]), col(vec![s("a,a,b,b")])),
        (
            "concat with spaces",
            grp(&[2], &[(A::ConcatSpace, 1)]),
            vec![vec![Int(10), s("a")], vec![Int(30), s("a")], vec![Int(20), s("b")], vec![Null, s("b")]],
        ),
        ("concat with slashes", grp(&[], &[(A::ConcatSlash, 1)]), col(vec![s("a/a/b/b")])),
        ("count star", grp(&[1], &[(A::CountStar, 0)]), vec![vec![s("a"), Int(2)], vec![s("b"), Int(2)], vec![Null, Int(1)]]),
        (
            "several aggregates",
            grp(&[], &[(A::Sum, 2), (A::Count, 2), (A::CountStar, 0)]),
            vec![vec![Int(80), Int(4), Int(5)]],
        ),
        (
            "two grouping keys",
            proj(grp(&[1, 4], &[(A::CountStar, 0)]), &[0, 2]),
            vec![vec![s("a"), Int(1)], vec![s("a"), Int(1)], vec![s("b"), Int(1)], vec![s("b"), Int(1)], vec![Null, Int(1)]],
        ),
        (
            "empty group input",
            Program::Group {
                child: Arc::new(sel(one(cmp(2, Gt, Int(100))))),
                keys: vec![],
                aggs: vec![AggCol { func: A::CountStar, col: 0 }, AggCol { func: A::Sum, col: 2 }],
            },
            vec![vec![Int(0), Null]],
        ),
        (
            "running max",
            win(W::Max, 2, &[1], SortKey::asc(0)),
            pairs(&[(1, Int(10)), (2, Int(30)), (3, Int(20)), (4, Int(20)), (5, Int(20))]),
        ),
        ("running min", win(W::Min, 2, &[], SortKey::asc(0)), pairs(&[(1, Int(10)), (2, Int(10)), (3, Int(10)), (4, Int(10)), (5, Int(10))])),
        ("running count", win(W::Count, 2, &[1], SortKey::asc(0)), pairs(&[(1, Int(1)), (2, Int(2)), (3, Int(1)), (4, Int(1)), (5, Int(1))])),
        (
            "running sum includes peers",
            win(W::Sum, 2, &[], SortKey::asc(2)),
            pairs(&[(1, Int(10)), (2, Int(80)), (3, Int(50)), (4, Null), (5, Int(50))]),
        ),
        ("rank with ties", win(W::Rank, 0, &[], SortKey::desc(2)), pairs(&[(1, Int(4)), (2, Int(1)), (3, Int(2)), (4, Int(5)), (5, Int(2))])),
        ("rank per partition", win(W::Rank, 0, &[1], SortKey::asc(4)), pairs(&[(1, Int(1)), (2, Int(2)), (3, Int(1)), (4, Int(2)), (5, Int(1))])),
        (
            "join skips null keys",
            proj(Program::Join { left: emp(), right: Arc::new(Program::table("dept")), pairs: vec![(1, 0)] }, &[0, 6]),
            pairs(&[(1, Int(1)), (2, Int(1)), (3, Int(2)), (4, Int(2))]),
        ),
        (
            "join on two pairs",
            proj(Program::Join { left: emp(), right: emp(), pairs: vec![(2, 2), (4, 4)] }, &[0, 5]),
            pairs(&[(1, Int(1)), (2, Int(2)), (3, Int(3)), (5, Int(5))]),
        ),
        (
            "left join pads",
            proj(Program::LeftJoin { left: emp(), right: Arc::new(Program::table("dept")), pair: (1, 0) }, &[0, 6]),
            pairs(&[(1, Int(1)), (2, Int(1)), (3, Int(2)), (4, Int(2)), (5, Null)]),
        ),
        (
            "left join keeps unmatched left rows",
            proj(Program::LeftJoin { left: Arc::new(Program::table("dept")), right: emp(), pair: (0, 1) }, &[0, 2]),
            vec![vec![s("a"), Int(1)], vec![s("a"), Int(2)], vec![s("b"), Int(3)], vec![s("b"), Int(4)], vec![s("c"), Null]],
        ),
        (
            "composed query",
            Program::Order {
                child: Arc::new(proj(
                    Program::Group {
                        child: Arc::new(sel(one(Prim::IsNotNull(2)))),
                        keys: vec![1],
                        aggs: vec![AggCol { func: A::Sum, col: 2 }],
                    },
                    &[0, 1],
                )),
                keys: vec![SortKey::desc(1)],
            },
            vec![vec![s("a"), Int(40)], vec![s("b"), Int(20)], vec![Null, Int(20)]],
        ),
    ]
}

/// Operator kinds, aggregate and window functions, and whether some predicate tests Null.
#[derive(Default)]
struct Coverage {
    kinds: BTreeSet<Option<OpKind>>,
    aggs: BTreeSet<AggFunc>,
    wins: BTreeSet<WinFunc>,
    null_tests: bool,
    multi_clause: bool,
}

impl Coverage {
    fn visit(&mut self, p: &Program) {
        self.kinds.insert(p.kind());
        match p {
            Program::Group { aggs, .. } => self.aggs.extend(aggs.iter().map(|a| a.func)),
            Program::Window { wins, .. } => self.wins.extend(wins.iter().map(|w| w.func)),
            Program::Select { pred, .. } => {
                self.null_tests |= pred.prims().any(|p| matches!(p, Prim::IsNull(_) | Prim::IsNotNull(_)));
                self.multi_clause |= pred.0.len() > 1 && pred.0.iter().any(|c| c.0.len() > 1);
            }
            _ => {}
        }
        for c in p.children() {
            self.visit(c);
        }
    }
}

pub fn golden() -> Verdict {
    let env = inputs();
    let cases = cases();
    let mut cov = Coverage::default();
    let mut bad = Vec::new();
    for (name, p, expected) in &cases {
        cov.visit(p);
        match eval(p, &env) {
            Ok(t) => {
                let rows: Vec<Vec<Value>> = t.rows().collect();
                if &rows != expected {
                    bad.push(format!("{name}: got {rows:?}"));
                }
            }
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    let type_errors = [
        grp(&[], &[(AggFunc::Sum, 1)]),
        grp(&[], &[(AggFunc::ConcatComma, 2)]),
        sel(one(cmp(1, BinOp::Eq, Int(1)))),
        Program::Join { left: emp(), right: emp(), pairs: vec![(1, 2)] },
    ];
    for p in &type_errors {
        if eval(p, &env).is_ok() {
            bad.push(format!("{p} should be rejected"));
        }
    }
    if cases.len() < 30 {
        bad.push(format!("only {} cases", cases.len()));
    }
    if cov.kinds.len() != 9 || cov.aggs.len() != 10 || cov.wins.len() != 5 || !cov.null_tests || !cov.multi_clause {
        bad.push(format!(
            "coverage: {} kinds, {} aggregates, {} window functions, null tests {}, CNF {}",
            cov.kinds.len(),
            cov.aggs.len(),
            cov.wins.len(),
            cov.null_tests,
            cov.multi_clause
        ));
    }
    if bad.is_empty() {
        Ok(format!(
            "{} golden cases and {} type errors; all 9 operator kinds, 10 aggregates, 5 window functions, CNF with Null tests",
            cases.len(),
            type_errors.len()
        ))
    } else {
        Err(bad.join("; "))
    }
}
