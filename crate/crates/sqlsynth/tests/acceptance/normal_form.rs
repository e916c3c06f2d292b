//! Sketch normal form, smallest solutions and reproducibility.

use std::collections::BTreeSet;
use std::path::Path;

use sqlsynth::bench::{generate, Query};
use sqlsynth::problem_file::load_problem;
use sqlsynth_core::{
    synthesize, verify, AggCol, AggFunc, CType, ColumnSchema, Frozen, Inputs, OpKind, Problem, Program, Sketch,
    SortKey, Status, Table, Value, WinCol, WinFunc,
};
use std::sync::Arc;

use crate::Verdict;

/// Permitted parent/child pairs. Rows are parents in [`OpKind::ALL`] order;
/// columns are the same kinds followed by a table leaf.
const MATRIX: [&str; 8] = [
    "-YYYYYYYY", // Order
    "--YYYYYYY", // Distinct
    "---YYYYYY", // Project
    "----YYYYY", // Select
    "---YYYYYY", // Group
    "---YYYYYY", // Window
    "----YYYYY", // Join
    "---YYYYYY", // LeftJoin
];

fn index(kind: Option<OpKind>) -> usize {
    kind.map_or(8, |k| OpKind::ALL.iter().position(|&x| x == k).expect("listed kind"))
}

fn legal(s: &Sketch) -> bool {
    let Some(k) = s.kind() else { return true };
    s.children().into_iter().all(|c| MATRIX[index(Some(k))].as_bytes()[index(c.kind())] == b'Y' && legal(c))
}

pub fn matrix() -> Verdict {
    const MAX_SIZE: usize = 6;
    let mut frontier = vec![Sketch::Hole, Sketch::fresh(OpKind::Order)];
    let mut seen: BTreeSet<Sketch> = frontier.iter().cloned().collect();
    let mut bad = Vec::new();
    while let Some(s) = frontier.pop() {
        for e in s.expand() {
            if !legal(&e) && bad.len() < 5 {
                bad.push(e.to_string());
            }
            if e.clone().canonical() != e && bad.len() < 5 {
                bad.push(format!("not canonical: {e}"));
            }
            if e.size() <= MAX_SIZE && seen.insert(e.clone()) {
                frontier.push(e);
            }
        }
    }
    // A parent/child pair is reachable by expansion exactly when the matrix permits it.
    let mut pairs = 0;
    for (p, row) in MATRIX.iter().enumerate() {
        for (c, mark) in row.bytes().enumerate().take(8) {
            let (pk, ck) = (OpKind::ALL[p], OpKind::ALL[c]);
            let inner = || Box::new(Sketch::fresh(ck));
            let shapes = match pk {
                OpKind::Join => vec![Sketch::Join(inner(), Box::new(Sketch::Hole))],
                OpKind::LeftJoin => vec![
                    Sketch::LeftJoin(inner(), Box::new(Sketch::Hole)),
                    Sketch::LeftJoin(Box::new(Sketch::Hole), inner()),
                ],
                _ => vec![Sketch::unary(pk, Sketch::fresh(ck))],
            };
            for shape in shapes {
                let reachable = seen.contains(&shape.clone().canonical());
                if (mark == b'Y') != reachable {
                    bad.push(format!("{shape}: matrix {}, reachable {reachable}", mark as char));
                }
                pairs += 1;
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{} sketches up to size {MAX_SIZE} satisfy the matrix; {pairs} parent/child pairs checked", seen.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn ints(names: &[&str], rows: &[&[i64]]) -> Table {
    let schema = names.iter().map(|n| ColumnSchema::new(*n, CType::Int)).collect();
    Table::from_rows(schema, rows.iter().map(|r| r.iter().map(|&k| Value::Int(k)).collect()).collect()).unwrap()
}

/// Problems with a known solution whose size bounds the synthesized one.
fn fixtures() -> Vec<(&'static str, Problem, Program)> {
    let t = ints(&["k", "v"], &[&[3, 30], &[1, 20], &[3, 10], &[2, 40], &[1, 50]]);
    let env = |t: &Table| Inputs::new().with("t", t.clone());
    let leaf = || Arc::new(Program::table("t"));
    let mut out = Vec::new();

    let distinct = Program::Distinct { child: Arc::new(Program::Project { child: leaf(), cols: vec![0] }) };
    let keys = ints(&["k"], &[&[3], &[1], &[2]]);
    out.push(("distinct keys", Problem::new(env(&t), keys, vec![]), distinct));

    let sorted = Program::Order { child: Arc::new(Program::Project { child: leaf(), cols: vec![1, 0] }), keys: vec![SortKey::desc(0)] };
    let desc = ints(&["v", "k"], &[&[50, 1], &[40, 2], &[30, 3], &[20, 1], &[10, 3]]);
    out.push(("order by value", Problem::new(env(&t), desc, vec![]), sorted));

    let sums = Program::Project {
        child: Arc::new(Program::Group { child: leaf(), keys: vec![0], aggs: vec![AggCol { func: AggFunc::Sum, col: 1 }] }),
        cols: vec![0, 1],
    };
    let by_key = ints(&["k", "s"], &[&[3, 40], &[1, 70], &[2, 40]]);
    out.push(("sum per key", Problem::new(env(&t), by_key, vec![]), sums));

    let rank = WinCol { func: WinFunc::Rank, target: 0, partition: vec![0], key: SortKey::asc(1) };
    let ranked = Program::Project { child: Arc::new(Program::Window { child: leaf(), wins: vec![rank] }), cols: vec![1, 2] };
    let ranks = ints(&["v", "r"], &[&[30, 2], &[20, 1], &[10, 1], &[40, 1], &[50, 2]]);
    out.push(("rank within key", Problem::new(env(&t), ranks, vec![]), ranked));

    let fig1 = load_problem(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/fig1.json")).unwrap();
    let is_t = sqlsynth_core::Predicate::prim(sqlsynth_core::Prim::Cmp {
        col: 3,
        op: sqlsynth_core::BinOp::Eq,
        value: Value::str("T"),
    });
    let sel = Program::Select { child: Arc::new(Program::table("items")), pred: is_t };
    let g = Program::Group { child: Arc::new(sel), keys: vec![0], aggs: vec![AggCol { func: AggFunc::Max, col: 2 }] };
    let j = Program::Join { left: Arc::new(g), right: Arc::new(Program::table("items")), pairs: vec![(0, 0), (1, 2)] };
    let pr = Program::Project { child: Arc::new(j), cols: vec![0, 3, 4, 6, 7, 8] };
    let known = Program::Order { child: Arc::new(pr), keys: vec![SortKey::asc(0)] };
    out.push(("latest row per item", fig1, known));

    for (name, q) in [("q1", Query::Q1), ("q2", Query::Q2), ("q3", Query::Q3)] {
        let p = generate(q, 20, 4, 9);
        let known = match q {
            Query::Q1 => Program::Project { child: leaf(), cols: vec![0, 1, 2, 3] },
            Query::Q2 => Program::Project {
                child: Arc::new(Program::Select {
                    child: leaf(),
                    pred: sqlsynth_core::Predicate::prim(sqlsynth_core::Prim::Cmp {
                        col: 0,
                        op: sqlsynth_core::BinOp::Eq,
                        value: Value::str("T"),
                    }),
                }),
                cols: vec![0, 1, 2, 3],
            },
            Query::Q3 => Program::Project {
                child: Arc::new(Program::Group { child: leaf(), keys: vec![], aggs: vec![AggCol { func: AggFunc::CountStar, col: 0 }] }),
                cols: vec![0],
            },
        };
        out.push((name, p, known));
    }
    out
}

pub fn minimality() -> Verdict {
    let mut lines = Vec::new();
    let mut bad = Vec::new();
    for (name, problem, known) in fixtures() {
        if !verify(&known, &problem) {
            bad.push(format!("{name}: known solution {known} does not verify"));
            continue;
        }
        let r = synthesize(&problem, &Frozen, &mut ());
        match r.program {
            Some(p) if r.status == Status::Solved && verify(&p, &problem) && p.size() <= known.size() => {
                lines.push(format!("{name} {}<={}", p.size(), known.size()));
            }
            Some(p) => bad.push(format!("{name}: {p} (size {}, known {})", p.size(), known.size())),
            None => bad.push(format!("{name}: {}", r.status.name())),
        }
    }
    if bad.is_empty() {
        Ok(lines.join(", "))
    } else {
        Err(bad.join("; "))
    }
}

pub fn determinism() -> Verdict {
    let mut bad = Vec::new();
    let fixtures = fixtures();
    for (name, problem, _) in &fixtures {
        let run = || {
            let r = synthesize(problem, &Frozen, &mut ());
            (r.status, r.program.map(|p| p.to_string()), r.sql, r.stats.sketches_tried)
        };
        let (a, b) = (run(), run());
        if a != b {
            bad.push(format!("{name}: {a:?} vs {b:?}"));
        }
    }
    if bad.is_empty() {
        Ok(format!("{} fixtures give identical programs, SQL and sketch counts on two runs", fixtures.len()))
    } else {
        Err(bad.join("; "))
    }
}
