//! The latest-row-per-item example: selection, grouping, a two-key self join and ordering.

use std::path::Path;

use sqlsynth::clock::Stopwatch;
use sqlsynth::problem_file::load_problem;
use sqlsynth_core::{synthesize, verify, Program, Status};

use crate::Verdict;

fn shape_ok(p: &Program) -> bool {
    let Program::Order { child, .. } = p else { return false };
    let Program::Project { child, .. } = &**child else { return false };
    let Program::Join { left, right, pairs } = &**child else { return false };
    let Program::Group { child: g, .. } = &**left else { return false };
    pairs.len() == 2 && matches!(&**right, Program::Table(_)) && matches!(&**g, Program::Select { .. })
}

/// The equality conditions of the first `JOIN ... ON` clause.
fn join_conditions(sql: &str) -> Vec<&str> {
    let Some(on) = sql.split(" JOIN ").nth(1).and_then(|s| s.split(" ON ").nth(1)) else {
        return Vec::new();
    };
    let on = on.lines().next().unwrap_or("");
    on.split(" AND ").filter(|c| c.contains(" = ")).collect()
}

pub fn latest_row() -> Verdict {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/fig1.json");
    let p = load_problem(&path).map_err(|e| e.to_string())?;
    let clock = Stopwatch::start();
    let r = synthesize(&p, &clock, &mut ());
    let secs = clock.elapsed().as_secs_f64();
    if r.status != Status::Solved {
        return Err(format!("{} after {secs:.2} s", r.status.name()));
    }
    let prog = r.program.expect("solved results carry a program");
    let sql = r.sql.unwrap_or_default();
    let mut problems = Vec::new();
    if !verify(&prog, &p) {
        problems.push("program does not verify".to_owned());
    }
    if prog.size() != 5 {
        problems.push(format!("size {}", prog.size()));
    }
    if !shape_ok(&prog) {
        problems.push(format!("shape {prog}"));
    }
    for kw in ["WHERE", "GROUP BY", "JOIN", "ORDER BY"] {
        if !sql.contains(kw) {
            problems.push(format!("SQL lacks {kw}"));
        }
    }
    let conds = join_conditions(&sql);
    if conds.len() != 2 {
        problems.push(format!("join conditions {conds:?}"));
    }
    if secs > 2.0 {
        problems.push(format!("took {secs:.2} s"));
    }
    if problems.is_empty() {
        Ok(format!("size-5 program in {:.0} ms, join on {}", secs * 1e3, conds.join(" AND ")))
    } else {
        Err(format!("{}; program {prog}", problems.join("; ")))
    }
}
