//! Single-operator queries over generated tables of growing size.

use std::time::Duration;

use sqlsynth::bench::{generate, Query};
use sqlsynth::clock::Stopwatch;
use sqlsynth_core::{synthesize, verify, ProjectionMode, Status};

use crate::Verdict;

const ROWS: [usize; 3] = [10, 100, 1000];
const COLS: [usize; 4] = [1, 10, 50, 100];
const FAST_LIMIT: Duration = Duration::from_secs(5);
const BASELINE_LIMIT: Duration = Duration::from_secs(10);

fn solve(query: Query, rows: usize, cols: usize, mode: ProjectionMode, timeout_ms: u64) -> (Status, Duration, bool) {
    let mut p = generate(query, rows, cols, (rows * 31 + cols) as u64);
    p.config.timeout_ms = timeout_ms;
    p.config.projection = mode;
    let clock = Stopwatch::start();
    let r = synthesize(&p, &clock, &mut ());
    let elapsed = clock.elapsed();
    let verified = r.program.as_ref().is_some_and(|prog| verify(prog, &p));
    (r.status, elapsed, verified)
}

pub fn fast_points() -> Verdict {
    let mut slowest = (Duration::ZERO, String::new());
    let mut bad = Vec::new();
    for q in Query::ALL {
        for rows in ROWS {
            for cols in COLS {
                let (status, t, verified) = solve(q, rows, cols, ProjectionMode::Fast, FAST_LIMIT.as_millis() as u64);
                let point = format!("{} {rows}x{cols}", q.name());
                if status != Status::Solved || !verified || t > FAST_LIMIT {
                    bad.push(format!("{point}: {} in {:.0} ms", status.name(), t.as_secs_f64() * 1e3));
                }
                if t > slowest.0 {
                    slowest = (t, point);
                }
            }
        }
    }
    let n = Query::ALL.len() * ROWS.len() * COLS.len();
    if bad.is_empty() {
        Ok(format!("{n} points solved and verified, slowest {} at {:.1} ms", slowest.1, slowest.0.as_secs_f64() * 1e3))
    } else {
        Err(bad.join("; "))
    }
}

fn median(query: Query, rows: usize, cols: usize) -> Duration {
    let mut runs: Vec<Duration> = (0..5).map(|_| solve(query, rows, cols, ProjectionMode::Fast, 5_000).1).collect();
    runs.sort();
    runs[2]
}

pub fn growth() -> Verdict {
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for q in Query::ALL {
        for rows in ROWS {
            let (t10, t100) = (median(q, rows, 10), median(q, rows, 100));
            let ratio = t100.as_secs_f64() / t10.as_secs_f64().max(1e-9);
            worst = worst.max(ratio);
            if t100 > t10 * 100 {
                bad.push(format!("{} rows={rows}: t(100)/t(10) = {ratio:.1}", q.name()));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("t(100 cols) / t(10 cols) at most {worst:.1} over 9 settings (bound 100)"))
    } else {
        Err(bad.join("; "))
    }
}

pub fn baseline_struggles() -> Verdict {
    let mut seen = Vec::new();
    let mut bad = Vec::new();
    for cols in [10, 50, 100] {
        let (status, t, _) = solve(Query::Q1, 100, cols, ProjectionMode::Baseline, BASELINE_LIMIT.as_millis() as u64);
        let line = format!("{cols} cols: {} after {:.2} s", status.name(), t.as_secs_f64());
        if status == Status::Solved && t <= BASELINE_LIMIT {
            bad.push(line);
        } else {
            seen.push(line);
        }
    }
    if bad.is_empty() {
        Ok(format!("q1 with 100 rows under baseline projection: {}", seen.join(", ")))
    } else {
        Err(format!("baseline solved within 10 s: {}", bad.join(", ")))
    }
}
