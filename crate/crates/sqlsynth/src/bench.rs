//! The controlled scalability experiment: three one-operator queries over
//! generated tables of growing size.
//!
//! - q1: `SELECT * FROM t`
//! - q2: `SELECT * FROM t WHERE c1 = 'T'`
//! - q3: `SELECT COUNT(*) FROM t`

use std::io::Write;
use std::str::FromStr;
use std::time::Duration;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use sqlsynth_core::{
    detect_sorted, synthesize, CType, ColumnSchema, Inputs, Problem, ProjectionMode, Status, Table, Value,
};

use crate::clock::Stopwatch;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Query {
    Q1,
    Q2,
    Q3,
}

impl Query {
    pub const ALL: [Query; 3] = [Query::Q1, Query::Q2, Query::Q3];

    pub fn name(self) -> &'static str {
        match self {
            Query::Q1 => "q1",
            Query::Q2 => "q2",
            Query::Q3 => "q3",
        }
    }
}

impl FromStr for Query {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "q1" => Ok(Query::Q1),
            "q2" => Ok(Query::Q2),
            "q3" => Ok(Query::Q3),
            _ => Err(format!("unknown query `{s}` (expected q1, q2 or q3)")),
        }
    }
}

/// First cell value; far above any row count so no count can collide with a cell.
const BASE: i64 = 1_000_000;

/// Builds the input and expected output for `query` over a `rows × cols` table.
///
/// Integer cells are pairwise distinct. For q2, column `c1` holds `'T'` in
/// half of the rows (rounded up) and `'F'` elsewhere. Rows are shuffled until
/// the output shows no sort order, so every query is matched as a multiset.
pub fn generate(query: Query, rows: usize, cols: usize, seed: u64) -> Problem {
    assert!(cols >= 1, "tables need at least one column");
    let mut rng = StdRng::seed_from_u64(seed);
    let mut cells: Vec<i64> = (0..(rows * cols) as i64).map(|k| BASE + k).collect();
    cells.shuffle(&mut rng);
    let flag_col = (query == Query::Q2).then_some(0);
    let schema: Vec<ColumnSchema> = (0..cols)
        .map(|c| ColumnSchema::new(format!("c{}", c + 1), if Some(c) == flag_col { CType::Str } else { CType::Int }))
        .collect();
    let mut data: Vec<Vec<Value>> = (0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| match flag_col {
                    Some(f) if f == c => Value::str(if r < rows.div_ceil(2) { "T" } else { "F" }),
                    _ => Value::Int(cells[r * cols + c]),
                })
                .collect()
        })
        .collect();
    loop {
        data.shuffle(&mut rng);
        let input = Table::from_rows(schema.clone(), data.clone()).expect("generated rows are well-typed");
        let output = match query {
            Query::Q1 => input.clone(),
            Query::Q2 => {
                let keep: Vec<usize> = (0..rows).filter(|&r| input.cell(r, 0) == &Value::str("T")).collect();
                input.take_rows(&keep)
            }
            Query::Q3 => Table::from_rows(vec![ColumnSchema::new("count", CType::Int)], vec![vec![Value::Int(rows as i64)]])
                .expect("one Int cell"),
        };
        if !detect_sorted(&output).is_sorted() {
            let constants = if query == Query::Q2 { vec![Value::str("T")] } else { Vec::new() };
            return Problem::new(Inputs::new().with("t", input), output, constants);
        }
    }
}

#[derive(Clone, Debug)]
pub struct Measurement {
    pub query: Query,
    pub rows: usize,
    pub cols: usize,
    pub mode: ProjectionMode,
    pub status: Status,
    pub elapsed: Duration,
    /// The synthesized program in DSL notation, when solved.
    pub program: Option<String>,
}

pub fn mode_name(mode: ProjectionMode) -> &'static str {
    match mode {
        ProjectionMode::Fast => "fast",
        ProjectionMode::Baseline => "baseline",
    }
}

/// Synthesizes one generated problem and times it.
pub fn run_point(query: Query, rows: usize, cols: usize, mode: ProjectionMode, timeout_ms: u64) -> Measurement {
    let mut problem = generate(query, rows, cols, (rows * 1009 + cols) as u64);
    problem.config.timeout_ms = timeout_ms;
    problem.config.projection = mode;
    let clock = Stopwatch::start();
    let result = synthesize(&problem, &clock, &mut ());
    let elapsed = clock.elapsed();
    Measurement { query, rows, cols, mode, status: result.status, elapsed, program: result.program.map(|p| p.to_string()) }
}

#[derive(Clone, Debug)]
pub struct BenchSpec {
    pub queries: Vec<Query>,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub modes: Vec<ProjectionMode>,
    pub timeout_ms: u64,
}

/// Runs every (query, rows, cols, mode) point, reporting each as it finishes.
pub fn run_scale_bench(spec: &BenchSpec, mut on_point: impl FnMut(&Measurement)) -> Vec<Measurement> {
    let mut out = Vec::new();
    for &query in &spec.queries {
        for &rows in &spec.rows {
            for &cols in &spec.cols {
                for &mode in &spec.modes {
                    let m = run_point(query, rows, cols, mode, spec.timeout_ms);
                    on_point(&m);
                    out.push(m);
                }
            }
        }
    }
    out
}

pub fn write_csv(measurements: &[Measurement], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["query", "rows", "cols", "mode", "status", "elapsed_ms"])?;
    for m in measurements {
        let elapsed = match m.status {
            Status::Solved => format!("{:.3}", m.elapsed.as_secs_f64() * 1e3),
            Status::Timeout => "TIMEOUT".to_owned(),
            Status::Exhausted => "EXHAUSTED".to_owned(),
        };
        w.write_record([
            m.query.name(),
            &m.rows.to_string(),
            &m.cols.to_string(),
            mode_name(m.mode),
            m.status.name(),
            &elapsed,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `10,100,1000`, `1..300` (inclusive) or `1..300:10` (with a step), or a mix.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a size"));
        match part.split_once("..") {
            None => out.push(num(part)?),
            Some((lo, rest)) => {
                let (hi, step) = match rest.split_once(':') {
                    Some((hi, step)) => (num(hi)?, num(step)?),
                    None => (num(rest)?, 1),
                };
                let lo = num(lo)?;
                if step == 0 || lo > hi {
                    return Err(format!("empty range `{part}`"));
                }
                out.extend((lo..=hi).step_by(step));
            }
        }
    }
    if out.contains(&0) {
        return Err("sizes must be positive".into());
    }
    Ok(out)
}
