//! Programming-by-example synthesis of SQL queries.
//!
//! Given input tables and an output table, [`engine::synthesize`] searches an
//! extended relational algebra for a smallest program whose result equals the
//! output. Programs are built in two phases: sketches fix the operator tree,
//! then completion fills in arguments guided by column relations between the
//! output and each intermediate table.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod complete;
pub mod config;
pub mod engine;
pub mod eval;
pub mod minimize;
pub mod phi;
pub mod program;
pub mod sketch;
pub mod sql;
pub mod table;
pub mod value;

pub use config::{Clock, Config, Frozen, ProjectionMode};
pub use engine::{check, synthesize, verify, Observer, Outcome, Problem, ProblemError, SketchRecord, Stats, Status, SynthesisResult};
pub use eval::{eval, EvalError, Inputs};
pub use phi::{column_matches, phi_holds, ColRel, Mode, Phi};
pub use program::{AggCol, AggFunc, BinOp, Clause, OpKind, Predicate, Prim, Program, SortKey, WinCol, WinFunc};
pub use minimize::minimize_columns;
pub use sketch::{Sketch, Worklist};
pub use sql::{to_sql, Dialect};
pub use table::{detect_sorted, tables_equal, ColumnSchema, Direction, SortedReport, Table, TableError};
pub use value::{CType, Date, Value, ValueError};
