//! In-memory example tables.
//!
//! Tables are stored column-major. Each column's cells sit behind an `Arc`, so
//! projections and other column-preserving operators share storage with their
//! input instead of copying it.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::value::{CType, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnSchema {
    pub name: Arc<str>,
    pub ctype: CType,
}

impl ColumnSchema {
    pub fn new(name: impl Into<Arc<str>>, ctype: CType) -> Self {
        ColumnSchema { name: name.into(), ctype }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("column name must not be empty (column {0})")]
    EmptyName(usize),
    #[error("row {row} has {found} cells, expected {expected}")]
    RowWidth { row: usize, found: usize, expected: usize },
    #[error("cell ({row}, {col}) holds a {found} value in a {expected} column")]
    CellType { row: usize, col: usize, found: CType, expected: CType },
    #[error("column {col} has {found} cells, expected {expected}")]
    ColumnLength { col: usize, found: usize, expected: usize },
}

/// An ordered list of typed columns plus rows of nullable values.
///
/// Column identity is positional; names are display metadata only.
#[derive(Clone)]
pub struct Table {
    schema: Vec<ColumnSchema>,
    columns: Vec<Arc<[Value]>>,
    rows: usize,
}

impl Table {
    /// Builds a table from row-major data, validating widths and cell types.
    pub fn from_rows(schema: Vec<ColumnSchema>, rows: Vec<Vec<Value>>) -> Result<Table, TableError> {
        for (i, c) in schema.iter().enumerate() {
            if c.name.is_empty() {
                return Err(TableError::EmptyName(i));
            }
        }
        let width = schema.len();
        let mut columns: Vec<Vec<Value>> = (0..width).map(|_| Vec::with_capacity(rows.len())).collect();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(TableError::RowWidth { row: r, found: row.len(), expected: width });
            }
            for (c, v) in row.iter().enumerate() {
                check_cell(v, schema[c].ctype, r, c)?;
            }
        }
        let nrows = rows.len();
        for row in rows {
            for (c, v) in row.into_iter().enumerate() {
                columns[c].push(v);
            }
        }
        Ok(Table { schema, columns: columns.into_iter().map(Arc::from).collect(), rows: nrows })
    }

    /// Builds a table from column-major data.
    pub fn from_columns(schema: Vec<ColumnSchema>, columns: Vec<Vec<Value>>) -> Result<Table, TableError> {
        let rows = columns.first().map_or(0, Vec::len);
        Table::from_shared_columns(schema, columns.into_iter().map(Arc::from).collect(), rows)
    }

    pub(crate) fn from_shared_columns(
        schema: Vec<ColumnSchema>,
        columns: Vec<Arc<[Value]>>,
        rows: usize,
    ) -> Result<Table, TableError> {
        for (i, c) in schema.iter().enumerate() {
            if c.name.is_empty() {
                return Err(TableError::EmptyName(i));
            }
        }
        if columns.len() != schema.len() {
            return Err(TableError::ColumnLength { col: columns.len(), found: columns.len(), expected: schema.len() });
        }
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(TableError::ColumnLength { col: c, found: col.len(), expected: rows });
            }
            for (r, v) in col.iter().enumerate() {
                check_cell(v, schema[c].ctype, r, c)?;
            }
        }
        Ok(Table { schema, columns, rows })
    }

    /// A table with no columns and `rows` rows.
    pub(crate) fn empty(rows: usize) -> Table {
        Table { schema: Vec::new(), columns: Vec::new(), rows }
    }

    /// Assembles a table whose invariants the caller has already established.
    pub(crate) fn assemble(schema: Vec<ColumnSchema>, columns: Vec<Arc<[Value]>>, rows: usize) -> Table {
        debug_assert_eq!(schema.len(), columns.len());
        debug_assert!(columns.iter().all(|c| c.len() == rows));
        Table { schema, columns, rows }
    }

    pub fn schema(&self) -> &[ColumnSchema] {
        &self.schema
    }

    /// Number of columns.
    pub fn width(&self) -> usize {
        self.schema.len()
    }

    /// Number of rows.
    pub fn height(&self) -> usize {
        self.rows
    }

    pub fn column(&self, i: usize) -> &[Value] {
        &self.columns[i]
    }

    pub(crate) fn shared_column(&self, i: usize) -> &Arc<[Value]> {
        &self.columns[i]
    }

    pub fn ctype(&self, i: usize) -> CType {
        self.schema[i].ctype
    }

    pub fn cell(&self, row: usize, col: usize) -> &Value {
        &self.columns[col][row]
    }

    pub fn row(&self, r: usize) -> Vec<Value> {
        self.columns.iter().map(|c| c[r].clone()).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = Vec<Value>> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    /// Keeps the rows at `indices`, in that order (indices may repeat).
    pub fn take_rows(&self, indices: &[usize]) -> Table {
        let columns = self
            .columns
            .iter()
            .map(|c| indices.iter().map(|&r| c[r].clone()).collect::<Vec<_>>().into())
            .collect();
        Table::assemble(self.schema.clone(), columns, indices.len())
    }

    /// Lexicographic comparison of two rows of this table.
    pub(crate) fn cmp_rows(&self, a: usize, b: usize) -> Ordering {
        for c in &self.columns {
            match c[a].cmp(&c[b]) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

fn check_cell(v: &Value, ctype: CType, row: usize, col: usize) -> Result<(), TableError> {
    match v.ctype() {
        Some(found) if found != ctype => Err(TableError::CellType { row, col, found, expected: ctype }),
        _ => Ok(()),
    }
}

impl fmt::Debug for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Table[")?;
        for (i, c) in self.schema.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", c.name, c.ctype)?;
        }
        writeln!(f, "]")?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.width() {
                if c > 0 {
                    write!(f, " | ")?;
                }
                write!(f, "{}", self.cell(r, c))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Compares an expected table against an actual one.
///
/// Widths and column types are compared positionally (names are ignored).
/// Rows are compared as a sequence when `as_list`, as a multiset otherwise.
pub fn tables_equal(expected: &Table, actual: &Table, as_list: bool) -> bool {
    if expected.width() != actual.width() || expected.height() != actual.height() {
        return false;
    }
    if expected.schema.iter().zip(&actual.schema).any(|(a, b)| a.ctype != b.ctype) {
        return false;
    }
    if as_list {
        return expected.columns.iter().zip(&actual.columns).all(|(a, b)| a == b);
    }
    let sorted = |t: &Table| {
        let mut idx: Vec<usize> = (0..t.rows).collect();
        idx.sort_by(|&a, &b| t.cmp_rows(a, b));
        idx
    };
    let (ie, ia) = (sorted(expected), sorted(actual));
    ie.iter().zip(&ia).all(|(&re, &ra)| {
        expected.columns.iter().zip(&actual.columns).all(|(ce, ca)| ce[re] == ca[ra])
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Asc,
    Desc,
}

/// The ordering `Order` uses for one key: Nulls first under `Asc`, last under `Desc`.
pub fn cmp_directed(a: &Value, b: &Value, dir: Direction) -> Ordering {
    match dir {
        Direction::Asc => a.cmp(b),
        Direction::Desc => b.cmp(a),
    }
}

/// Whether `values` never decreases under `dir`.
pub(crate) fn is_monotone<'a>(mut values: impl Iterator<Item = &'a Value>, dir: Direction) -> bool {
    let Some(mut prev) = values.next() else {
        return true;
    };
    for v in values {
        if cmp_directed(prev, v, dir) == Ordering::Greater {
            return false;
        }
        prev = v;
    }
    true
}

/// The sorted columns of a table, and whether that makes the table "sorted".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedReport {
    pub columns: Vec<(usize, Direction)>,
}

impl SortedReport {
    pub fn is_sorted(&self) -> bool {
        !self.columns.is_empty()
    }
}

/// Reports every non-constant column that is monotone over the rows.
///
/// Tables with fewer than two rows carry no ordering evidence and report nothing.
pub fn detect_sorted(t: &Table) -> SortedReport {
    let mut columns = Vec::new();
    if t.height() >= 2 {
        for i in 0..t.width() {
            let col = t.column(i);
            if col.iter().all(|v| *v == col[0]) {
                continue;
            }
            for dir in [Direction::Asc, Direction::Desc] {
                if is_monotone(col.iter(), dir) {
                    columns.push((i, dir));
                }
            }
        }
    }
    SortedReport { columns }
}
