//! Reference evaluator.
//!
//! Each operator is also exposed as a standalone function over already
//! evaluated tables so sketch completion can apply one operator to a cached
//! child result without re-running the whole subtree.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::program::{AggCol, AggFunc, BinOp, Predicate, Prim, Program, SortKey, WinCol, WinFunc};
use crate::table::{cmp_directed, ColumnSchema, Table};
use crate::value::{CType, Value};

/// Named input tables, in a fixed order.
#[derive(Clone, Debug, Default)]
pub struct Inputs {
    tables: Vec<(Arc<str>, Table)>,
}

impl Inputs {
    pub fn new() -> Self {
        Inputs::default()
    }

    /// Adds or replaces a table.
    pub fn insert(&mut self, name: &str, table: Table) {
        match self.tables.iter_mut().find(|(n, _)| &**n == name) {
            Some(slot) => slot.1 = table,
            None => self.tables.push((Arc::from(name), table)),
        }
    }

    pub fn with(mut self, name: &str, table: Table) -> Self {
        self.insert(name, table);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|(n, _)| &**n == name).map(|(_, t)| t)
    }

    pub fn names(&self) -> impl Iterator<Item = &Arc<str>> {
        self.tables.iter().map(|(n, _)| n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Table)> {
        self.tables.iter().map(|(n, t)| (&**n, t))
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound table `{0}`")]
    UnboundTable(String),
    #[error("{node}: column #{} out of range (table has {arity} columns)", .index + 1)]
    ColumnOutOfRange { node: &'static str, index: usize, arity: usize },
    #[error("{node}: {detail}")]
    Type { node: &'static str, detail: String },
    #[error("{node}: {detail}")]
    Shape { node: &'static str, detail: String },
    #[error("{node}: arithmetic overflow")]
    Overflow { node: &'static str },
}

type Result<T> = core::result::Result<T, EvalError>;

fn check_col(node: &'static str, t: &Table, index: usize) -> Result<()> {
    if index < t.width() {
        Ok(())
    } else {
        Err(EvalError::ColumnOutOfRange { node, index, arity: t.width() })
    }
}

fn type_error(node: &'static str, detail: String) -> EvalError {
    EvalError::Type { node, detail }
}

/// Evaluates `p` against the bound input tables.
pub fn eval(p: &Program, env: &Inputs) -> Result<Table> {
    match p {
        Program::Table(name) => env.get(name).cloned().ok_or_else(|| EvalError::UnboundTable(name.to_string())),
        Program::Order { child, keys } => order(&eval(child, env)?, keys),
        Program::Distinct { child } => Ok(distinct(&eval(child, env)?)),
        Program::Project { child, cols } => project(&eval(child, env)?, cols),
        Program::Select { child, pred } => select(&eval(child, env)?, pred),
        Program::Group { child, keys, aggs } => group(&eval(child, env)?, keys, aggs),
        Program::Window { child, wins } => window(&eval(child, env)?, wins),
        Program::Join { left, right, pairs } => join(&eval(left, env)?, &eval(right, env)?, pairs),
        Program::LeftJoin { left, right, pair } => left_join(&eval(left, env)?, &eval(right, env)?, *pair),
    }
}

/// Number of output columns of `p`, computed without evaluating it.
pub fn arity(p: &Program, env: &Inputs) -> Result<usize> {
    Ok(match p {
        Program::Table(name) => env.get(name).ok_or_else(|| EvalError::UnboundTable(name.to_string()))?.width(),
        Program::Order { child, .. } | Program::Distinct { child } | Program::Select { child, .. } => arity(child, env)?,
        Program::Project { cols, .. } => cols.len(),
        Program::Group { keys, aggs, .. } => keys.len() + aggs.len(),
        Program::Window { child, wins } => arity(child, env)? + wins.len(),
        Program::Join { left, right, .. } | Program::LeftJoin { left, right, .. } => {
            arity(left, env)? + arity(right, env)?
        }
    })
}

pub fn project(t: &Table, cols: &[usize]) -> Result<Table> {
    for &c in cols {
        check_col("Project", t, c)?;
    }
    let schema = cols.iter().map(|&c| t.schema()[c].clone()).collect();
    let columns = cols.iter().map(|&c| t.shared_column(c).clone()).collect();
    Ok(Table::assemble(schema, columns, t.height()))
}

fn check_prim(t: &Table, p: &Prim) -> Result<()> {
    check_col("Select", t, p.col())?;
    if let Prim::Cmp { col, op, value } = p {
        let ct = t.ctype(*col);
        match value.ctype() {
            None => return Err(type_error("Select", "comparison against NULL".into())),
            Some(vt) if !ct.comparable_with(vt) => {
                return Err(type_error("Select", format!("cannot compare {ct} column #{} with {vt}", col + 1)))
            }
            _ => {}
        }
        if op.is_ordering() && !ct.is_ordered() {
            return Err(type_error("Select", format!("operator {} is not defined on {ct}", op.symbol())));
        }
    }
    Ok(())
}

/// Evaluates a primitive test on one cell. Comparisons touching Null are false.
pub fn prim_holds(p: &Prim, cell: &Value) -> bool {
    match p {
        Prim::IsNull(_) => cell.is_null(),
        Prim::IsNotNull(_) => !cell.is_null(),
        Prim::Cmp { op, value, .. } => {
            if cell.is_null() {
                return false;
            }
            let ord = cell.cmp(value);
            match op {
                BinOp::Eq => ord == Ordering::Equal,
                BinOp::Ne => ord != Ordering::Equal,
                BinOp::Lt => ord == Ordering::Less,
                BinOp::Le => ord != Ordering::Greater,
                BinOp::Gt => ord == Ordering::Greater,
                BinOp::Ge => ord != Ordering::Less,
            }
        }
    }
}

pub fn validate_predicate(t: &Table, pred: &Predicate) -> Result<()> {
    if pred.0.is_empty() || pred.0.iter().any(|c| c.0.is_empty()) {
        return Err(EvalError::Shape { node: "Select", detail: "empty predicate or clause".into() });
    }
    pred.prims().try_for_each(|p| check_prim(t, p))
}

pub fn select(t: &Table, pred: &Predicate) -> Result<Table> {
    validate_predicate(t, pred)?;
    let keep: Vec<usize> = (0..t.height())
        .filter(|&r| pred.0.iter().all(|clause| clause.0.iter().any(|p| prim_holds(p, t.cell(r, p.col())))))
        .collect();
    Ok(t.take_rows(&keep))
}

pub fn distinct(t: &Table) -> Table {
    let mut seen = BTreeSet::new();
    let keep: Vec<usize> = (0..t.height()).filter(|&r| seen.insert(t.row(r))).collect();
    t.take_rows(&keep)
}

fn cmp_by_keys(t: &Table, keys: &[SortKey], a: usize, b: usize) -> Ordering {
    for k in keys {
        match cmp_directed(t.cell(a, k.col), t.cell(b, k.col), k.dir) {
            Ordering::Equal => {}
            ord => return ord,
        }
    }
    Ordering::Equal
}

/// Stable sort by `keys` in sequence.
pub fn order(t: &Table, keys: &[SortKey]) -> Result<Table> {
    for k in keys {
        check_col("Order", t, k.col)?;
    }
    let mut idx: Vec<usize> = (0..t.height()).collect();
    idx.sort_by(|&a, &b| cmp_by_keys(t, keys, a, b));
    Ok(t.take_rows(&idx))
}

fn check_agg(t: &Table, a: &AggCol) -> Result<()> {
    if a.func == AggFunc::CountStar {
        return Ok(());
    }
    check_col("Group", t, a.col)?;
    let ct = t.ctype(a.col);
    if a.func.accepts(ct) {
        Ok(())
    } else {
        Err(type_error("Group", format!("{} is not defined on {ct} column #{}", a.func.name(), a.col + 1)))
    }
}

pub(crate) fn agg_name(t: &Table, a: &AggCol) -> String {
    match a.func {
        AggFunc::CountStar => "count(*)".into(),
        f => format!("{}({})", f.name(), t.schema()[a.col].name),
    }
}

fn sum_values<'a>(node: &'static str, ct: CType, vals: impl Iterator<Item = &'a Value>) -> Result<Value> {
    let mut any = false;
    match ct {
        CType::Int => {
            let mut acc: i64 = 0;
            for v in vals {
                if let Value::Int(k) = v {
                    any = true;
                    acc = acc.checked_add(*k).ok_or(EvalError::Overflow { node })?;
                }
            }
            Ok(if any { Value::Int(acc) } else { Value::Null })
        }
        _ => {
            let mut acc = 0.0;
            for v in vals {
                if let Some(x) = v.as_f64() {
                    any = true;
                    acc += x;
                }
            }
            if !any {
                Ok(Value::Null)
            } else {
                Value::dbl(acc).map_err(|_| EvalError::Overflow { node })
            }
        }
    }
}

/// Aggregates the cells of `col` at `rows`.
pub(crate) fn aggregate(t: &Table, a: &AggCol, rows: &[usize]) -> Result<Value> {
    if a.func == AggFunc::CountStar {
        return Ok(Value::Int(rows.len() as i64));
    }
    let col = t.column(a.col);
    let vals = || rows.iter().map(|&r| &col[r]).filter(|v| !v.is_null());
    Ok(match a.func {
        AggFunc::Max => vals().max().cloned().unwrap_or(Value::Null),
        AggFunc::Min => vals().min().cloned().unwrap_or(Value::Null),
        AggFunc::Count => Value::Int(vals().count() as i64),
        AggFunc::CountDistinct => Value::Int(vals().collect::<BTreeSet<_>>().len() as i64),
        AggFunc::Sum => sum_values("Group", t.ctype(a.col), vals())?,
        AggFunc::Avg => {
            let n = vals().count();
            match sum_values("Group", CType::Dbl, vals())? {
                Value::Dbl(s) if n > 0 => Value::dbl(s / n as f64).map_err(|_| EvalError::Overflow { node: "Group" })?,
                _ => Value::Null,
            }
        }
        AggFunc::ConcatComma | AggFunc::ConcatSpace | AggFunc::ConcatSlash => {
            let sep = a.func.separator().unwrap_or(",");
            let mut out = String::new();
            let mut any = false;
            for v in vals() {
                if let Value::Str(s) = v {
                    if any {
                        out.push_str(sep);
                    }
                    out.push_str(s);
                    any = true;
                }
            }
            if any {
                Value::str(&out)
            } else {
                Value::Null
            }
        }
        AggFunc::CountStar => unreachable!(),
    })
}

/// Row groups keyed by `keys`, in order of first occurrence.
///
/// An empty key list forms a single group, even over an empty table.
pub(crate) fn partition_rows(t: &Table, keys: &[usize]) -> Vec<Vec<usize>> {
    if keys.is_empty() {
        return alloc::vec![(0..t.height()).collect()];
    }
    let mut index: BTreeMap<Vec<&Value>, usize> = BTreeMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for r in 0..t.height() {
        let key: Vec<&Value> = keys.iter().map(|&k| t.cell(r, k)).collect();
        let g = *index.entry(key).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(r);
    }
    groups
}

pub fn validate_group(t: &Table, keys: &[usize], aggs: &[AggCol]) -> Result<()> {
    if keys.len() > 2 {
        return Err(EvalError::Shape { node: "Group", detail: "at most two grouping keys".into() });
    }
    for &k in keys {
        check_col("Group", t, k)?;
    }
    aggs.iter().try_for_each(|a| check_agg(t, a))
}

pub fn group(t: &Table, keys: &[usize], aggs: &[AggCol]) -> Result<Table> {
    validate_group(t, keys, aggs)?;
    let groups = partition_rows(t, keys);
    group_partitioned(t, keys, aggs, &groups)
}

pub(crate) fn group_partitioned(t: &Table, keys: &[usize], aggs: &[AggCol], groups: &[Vec<usize>]) -> Result<Table> {
    let mut schema: Vec<ColumnSchema> = keys.iter().map(|&k| t.schema()[k].clone()).collect();
    let mut columns: Vec<Arc<[Value]>> = keys
        .iter()
        .map(|&k| groups.iter().map(|g| t.cell(g[0], k).clone()).collect::<Vec<_>>().into())
        .collect();
    for a in aggs {
        let in_type = if a.func == AggFunc::CountStar { CType::Int } else { t.ctype(a.col) };
        schema.push(ColumnSchema::new(agg_name(t, a), a.func.result_type(in_type)));
        let col = groups.iter().map(|g| aggregate(t, a, g)).collect::<Result<Vec<_>>>()?;
        columns.push(col.into());
    }
    Ok(Table::assemble(schema, columns, groups.len()))
}

pub(crate) fn win_name(t: &Table, w: &WinCol) -> String {
    match w.func {
        WinFunc::Rank => "rank()".into(),
        f => format!("{}({})", f.name(), t.schema()[w.target].name),
    }
}

pub fn validate_window(t: &Table, wins: &[WinCol]) -> Result<()> {
    for w in wins {
        if w.partition.len() > 2 {
            return Err(EvalError::Shape { node: "Window", detail: "at most two partition keys".into() });
        }
        for &p in &w.partition {
            check_col("Window", t, p)?;
        }
        check_col("Window", t, w.key.col)?;
        if w.func != WinFunc::Rank {
            check_col("Window", t, w.target)?;
            let ct = t.ctype(w.target);
            if !w.func.accepts(ct) {
                return Err(type_error("Window", format!("{} is not defined on {ct}", w.func.name())));
            }
        }
    }
    Ok(())
}

/// Running state of a cumulative window aggregate.
enum Running {
    Rank,
    Count(i64),
    SumInt(Option<i64>),
    SumDbl(Option<f64>),
    Max(Option<Value>),
    Min(Option<Value>),
}

impl Running {
    fn new(func: WinFunc, ct: CType) -> Self {
        match func {
            WinFunc::Rank => Running::Rank,
            WinFunc::Count => Running::Count(0),
            WinFunc::Sum if ct == CType::Int => Running::SumInt(None),
            WinFunc::Sum => Running::SumDbl(None),
            WinFunc::Max => Running::Max(None),
            WinFunc::Min => Running::Min(None),
        }
    }

    fn push(&mut self, v: &Value) -> Result<()> {
        if v.is_null() {
            return Ok(());
        }
        match self {
            Running::Rank => {}
            Running::Count(n) => *n += 1,
            Running::SumInt(acc) => {
                if let Value::Int(k) = v {
                    let next = acc.unwrap_or(0).checked_add(*k).ok_or(EvalError::Overflow { node: "Window" })?;
                    *acc = Some(next);
                }
            }
            Running::SumDbl(acc) => {
                if let Some(x) = v.as_f64() {
                    *acc = Some(acc.unwrap_or(0.0) + x);
                }
            }
            Running::Max(m) => {
                if m.as_ref().is_none_or(|cur| v > cur) {
                    *m = Some(v.clone());
                }
            }
            Running::Min(m) => {
                if m.as_ref().is_none_or(|cur| v < cur) {
                    *m = Some(v.clone());
                }
            }
        }
        Ok(())
    }

    fn value(&self, rank: usize) -> Result<Value> {
        Ok(match self {
            Running::Rank => Value::Int(rank as i64),
            Running::Count(n) => Value::Int(*n),
            Running::SumInt(acc) => acc.map_or(Value::Null, Value::Int),
            Running::SumDbl(acc) => match acc {
                None => Value::Null,
                Some(x) => Value::dbl(*x).map_err(|_| EvalError::Overflow { node: "Window" })?,
            },
            Running::Max(m) | Running::Min(m) => m.clone().unwrap_or(Value::Null),
        })
    }
}

/// Computes one window column over the whole table, in original row order.
///
/// The frame runs from the partition start through every peer of the current row.
pub(crate) fn window_column(t: &Table, w: &WinCol, parts: &[Vec<usize>]) -> Result<Vec<Value>> {
    let mut out = alloc::vec![Value::Null; t.height()];
    let keys = [w.key];
    let ct = if w.func == WinFunc::Rank { CType::Int } else { t.ctype(w.target) };
    for part in parts {
        let mut rows = part.clone();
        rows.sort_by(|&a, &b| cmp_by_keys(t, &keys, a, b));
        let mut state = Running::new(w.func, ct);
        let mut start = 0;
        while start < rows.len() {
            let mut end = start + 1;
            while end < rows.len() && cmp_by_keys(t, &keys, rows[start], rows[end]) == Ordering::Equal {
                end += 1;
            }
            if w.func != WinFunc::Rank {
                for &r in &rows[start..end] {
                    state.push(t.cell(r, w.target))?;
                }
            }
            let v = state.value(start + 1)?;
            for &r in &rows[start..end] {
                out[r] = v.clone();
            }
            start = end;
        }
    }
    Ok(out)
}

pub fn window(t: &Table, wins: &[WinCol]) -> Result<Table> {
    validate_window(t, wins)?;
    let mut schema = t.schema().to_vec();
    let mut columns: Vec<Arc<[Value]>> = (0..t.width()).map(|i| t.shared_column(i).clone()).collect();
    let mut parts_cache: BTreeMap<&[usize], Vec<Vec<usize>>> = BTreeMap::new();
    for w in wins {
        let parts = parts_cache.entry(&w.partition).or_insert_with(|| partition_rows(t, &w.partition));
        let ct = if w.func == WinFunc::Rank { CType::Int } else { w.func.result_type(t.ctype(w.target)) };
        schema.push(ColumnSchema::new(win_name(t, w), ct));
        columns.push(window_column(t, w, parts)?.into());
    }
    Ok(Table::assemble(schema, columns, t.height()))
}

fn check_pair(node: &'static str, l: &Table, r: &Table, (a, b): (usize, usize)) -> Result<()> {
    check_col(node, l, a)?;
    check_col(node, r, b)?;
    let (ta, tb) = (l.ctype(a), r.ctype(b));
    if ta.comparable_with(tb) {
        Ok(())
    } else {
        Err(type_error(node, format!("cannot join {ta} column #{} with {tb} column #{}", a + 1, b + 1)))
    }
}

pub(crate) fn keys_match(l: &Table, r: &Table, i: usize, j: usize, (a, b): (usize, usize)) -> bool {
    let (x, y) = (l.cell(i, a), r.cell(j, b));
    !x.is_null() && x == y
}

/// Concatenates matched rows: `Some(j)` takes right row `j`, `None` pads with Nulls.
pub(crate) fn join_rows(l: &Table, r: &Table, rows: &[(usize, Option<usize>)]) -> Table {
    let mut schema = l.schema().to_vec();
    schema.extend_from_slice(r.schema());
    let mut columns: Vec<Arc<[Value]>> = Vec::with_capacity(l.width() + r.width());
    for c in 0..l.width() {
        columns.push(rows.iter().map(|&(i, _)| l.cell(i, c).clone()).collect::<Vec<_>>().into());
    }
    for c in 0..r.width() {
        columns.push(
            rows.iter()
                .map(|&(_, j)| j.map_or(Value::Null, |j| r.cell(j, c).clone()))
                .collect::<Vec<_>>()
                .into(),
        );
    }
    Table::assemble(schema, columns, rows.len())
}

pub fn join(l: &Table, r: &Table, pairs: &[(usize, usize)]) -> Result<Table> {
    if pairs.is_empty() {
        return Err(EvalError::Shape { node: "Join", detail: "at least one key pair".into() });
    }
    for &p in pairs {
        check_pair("Join", l, r, p)?;
    }
    let mut rows = Vec::new();
    for i in 0..l.height() {
        for j in 0..r.height() {
            if pairs.iter().all(|&p| keys_match(l, r, i, j, p)) {
                rows.push((i, Some(j)));
            }
        }
    }
    Ok(join_rows(l, r, &rows))
}

pub fn left_join(l: &Table, r: &Table, pair: (usize, usize)) -> Result<Table> {
    check_pair("LeftJoin", l, r, pair)?;
    let mut rows = Vec::new();
    for i in 0..l.height() {
        let before = rows.len();
        for j in 0..r.height() {
            if keys_match(l, r, i, j, pair) {
                rows.push((i, Some(j)));
            }
        }
        if rows.len() == before {
            rows.push((i, None));
        }
    }
    Ok(join_rows(l, r, &rows))
}
