//! The JSON problem-file format.
//!
//! ```json
//! { "inputs": { "t": { "columns": [{"name": "a", "type": "Int"}], "rows": [[1], [null]] } },
//!   "output": { "columns": [{"name": "a", "type": "Int"}], "rows": [[1]] },
//!   "constants": [{"type": "Str", "value": "T"}],
//!   "config": { "timeout_ms": 5000 } }
//! ```
//!
//! A table may give `"csv": "file.csv"` instead of `"rows"`; the path is
//! resolved against the problem file's directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Number, Value as Json};
use sqlsynth_core::{CType, ColumnSchema, Config, Inputs, Problem, ProjectionMode, Table, Value};

use crate::csv_tables;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    /// A schema violation at a JSON path such as `$.inputs.t.rows[2][0]`.
    #[error("{at}: {message}")]
    Schema { at: String, message: String },
}

impl LoadError {
    fn schema(at: &Pointer, message: impl Into<String>) -> Self {
        LoadError::Schema { at: at.to_string(), message: message.into() }
    }
}

/// A JSON path under construction, rendered as `$.a.b[3]`.
#[derive(Clone, Default)]
struct Pointer(String);

impl Pointer {
    fn key(&self, k: &str) -> Pointer {
        let mut s = self.0.clone();
        if k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && !k.is_empty() {
            let _ = write!(s, ".{k}");
        } else {
            let _ = write!(s, "[{}]", Json::String(k.into()));
        }
        Pointer(s)
    }

    fn index(&self, i: usize) -> Pointer {
        Pointer(format!("{}[{i}]", self.0))
    }
}

impl std::fmt::Display for Pointer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "${}", self.0)
    }
}

fn kind(v: &Json) -> &'static str {
    match v {
        Json::Null => "null",
        Json::Bool(_) => "a boolean",
        Json::Number(_) => "a number",
        Json::String(_) => "a string",
        Json::Array(_) => "an array",
        Json::Object(_) => "an object",
    }
}

fn object<'a>(v: &'a Json, at: &Pointer, allowed: &[&str]) -> Result<&'a Map<String, Json>, LoadError> {
    let Json::Object(m) = v else {
        return Err(LoadError::schema(at, format!("expected an object, found {}", kind(v))));
    };
    if let Some(k) = m.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(LoadError::schema(&at.key(k), format!("unknown field (expected one of: {})", allowed.join(", "))));
    }
    Ok(m)
}

fn field<'a>(m: &'a Map<String, Json>, at: &Pointer, k: &str) -> Result<&'a Json, LoadError> {
    m.get(k).ok_or_else(|| LoadError::schema(&at.key(k), "missing field"))
}

fn array<'a>(v: &'a Json, at: &Pointer) -> Result<&'a [Json], LoadError> {
    match v {
        Json::Array(xs) => Ok(xs),
        _ => Err(LoadError::schema(at, format!("expected an array, found {}", kind(v)))),
    }
}

fn string<'a>(v: &'a Json, at: &Pointer) -> Result<&'a str, LoadError> {
    v.as_str().ok_or_else(|| LoadError::schema(at, format!("expected a string, found {}", kind(v))))
}

fn ctype(v: &Json, at: &Pointer) -> Result<CType, LoadError> {
    string(v, at)?.parse().map_err(|e: sqlsynth_core::ValueError| LoadError::schema(at, e.to_string()))
}

/// Decodes one cell of type `ty`; `null` is always accepted.
pub fn cell(v: &Json, ty: CType) -> Result<Value, String> {
    let mismatch = || format!("expected {ty} or null, found {}", kind(v));
    match (ty, v) {
        (_, Json::Null) => Ok(Value::Null),
        (CType::Str, Json::String(s)) => Ok(Value::str(s)),
        (CType::Int, Json::Number(n)) => n.as_i64().map(Value::Int).ok_or_else(|| format!("{n} is not a 64-bit integer")),
        (CType::Dbl, Json::Number(n)) => {
            n.as_f64().ok_or_else(mismatch).and_then(|x| Value::dbl(x).map_err(|e| e.to_string()))
        }
        (CType::Date, Json::String(s)) => s.parse().map(Value::Date).map_err(|e: sqlsynth_core::ValueError| e.to_string()),
        _ => Err(mismatch()),
    }
}

fn schema(v: &Json, at: &Pointer) -> Result<Vec<ColumnSchema>, LoadError> {
    let cols = array(v, at)?;
    let mut out = Vec::with_capacity(cols.len());
    for (i, c) in cols.iter().enumerate() {
        let at = at.index(i);
        let m = object(c, &at, &["name", "type"])?;
        let name = string(field(m, &at, "name")?, &at.key("name"))?;
        if name.is_empty() {
            return Err(LoadError::schema(&at.key("name"), "column name must not be empty"));
        }
        out.push(ColumnSchema::new(name, ctype(field(m, &at, "type")?, &at.key("type"))?));
    }
    Ok(out)
}

fn table(v: &Json, at: &Pointer, base: Option<&Path>) -> Result<Table, LoadError> {
    let m = object(v, at, &["columns", "rows", "csv"])?;
    let schema = schema(field(m, at, "columns")?, &at.key("columns"))?;
    let rows = match (m.get("rows"), m.get("csv")) {
        (Some(rows), None) => json_rows(rows, &at.key("rows"), &schema)?,
        (None, Some(file)) => {
            let at = at.key("csv");
            let rel = string(file, &at)?;
            let Some(base) = base else {
                return Err(LoadError::schema(&at, "CSV references are only allowed in problem files"));
            };
            let path = base.join(rel);
            csv_tables::read_rows(&path, &schema).map_err(|e| LoadError::schema(&at, e.to_string()))?
        }
        (Some(_), Some(_)) => return Err(LoadError::schema(at, "give either `rows` or `csv`, not both")),
        (None, None) => return Err(LoadError::schema(&at.key("rows"), "missing field")),
    };
    Table::from_rows(schema, rows).map_err(|e| LoadError::schema(at, e.to_string()))
}

fn json_rows(v: &Json, at: &Pointer, schema: &[ColumnSchema]) -> Result<Vec<Vec<Value>>, LoadError> {
    let rows = array(v, at)?;
    let mut out = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let at = at.index(r);
        let cells = array(row, &at)?;
        if cells.len() != schema.len() {
            return Err(LoadError::schema(&at, format!("row has {} cells, expected {}", cells.len(), schema.len())));
        }
        let row = cells
            .iter()
            .zip(schema)
            .enumerate()
            .map(|(c, (v, s))| cell(v, s.ctype).map_err(|e| LoadError::schema(&at.index(c), e)))
            .collect::<Result<_, _>>()?;
        out.push(row);
    }
    Ok(out)
}

fn constant(v: &Json, at: &Pointer) -> Result<Value, LoadError> {
    let m = object(v, at, &["type", "value"])?;
    let ty = ctype(field(m, at, "type")?, &at.key("type"))?;
    let value = field(m, at, "value")?;
    if value.is_null() {
        return Err(LoadError::schema(&at.key("value"), "constants must not be null"));
    }
    cell(value, ty).map_err(|e| LoadError::schema(&at.key("value"), e))
}

fn config(v: &Json, at: &Pointer) -> Result<Config, LoadError> {
    const FIELDS: [&str; 7] = [
        "timeout_ms",
        "max_sketch_size",
        "max_prims_per_clause",
        "max_clauses",
        "max_join_pairs",
        "max_projection_combos",
        "projection",
    ];
    let m = object(v, at, &FIELDS)?;
    let mut c = Config::default();
    let uint = |k: &str| -> Result<Option<u64>, LoadError> {
        m.get(k)
            .map(|v| v.as_u64().ok_or_else(|| LoadError::schema(&at.key(k), format!("expected a non-negative integer, found {}", kind(v)))))
            .transpose()
    };
    if let Some(x) = uint("timeout_ms")? {
        c.timeout_ms = x;
    }
    for (k, slot) in [
        ("max_sketch_size", &mut c.max_sketch_size),
        ("max_prims_per_clause", &mut c.max_prims_per_clause),
        ("max_clauses", &mut c.max_clauses),
        ("max_join_pairs", &mut c.max_join_pairs),
        ("max_projection_combos", &mut c.max_projection_combos),
    ] {
        if let Some(x) = uint(k)? {
            *slot = usize::try_from(x).map_err(|_| LoadError::schema(&at.key(k), "value too large"))?;
        }
    }
    if let Some(p) = m.get("projection") {
        let at = at.key("projection");
        c.projection = parse_projection(string(p, &at)?).map_err(|e| LoadError::schema(&at, e))?;
    }
    Ok(c)
}

pub fn parse_projection(s: &str) -> Result<ProjectionMode, String> {
    match s {
        "fast" => Ok(ProjectionMode::Fast),
        "baseline" => Ok(ProjectionMode::Baseline),
        _ => Err(format!("expected \"fast\" or \"baseline\", found {s:?}")),
    }
}

fn projection_name(p: ProjectionMode) -> &'static str {
    match p {
        ProjectionMode::Fast => "fast",
        ProjectionMode::Baseline => "baseline",
    }
}

/// Decodes a problem document. `base` anchors relative CSV paths; without
/// one, tables must carry their rows inline.
pub fn from_json(doc: &Json, base: Option<&Path>) -> Result<Problem, LoadError> {
    let root = Pointer::default();
    let m = object(doc, &root, &["inputs", "output", "constants", "config"])?;
    let at = root.key("inputs");
    let Json::Object(tables) = field(m, &root, "inputs")? else {
        return Err(LoadError::schema(&at, "expected an object mapping table names to tables"));
    };
    let mut inputs = Inputs::new();
    for (name, t) in tables {
        if name.is_empty() {
            return Err(LoadError::schema(&at.key(name), "table name must not be empty"));
        }
        inputs.insert(name, table(t, &at.key(name), base)?);
    }
    let output = table(field(m, &root, "output")?, &root.key("output"), base)?;
    let constants = match m.get("constants") {
        None => Vec::new(),
        Some(v) => {
            let at = root.key("constants");
            array(v, &at)?.iter().enumerate().map(|(i, c)| constant(c, &at.index(i))).collect::<Result<_, _>>()?
        }
    };
    let config = match m.get("config") {
        None => Config::default(),
        Some(v) => config(v, &root.key("config"))?,
    };
    Ok(Problem { inputs, output, constants, config })
}

pub fn parse_problem(text: &str, base: Option<&Path>) -> Result<Problem, LoadError> {
    from_json(&serde_json::from_str(text)?, base)
}

pub fn load_problem(path: &Path) -> Result<Problem, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.into(), source })?;
    parse_problem(&text, path.parent())
}

pub fn value_json(v: &Value) -> Json {
    match v {
        Value::Null => Json::Null,
        Value::Str(s) => Json::String(s.to_string()),
        Value::Int(k) => Json::from(*k),
        Value::Dbl(x) => Number::from_f64(*x).map_or(Json::Null, Json::Number),
        Value::Date(d) => Json::String(d.to_string()),
    }
}

pub fn table_json(t: &Table) -> Json {
    let columns: Vec<Json> = t.schema().iter().map(|c| json!({"name": &*c.name, "type": c.ctype.name()})).collect();
    let rows: Vec<Json> = t.rows().map(|r| Json::Array(r.iter().map(value_json).collect())).collect();
    json!({"columns": columns, "rows": rows})
}

/// The canonical document for `p`: fixed key order, every config field
/// present, rows inlined.
pub fn to_json(p: &Problem) -> Json {
    let inputs: Map<String, Json> = p.inputs.iter().map(|(n, t)| (n.to_string(), table_json(t))).collect();
    let constants: Vec<Json> = p
        .constants
        .iter()
        .map(|c| json!({"type": c.ctype().map_or("Str", CType::name), "value": value_json(c)}))
        .collect();
    let c = &p.config;
    json!({
        "inputs": inputs,
        "output": table_json(&p.output),
        "constants": constants,
        "config": {
            "timeout_ms": c.timeout_ms,
            "max_sketch_size": c.max_sketch_size,
            "max_prims_per_clause": c.max_prims_per_clause,
            "max_clauses": c.max_clauses,
            "max_join_pairs": c.max_join_pairs,
            "max_projection_combos": c.max_projection_combos,
            "projection": projection_name(c.projection),
        },
    })
}

pub fn to_string(p: &Problem) -> String {
    let mut s = serde_json::to_string_pretty(&to_json(p)).expect("problem documents serialize");
    s.push('\n');
    s
}

pub fn save_problem(p: &Problem, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, to_string(p))
}
