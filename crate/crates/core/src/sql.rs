//! SQL emission.
//!
//! Operators are folded into one `SELECT` block for as long as the result is
//! still a valid query with the same meaning; otherwise the block so far is
//! wrapped as a subquery `(...) AS tK`, numbered in emission order.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::eval::{EvalError, Inputs};
use crate::program::{AggFunc, Predicate, Prim, Program, SortKey, WinFunc};
use crate::table::Direction;
use crate::value::Value;

/// Spelling of string aggregation, the one construct without a portable form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Dialect {
    /// `STRING_AGG(x, ',')`
    #[default]
    StringAgg,
    /// `GROUP_CONCAT(x SEPARATOR ',')`
    GroupConcat,
    /// `LISTAGG(x, ',')`
    ListAgg,
}

#[derive(Clone, Debug)]
struct Col {
    expr: String,
    /// Name shown to the user; aliases are derived from it.
    base: String,
    alias: String,
    /// `expr` is a plain column name of the block's single source.
    bare: bool,
}

#[derive(Clone, Debug, Default)]
struct Block {
    from: String,
    quals: Vec<String>,
    cols: Vec<Col>,
    wheres: Vec<String>,
    group_by: Option<Vec<String>>,
    having: Vec<String>,
    windowed: bool,
    distinct: bool,
    order_by: Vec<String>,
}

impl Block {
    fn plain(&self) -> bool {
        self.wheres.is_empty()
            && self.group_by.is_none()
            && !self.windowed
            && !self.distinct
            && self.order_by.is_empty()
    }

    fn render(&self, sep: &str) -> String {
        let mut s = String::from("SELECT ");
        if self.distinct {
            s.push_str("DISTINCT ");
        }
        let items: Vec<String> = self
            .cols
            .iter()
            .map(|c| if c.expr == c.alias { c.expr.clone() } else { format!("{} AS {}", c.expr, c.alias) })
            .collect();
        s.push_str(&items.join(", "));
        s.push_str(sep);
        s.push_str("FROM ");
        s.push_str(&self.from);
        if !self.wheres.is_empty() {
            s.push_str(sep);
            s.push_str("WHERE ");
            s.push_str(&self.wheres.join(" AND "));
        }
        if let Some(keys) = self.group_by.as_ref().filter(|k| !k.is_empty()) {
            s.push_str(sep);
            s.push_str("GROUP BY ");
            s.push_str(&keys.join(", "));
        }
        if !self.having.is_empty() {
            s.push_str(sep);
            s.push_str("HAVING ");
            s.push_str(&self.having.join(" AND "));
        }
        if !self.order_by.is_empty() {
            s.push_str(sep);
            s.push_str("ORDER BY ");
            s.push_str(&self.order_by.join(", "));
        }
        s
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn ident(s: &str) -> String {
    if is_ident(s) {
        s.to_string()
    } else {
        format!("\"{}\"", s.replace('"', "\"\""))
    }
}

/// An identifier derived from arbitrary text: `max(date)` becomes `max_date`.
fn sanitize(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    let out = out.trim_matches('_').to_string();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit()) {
        format!("c_{out}")
    } else {
        out
    }
}

/// Gives every column a distinct alias derived from its base name.
fn realias(cols: &mut [Col]) {
    let mut taken: Vec<String> = Vec::new();
    for c in cols.iter_mut() {
        let root = if is_ident(&c.base) { c.base.clone() } else { ident(&c.base) };
        let mut alias = root.clone();
        let mut k = 2;
        while taken.iter().any(|t| t.eq_ignore_ascii_case(&alias)) {
            alias = if is_ident(&c.base) {
                format!("{root}_{k}")
            } else {
                ident(&format!("{}_{k}", c.base))
            };
            k += 1;
        }
        taken.push(alias.clone());
        c.alias = alias;
    }
}

pub fn literal(v: &Value) -> String {
    match v {
        Value::Null => "NULL".into(),
        Value::Str(s) => format!("'{}'", s.replace('\'', "''")),
        Value::Date(d) => format!("DATE '{d}'"),
        other => other.to_string(),
    }
}

fn prim_sql(p: &Prim, cols: &[Col]) -> String {
    match p {
        Prim::Cmp { col, op, value } => format!("{} {} {}", cols[*col].expr, op.symbol(), literal(value)),
        Prim::IsNull(c) => format!("{} IS NULL", cols[*c].expr),
        Prim::IsNotNull(c) => format!("{} IS NOT NULL", cols[*c].expr),
    }
}

fn pred_sql(pred: &Predicate, cols: &[Col]) -> Vec<String> {
    pred.0
        .iter()
        .map(|clause| {
            let parts: Vec<String> = clause.0.iter().map(|p| prim_sql(p, cols)).collect();
            if parts.len() == 1 {
                parts.into_iter().next().unwrap_or_default()
            } else {
                format!("({})", parts.join(" OR "))
            }
        })
        .collect()
}

fn key_sql(k: &SortKey, cols: &[Col], by_alias: bool) -> String {
    let c = &cols[k.col];
    let dir = match k.dir {
        Direction::Asc => "ASC",
        Direction::Desc => "DESC",
    };
    format!("{} {dir}", if by_alias { &c.alias } else { &c.expr })
}

struct Gen<'a> {
    env: &'a Inputs,
    dialect: Dialect,
    next: usize,
}

impl Gen<'_> {
    fn fresh(&mut self) -> String {
        self.next += 1;
        format!("t{}", self.next)
    }

    fn wrap(&mut self, b: Block) -> Block {
        let q = self.fresh();
        let cols = b
            .cols
            .iter()
            .map(|c| Col { expr: c.alias.clone(), base: c.base.clone(), alias: c.alias.clone(), bare: true })
            .collect();
        Block { from: format!("({}) AS {q}", b.render(" ")), quals: alloc::vec![q], cols, ..Block::default() }
    }

    /// The `FROM` item for one side of a join, with qualified column expressions.
    ///
    /// `taken` holds the qualifiers already used by the other side.
    fn source(&mut self, b: Block, taken: &[String]) -> Block {
        let qualify = |b: Block, q: String, from: String| {
            let cols = b.cols.into_iter().map(|c| Col { expr: format!("{q}.{}", c.expr), bare: false, ..c }).collect();
            Block { from, quals: alloc::vec![q], cols, ..Block::default() }
        };
        if b.plain() && b.quals.len() == 1 && b.cols.iter().all(|c| c.bare) {
            let q = b.quals[0].clone();
            if !taken.contains(&q) {
                let from = b.from.clone();
                return qualify(b, q, from);
            }
            if b.from == q {
                let alias = self.fresh();
                let from = format!("{q} AS {alias}");
                return qualify(b, alias, from);
            }
        }
        if b.plain() && b.quals.len() > 1 && b.quals.iter().all(|q| !taken.contains(q)) {
            return b;
        }
        let w = self.wrap(b);
        let (q, from) = (w.quals[0].clone(), w.from.clone());
        qualify(w, q, from)
    }

    fn agg_sql(&self, func: AggFunc, x: &str) -> String {
        let concat = |sep: &str| match self.dialect {
            Dialect::StringAgg => format!("STRING_AGG({x}, '{sep}')"),
            Dialect::GroupConcat => format!("GROUP_CONCAT({x} SEPARATOR '{sep}')"),
            Dialect::ListAgg => format!("LISTAGG({x}, '{sep}')"),
        };
        match func {
            AggFunc::Max => format!("MAX({x})"),
            AggFunc::Min => format!("MIN({x})"),
            AggFunc::Count => format!("COUNT({x})"),
            AggFunc::Sum => format!("SUM({x})"),
            AggFunc::Avg => format!("AVG({x})"),
            AggFunc::CountDistinct => format!("COUNT(DISTINCT {x})"),
            AggFunc::CountStar => "COUNT(*)".into(),
            f => concat(f.separator().unwrap_or(",")),
        }
    }

    fn block(&mut self, p: &Program) -> Result<Block, EvalError> {
        Ok(match p {
            Program::Table(name) => {
                let t = self.env.get(name).ok_or_else(|| EvalError::UnboundTable(name.to_string()))?;
                let mut cols: Vec<Col> = t
                    .schema()
                    .iter()
                    .map(|c| Col { expr: ident(&c.name), base: c.name.to_string(), alias: String::new(), bare: true })
                    .collect();
                realias(&mut cols);
                Block { from: ident(name), quals: alloc::vec![ident(name)], cols, ..Block::default() }
            }
            Program::Select { child, pred } => {
                let mut b = self.block(child)?;
                if b.windowed || b.distinct || !b.order_by.is_empty() {
                    b = self.wrap(b);
                }
                let conds = pred_sql(pred, &b.cols);
                if b.group_by.is_some() {
                    b.having.extend(conds);
                } else {
                    b.wheres.extend(conds);
                }
                b
            }
            Program::Project { child, cols } => {
                let mut b = self.block(child)?;
                if b.distinct {
                    b = self.wrap(b);
                }
                let mut picked: Vec<Col> = cols.iter().map(|&c| b.cols[c].clone()).collect();
                realias(&mut picked);
                b.cols = picked;
                b
            }
            Program::Distinct { child } => {
                let mut b = self.block(child)?;
                if b.distinct || !b.order_by.is_empty() {
                    b = self.wrap(b);
                }
                b.distinct = true;
                b
            }
            Program::Order { child, keys } => {
                let mut b = self.block(child)?;
                if !b.order_by.is_empty() {
                    b = self.wrap(b);
                }
                b.order_by = keys.iter().map(|k| key_sql(k, &b.cols, true)).collect();
                b
            }
            Program::Group { child, keys, aggs } => {
                let mut b = self.block(child)?;
                if b.group_by.is_some() || b.windowed || b.distinct || !b.order_by.is_empty() {
                    b = self.wrap(b);
                }
                let mut cols: Vec<Col> = keys.iter().map(|&k| b.cols[k].clone()).collect();
                for a in aggs {
                    let (expr, base) = match a.func {
                        AggFunc::CountStar => (self.agg_sql(a.func, "*"), "count_all".into()),
                        f => {
                            let c = &b.cols[a.col];
                            (self.agg_sql(f, &c.expr), sanitize(&format!("{}_{}", f.name(), c.base)))
                        }
                    };
                    cols.push(Col { expr, base, alias: String::new(), bare: false });
                }
                realias(&mut cols);
                b.group_by = Some(keys.iter().map(|&k| b.cols[k].expr.clone()).collect());
                b.cols = cols;
                b
            }
            Program::Window { child, wins } => {
                let mut b = self.block(child)?;
                if b.windowed || b.distinct || !b.order_by.is_empty() {
                    b = self.wrap(b);
                }
                let mut cols = b.cols.clone();
                for w in wins {
                    let mut over = String::new();
                    if !w.partition.is_empty() {
                        let parts: Vec<&str> = w.partition.iter().map(|&c| b.cols[c].expr.as_str()).collect();
                        over.push_str("PARTITION BY ");
                        over.push_str(&parts.join(", "));
                        over.push(' ');
                    }
                    over.push_str("ORDER BY ");
                    over.push_str(&key_sql(&w.key, &b.cols, false));
                    let (call, base) = match w.func {
                        WinFunc::Rank => ("RANK()".to_string(), format!("rank_{}", b.cols[w.key.col].base)),
                        f => {
                            let c = &b.cols[w.target];
                            (format!("{}({})", f.name().to_uppercase(), c.expr), format!("{}_{}", f.name(), c.base))
                        }
                    };
                    cols.push(Col { expr: format!("{call} OVER ({over})"), base: sanitize(&base), alias: String::new(), bare: false });
                }
                realias(&mut cols);
                b.cols = cols;
                b.windowed = true;
                b
            }
            Program::Join { left, right, pairs } => {
                let on: Vec<(usize, usize)> = pairs.clone();
                self.join(left, right, &on, "JOIN")?
            }
            Program::LeftJoin { left, right, pair } => self.join(left, right, &[*pair], "LEFT JOIN")?,
        })
    }

    fn join(&mut self, left: &Program, right: &Program, pairs: &[(usize, usize)], kw: &str) -> Result<Block, EvalError> {
        let l = self.block(left)?;
        let l = self.source(l, &[]);
        let r = self.block(right)?;
        let r = self.source(r, &l.quals);
        let on: Vec<String> = pairs.iter().map(|&(a, b)| format!("{} = {}", l.cols[a].expr, r.cols[b].expr)).collect();
        let right_from = if r.quals.len() > 1 { format!("({})", r.from) } else { r.from };
        let mut cols = l.cols;
        cols.extend(r.cols);
        realias(&mut cols);
        let mut quals = l.quals;
        quals.extend(r.quals);
        Ok(Block {
            from: format!("{} {kw} {right_from} ON {}", l.from, on.join(" AND ")),
            quals,
            cols,
            ..Block::default()
        })
    }
}

/// Renders `p` as a single SQL query over the tables in `env`.
pub fn to_sql(p: &Program, env: &Inputs, dialect: Dialect) -> Result<String, EvalError> {
    let mut g = Gen { env, dialect, next: 0 };
    let b = g.block(p)?;
    Ok(b.render("\n"))
}
