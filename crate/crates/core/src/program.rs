//! The query language: an extended relational algebra over positional columns.
//!
//! Column references are zero-based indices into the child table. The textual
//! rendering (the `Display` impl) prints them one-based as `#1`, `#2`, ...

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::table::Direction;
use crate::value::{CType, Value};

/// The eight operator kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    Order,
    Distinct,
    Project,
    Select,
    Group,
    Window,
    Join,
    LeftJoin,
}

impl OpKind {
    /// All kinds, in the fixed enumeration order used by sketch expansion.
    pub const ALL: [OpKind; 8] = [
        OpKind::Order,
        OpKind::Distinct,
        OpKind::Project,
        OpKind::Select,
        OpKind::Group,
        OpKind::Window,
        OpKind::Join,
        OpKind::LeftJoin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Order => "Order",
            OpKind::Distinct => "Distinct",
            OpKind::Project => "Project",
            OpKind::Select => "Select",
            OpKind::Group => "Group",
            OpKind::Window => "Window",
            OpKind::Join => "Join",
            OpKind::LeftJoin => "LeftJoin",
        }
    }

    /// Contribution to program and sketch size.
    pub fn size(self) -> usize {
        match self {
            OpKind::Window => 2,
            _ => 1,
        }
    }

    pub fn arity(self) -> usize {
        match self {
            OpKind::Join | OpKind::LeftJoin => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SortKey {
    pub col: usize,
    pub dir: Direction,
}

impl SortKey {
    pub fn asc(col: usize) -> Self {
        SortKey { col, dir: Direction::Asc }
    }

    pub fn desc(col: usize) -> Self {
        SortKey { col, dir: Direction::Desc }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AggFunc {
    Max,
    Min,
    Count,
    Sum,
    Avg,
    CountDistinct,
    ConcatComma,
    ConcatSpace,
    ConcatSlash,
    /// `COUNT(*)`: counts rows, Nulls included, and ignores its column.
    CountStar,
}

impl AggFunc {
    pub const ALL: [AggFunc; 10] = [
        AggFunc::Max,
        AggFunc::Min,
        AggFunc::Count,
        AggFunc::Sum,
        AggFunc::Avg,
        AggFunc::CountDistinct,
        AggFunc::ConcatComma,
        AggFunc::ConcatSpace,
        AggFunc::ConcatSlash,
        AggFunc::CountStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AggFunc::Max => "max",
            AggFunc::Min => "min",
            AggFunc::Count => "count",
            AggFunc::Sum => "sum",
            AggFunc::Avg => "avg",
            AggFunc::CountDistinct => "count_distinct",
            AggFunc::ConcatComma => "concat_comma",
            AggFunc::ConcatSpace => "concat_space",
            AggFunc::ConcatSlash => "concat_slash",
            AggFunc::CountStar => "count_star",
        }
    }

    /// Whether the function accepts a column of type `t`.
    pub fn accepts(self, t: CType) -> bool {
        match self {
            AggFunc::Sum | AggFunc::Avg => t.is_numeric(),
            AggFunc::Max | AggFunc::Min | AggFunc::Count | AggFunc::CountDistinct | AggFunc::CountStar => true,
            AggFunc::ConcatComma | AggFunc::ConcatSpace | AggFunc::ConcatSlash => t == CType::Str,
        }
    }

    /// Result type for an input column of type `t`.
    pub fn result_type(self, t: CType) -> CType {
        match self {
            AggFunc::Max | AggFunc::Min | AggFunc::Sum => t,
            AggFunc::Avg => CType::Dbl,
            AggFunc::Count | AggFunc::CountDistinct | AggFunc::CountStar => CType::Int,
            AggFunc::ConcatComma | AggFunc::ConcatSpace | AggFunc::ConcatSlash => CType::Str,
        }
    }

    pub fn separator(self) -> Option<&'static str> {
        match self {
            AggFunc::ConcatComma => Some(","),
            AggFunc::ConcatSpace => Some(" "),
            AggFunc::ConcatSlash => Some("/"),
            _ => None,
        }
    }
}

/// One aggregation column of a `Group`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AggCol {
    pub func: AggFunc,
    pub col: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WinFunc {
    Max,
    Min,
    Count,
    Sum,
    Rank,
}

impl WinFunc {
    pub const ALL: [WinFunc; 5] = [WinFunc::Max, WinFunc::Min, WinFunc::Count, WinFunc::Sum, WinFunc::Rank];

    pub fn name(self) -> &'static str {
        match self {
            WinFunc::Max => "max",
            WinFunc::Min => "min",
            WinFunc::Count => "count",
            WinFunc::Sum => "sum",
            WinFunc::Rank => "rank",
        }
    }

    pub fn accepts(self, t: CType) -> bool {
        match self {
            WinFunc::Sum => t.is_numeric(),
            _ => true,
        }
    }

    pub fn result_type(self, t: CType) -> CType {
        match self {
            WinFunc::Max | WinFunc::Min | WinFunc::Sum => t,
            WinFunc::Count | WinFunc::Rank => CType::Int,
        }
    }
}

/// One appended column of a `Window`. `Rank` ignores `target`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WinCol {
    pub func: WinFunc,
    pub target: usize,
    pub partition: Vec<usize>,
    pub key: SortKey,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
    Ne,
}

impl BinOp {
    pub const ALL: [BinOp; 6] = [BinOp::Eq, BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge, BinOp::Ne];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Eq => "=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Ne => "<>",
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, BinOp::Eq | BinOp::Ne)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Prim {
    Cmp { col: usize, op: BinOp, value: Value },
    IsNull(usize),
    IsNotNull(usize),
}

impl Prim {
    pub fn col(&self) -> usize {
        match *self {
            Prim::Cmp { col, .. } | Prim::IsNull(col) | Prim::IsNotNull(col) => col,
        }
    }
}

/// A disjunction of primitive tests.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Clause(pub Vec<Prim>);

/// A conjunction of clauses (conjunctive normal form).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Predicate(pub Vec<Clause>);

impl Predicate {
    pub fn prim(p: Prim) -> Self {
        Predicate(alloc::vec![Clause(alloc::vec![p])])
    }

    pub fn and(mut self, other: Predicate) -> Self {
        self.0.extend(other.0);
        self
    }

    pub fn prims(&self) -> impl Iterator<Item = &Prim> {
        self.0.iter().flat_map(|c| c.0.iter())
    }
}

/// A complete program.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Program {
    Table(Arc<str>),
    Order { child: Arc<Program>, keys: Vec<SortKey> },
    Distinct { child: Arc<Program> },
    Project { child: Arc<Program>, cols: Vec<usize> },
    Select { child: Arc<Program>, pred: Predicate },
    Group { child: Arc<Program>, keys: Vec<usize>, aggs: Vec<AggCol> },
    Window { child: Arc<Program>, wins: Vec<WinCol> },
    Join { left: Arc<Program>, right: Arc<Program>, pairs: Vec<(usize, usize)> },
    LeftJoin { left: Arc<Program>, right: Arc<Program>, pair: (usize, usize) },
}

impl Program {
    pub fn table(name: &str) -> Program {
        Program::Table(Arc::from(name))
    }

    pub fn kind(&self) -> Option<OpKind> {
        Some(match self {
            Program::Table(_) => return None,
            Program::Order { .. } => OpKind::Order,
            Program::Distinct { .. } => OpKind::Distinct,
            Program::Project { .. } => OpKind::Project,
            Program::Select { .. } => OpKind::Select,
            Program::Group { .. } => OpKind::Group,
            Program::Window { .. } => OpKind::Window,
            Program::Join { .. } => OpKind::Join,
            Program::LeftJoin { .. } => OpKind::LeftJoin,
        })
    }

    pub fn children(&self) -> Vec<&Program> {
        match self {
            Program::Table(_) => Vec::new(),
            Program::Order { child, .. }
            | Program::Distinct { child }
            | Program::Project { child, .. }
            | Program::Select { child, .. }
            | Program::Group { child, .. }
            | Program::Window { child, .. } => alloc::vec![&**child],
            Program::Join { left, right, .. } | Program::LeftJoin { left, right, .. } => {
                alloc::vec![&**left, &**right]
            }
        }
    }

    /// Sum of operator sizes: `Window` counts two, other operators one, tables zero.
    pub fn size(&self) -> usize {
        self.kind().map_or(0, OpKind::size) + self.children().into_iter().map(Program::size).sum::<usize>()
    }

    /// Whether any node satisfies `f`.
    pub fn any(&self, f: &dyn Fn(&Program) -> bool) -> bool {
        f(self) || self.children().into_iter().any(|c| c.any(f))
    }
}

fn list<T>(f: &mut fmt::Formatter<'_>, items: &[T], each: impl Fn(&mut fmt::Formatter<'_>, &T) -> fmt::Result) -> fmt::Result {
    f.write_str("[")?;
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        each(f, x)?;
    }
    f.write_str("]")
}

fn col(f: &mut fmt::Formatter<'_>, c: &usize) -> fmt::Result {
    write!(f, "#{}", c + 1)
}

impl fmt::Display for SortKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.dir {
            Direction::Asc => "Asc",
            Direction::Desc => "Desc",
        };
        write!(f, "(#{}, {dir})", self.col + 1)
    }
}

pub(crate) fn literal(f: &mut fmt::Formatter<'_>, v: &Value) -> fmt::Result {
    match v {
        Value::Str(s) => write!(f, "'{}'", s.replace('\'', "''")),
        Value::Date(d) => write!(f, "'{d}'"),
        other => write!(f, "{other}"),
    }
}

impl fmt::Display for Prim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prim::Cmp { col, op, value } => {
                write!(f, "#{} {} ", col + 1, op.symbol())?;
                literal(f, value)
            }
            Prim::IsNull(c) => write!(f, "IsNull(#{})", c + 1),
            Prim::IsNotNull(c) => write!(f, "IsNotNull(#{})", c + 1),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, clause) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∧ ")?;
            }
            let wrap = clause.0.len() > 1 && self.0.len() > 1;
            if wrap {
                f.write_str("(")?;
            }
            for (j, p) in clause.0.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ∨ ")?;
                }
                write!(f, "{p}")?;
            }
            if wrap {
                f.write_str(")")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for AggCol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.func {
            AggFunc::CountStar => f.write_str("count(*)"),
            func => write!(f, "{}(#{})", func.name(), self.col + 1),
        }
    }
}

impl fmt::Display for WinCol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, ", self.func.name())?;
        match self.func {
            WinFunc::Rank => f.write_str("_")?,
            _ => write!(f, "#{}", self.target + 1)?,
        }
        f.write_str(", ")?;
        list(f, &self.partition, col)?;
        write!(f, ", {})", self.key)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Program::Table(name) => write!(f, "Table({name})"),
            Program::Order { child, keys } => {
                write!(f, "Order({child}, ")?;
                list(f, keys, |f, k| write!(f, "{k}"))?;
                f.write_str(")")
            }
            Program::Distinct { child } => write!(f, "Distinct({child})"),
            Program::Project { child, cols } => {
                write!(f, "Project({child}, ")?;
                list(f, cols, col)?;
                f.write_str(")")
            }
            Program::Select { child, pred } => write!(f, "Select({child}, {pred})"),
            Program::Group { child, keys, aggs } => {
                write!(f, "Group({child}, ")?;
                list(f, keys, col)?;
                f.write_str(", ")?;
                list(f, aggs, |f, a| write!(f, "{a}"))?;
                f.write_str(")")
            }
            Program::Window { child, wins } => {
                write!(f, "Window({child}, ")?;
                list(f, wins, |f, w| write!(f, "{w}"))?;
                f.write_str(")")
            }
            Program::Join { left, right, pairs } => {
                write!(f, "Join({left}, {right}, ")?;
                for (i, (l, r)) in pairs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ∧ ")?;
                    }
                    write!(f, "#{} = #{}", l + 1, r + 1)?;
                }
                f.write_str(")")
            }
            Program::LeftJoin { left, right, pair: (l, r) } => {
                write!(f, "LeftJoin({left}, {right}, #{} = #{})", l + 1, r + 1)
            }
        }
    }
}
