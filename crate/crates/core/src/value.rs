//! Cell values and column types.

use alloc::string::String;
use alloc::sync::Arc;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

/// The four column types an example table may carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CType {
    Str,
    Int,
    Dbl,
    Date,
}

impl CType {
    pub fn name(self) -> &'static str {
        match self {
            CType::Str => "Str",
            CType::Int => "Int",
            CType::Dbl => "Dbl",
            CType::Date => "Date",
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, CType::Int | CType::Dbl)
    }

    /// Whether `<`, `<=`, `>`, `>=` are offered on columns of this type.
    pub fn is_ordered(self) -> bool {
        matches!(self, CType::Int | CType::Dbl | CType::Date)
    }

    /// Whether a value of type `other` may be compared with a column of this type.
    pub fn comparable_with(self, other: CType) -> bool {
        self == other || (self.is_numeric() && other.is_numeric())
    }
}

impl fmt::Display for CType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CType {
    type Err = ValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Str" => Ok(CType::Str),
            "Int" => Ok(CType::Int),
            "Dbl" => Ok(CType::Dbl),
            "Date" => Ok(CType::Date),
            _ => Err(ValueError::UnknownType(s.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValueError {
    #[error("unknown column type `{0}`")]
    UnknownType(String),
    #[error("invalid date `{0}` (expected a valid YYYY-MM-DD)")]
    InvalidDate(String),
    #[error("non-finite double")]
    NonFinite,
    #[error("cannot parse `{text}` as {ctype}")]
    Unparsable { text: String, ctype: CType },
}

/// A proleptic-Gregorian calendar day.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    year: i32,
    month: u8,
    day: u8,
}

fn is_leap(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        2 => 28,
        _ => 0,
    }
}

impl Date {
    pub fn new(year: i32, month: u8, day: u8) -> Option<Date> {
        if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
            return None;
        }
        Some(Date { year, month, day })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u8 {
        self.month
    }

    pub fn day(self) -> u8 {
        self.day
    }
}

impl FromStr for Date {
    type Err = ValueError;

    /// Parses `YYYY-MM-DD`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ValueError::InvalidDate(s.into());
        let mut parts = s.split('-');
        let (y, m, d) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(y), Some(m), Some(d), None) => (y, m, d),
            _ => return Err(bad()),
        };
        if y.len() != 4 || m.len() != 2 || d.len() != 2 {
            return Err(bad());
        }
        if !s.bytes().all(|b| b.is_ascii_digit() || b == b'-') {
            return Err(bad());
        }
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u8 = m.parse().map_err(|_| bad())?;
        let day: u8 = d.parse().map_err(|_| bad())?;
        Date::new(year, month, day).ok_or_else(bad)
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

/// One table cell.
///
/// Equality and ordering treat `Int(k)` and `Dbl(x)` as the same number when
/// `x == k` exactly, and `Null` equals only `Null`. Doubles are always finite,
/// which makes the ordering total.
#[derive(Clone, Debug)]
pub enum Value {
    Null,
    Str(Arc<str>),
    Int(i64),
    Dbl(f64),
    Date(Date),
}

impl Value {
    pub fn str(s: &str) -> Value {
        Value::Str(Arc::from(s))
    }

    /// A double, rejecting NaN and infinities.
    pub fn dbl(x: f64) -> Result<Value, ValueError> {
        if x.is_finite() {
            Ok(Value::Dbl(x))
        } else {
            Err(ValueError::NonFinite)
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn ctype(&self) -> Option<CType> {
        match self {
            Value::Null => None,
            Value::Str(_) => Some(CType::Str),
            Value::Int(_) => Some(CType::Int),
            Value::Dbl(_) => Some(CType::Dbl),
            Value::Date(_) => Some(CType::Date),
        }
    }

    /// Whether this value may live in a column of type `ctype`.
    pub fn fits(&self, ctype: CType) -> bool {
        match self.ctype() {
            None => true,
            Some(t) => t == ctype,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Int(k) => Some(k as f64),
            Value::Dbl(x) => Some(x),
            _ => None,
        }
    }

    /// Parses `text` as a value of type `ctype`.
    pub fn parse(text: &str, ctype: CType) -> Result<Value, ValueError> {
        let unparsable = || ValueError::Unparsable { text: text.into(), ctype };
        match ctype {
            CType::Str => Ok(Value::str(text)),
            CType::Int => text.trim().parse().map(Value::Int).map_err(|_| unparsable()),
            CType::Dbl => {
                let x: f64 = text.trim().parse().map_err(|_| unparsable())?;
                Value::dbl(x)
            }
            CType::Date => text.trim().parse().map(Value::Date),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Null => 0,
            Value::Int(_) | Value::Dbl(_) => 1,
            Value::Str(_) => 2,
            Value::Date(_) => 3,
        }
    }
}

/// Exact comparison of an integer against a finite double.
fn cmp_int_dbl(k: i64, x: f64) -> Ordering {
    // 2^63 as f64; every finite double at or above it exceeds any i64.
    const LIMIT: f64 = 9_223_372_036_854_775_808.0;
    if x >= LIMIT {
        return Ordering::Less;
    }
    if x < -LIMIT {
        return Ordering::Greater;
    }
    let floor = libm_floor(x);
    let fi = floor as i64;
    match k.cmp(&fi) {
        Ordering::Equal if floor < x => Ordering::Less,
        ord => ord,
    }
}

// `f64::floor` lives in std; this is exact for finite inputs in i64 range.
fn libm_floor(x: f64) -> f64 {
    let t = x as i64 as f64;
    if t > x {
        t - 1.0
    } else {
        t
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        use Value::*;
        match (self, other) {
            (Null, Null) => Ordering::Equal,
            (Int(a), Int(b)) => a.cmp(b),
            (Dbl(a), Dbl(b)) => a.partial_cmp(b).unwrap_or(Ordering::Equal),
            (Int(a), Dbl(b)) => cmp_int_dbl(*a, *b),
            (Dbl(a), Int(b)) => cmp_int_dbl(*b, *a).reverse(),
            (Str(a), Str(b)) => a.cmp(b),
            (Date(a), Date(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("NULL"),
            Value::Str(s) => f.write_str(s),
            Value::Int(k) => write!(f, "{k}"),
            Value::Dbl(x) => write!(f, "{x:?}"),
            Value::Date(d) => write!(f, "{d}"),
        }
    }
}

impl From<i64> for Value {
    fn from(k: i64) -> Self {
        Value::Int(k)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::str(s)
    }
}

impl From<Date> for Value {
    fn from(d: Date) -> Self {
        Value::Date(d)
    }
}
