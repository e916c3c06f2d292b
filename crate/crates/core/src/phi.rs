//! Column relations and the table-inclusion constraint.
//!
//! A constraint relates the expected output table to some intermediate table.
//! `(Positional, R)` demands equal widths with column `i` of the output related
//! to column `i` of the intermediate table; `(Existential, R)` demands that every
//! output column is related to at least one intermediate column. In both cases
//! `R(a, b)` is read with `a` the output column and `b` the intermediate one.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::program::OpKind;
use crate::table::Table;
use crate::value::Value;

/// A binary relation between two columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ColRel {
    /// Equal as multisets.
    EqBag,
    /// Multiset inclusion.
    SubBag,
    /// Equal as sets.
    EqSet,
    /// Set inclusion.
    SubSet,
}

impl ColRel {
    pub const ALL: [ColRel; 4] = [ColRel::EqBag, ColRel::SubBag, ColRel::EqSet, ColRel::SubSet];

    fn is_bag(self) -> bool {
        matches!(self, ColRel::EqBag | ColRel::SubBag)
    }
}

impl fmt::Display for ColRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColRel::EqBag => "=bag",
            ColRel::SubBag => "⊆bag",
            ColRel::EqSet => "=set",
            ColRel::SubSet => "⊆set",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// Columns correspond in order (`⇔`).
    Positional,
    /// Each output column has some corresponding column (`↦`).
    Existential,
}

/// The table-inclusion constraint: either unconstrained (`Top`) or a mode/relation pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phi {
    Top,
    Rel(Mode, ColRel),
}

impl Phi {
    /// The constraint a complete program must meet against the output.
    pub const ROOT: Phi = Phi::Rel(Mode::Positional, ColRel::EqBag);

    /// All nine constraint values.
    pub fn all() -> impl Iterator<Item = Phi> {
        core::iter::once(Phi::Top).chain(
            [Mode::Positional, Mode::Existential]
                .into_iter()
                .flat_map(|m| ColRel::ALL.into_iter().map(move |r| Phi::Rel(m, r))),
        )
    }

    /// The constraint a child must satisfy for its parent of kind `op` to be able to satisfy `self`.
    pub fn propagate(self, op: OpKind) -> Phi {
        use ColRel::*;
        match (self, op) {
            (Phi::Top, _) => Phi::Top,
            (phi, OpKind::Order) => phi,
            (Phi::Rel(m, EqBag), OpKind::Distinct) => Phi::Rel(m, EqSet),
            (Phi::Rel(m, SubBag), OpKind::Distinct) => Phi::Rel(m, SubSet),
            (phi, OpKind::Distinct) => phi,
            (Phi::Rel(Mode::Positional, r), OpKind::Project) => Phi::Rel(Mode::Existential, r),
            (phi, OpKind::Project) => phi,
            (Phi::Rel(m, EqBag), OpKind::Select) => Phi::Rel(m, SubBag),
            (Phi::Rel(m, EqSet), OpKind::Select) => Phi::Rel(m, SubSet),
            (phi, OpKind::Select) => phi,
            (_, OpKind::Group | OpKind::Window | OpKind::Join | OpKind::LeftJoin) => Phi::Top,
        }
    }
}

impl fmt::Display for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phi::Top => f.write_str("⊤"),
            Phi::Rel(Mode::Positional, r) => write!(f, "(⇔, {r})"),
            Phi::Rel(Mode::Existential, r) => write!(f, "(↦, {r})"),
        }
    }
}

/// A column in canonical form: its cells sorted, plus the deduplicated run.
#[derive(Clone, Debug)]
pub(crate) struct Canon<'a> {
    sorted: Vec<&'a Value>,
    distinct: Vec<&'a Value>,
}

impl<'a> Canon<'a> {
    pub(crate) fn new(col: &'a [Value]) -> Self {
        let mut sorted: Vec<&Value> = col.iter().collect();
        sorted.sort_unstable();
        let mut distinct = sorted.clone();
        distinct.dedup();
        Canon { sorted, distinct }
    }

    fn view(&self, rel: ColRel) -> &[&'a Value] {
        if rel.is_bag() {
            &self.sorted
        } else {
            &self.distinct
        }
    }
}

/// `a ⊆ b` on sorted sequences, counting multiplicity.
fn sorted_included(a: &[&Value], b: &[&Value]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut j = 0;
    for x in a {
        loop {
            match b.get(j) {
                None => return false,
                Some(y) => match y.cmp(x) {
                    core::cmp::Ordering::Less => j += 1,
                    core::cmp::Ordering::Equal => {
                        j += 1;
                        break;
                    }
                    core::cmp::Ordering::Greater => return false,
                },
            }
        }
    }
    true
}

pub(crate) fn canon_related(a: &Canon<'_>, b: &Canon<'_>, rel: ColRel) -> bool {
    let (x, y) = (a.view(rel), b.view(rel));
    match rel {
        ColRel::EqBag | ColRel::EqSet => x == y,
        ColRel::SubBag | ColRel::SubSet => sorted_included(x, y),
    }
}

/// Whether `rel(a, b)` holds between two columns. `Null` equals only `Null`.
pub fn column_relation(a: &[Value], b: &[Value], rel: ColRel) -> bool {
    canon_related(&Canon::new(a), &Canon::new(b), rel)
}

/// Precomputed canonical forms of the output table's columns.
pub(crate) struct OutputIndex<'a> {
    tout: &'a Table,
    canon: Vec<Canon<'a>>,
}

/// Lazily computed canonical forms for an intermediate table.
struct LazyCanon<'a> {
    table: &'a Table,
    cache: Vec<Option<Canon<'a>>>,
}

impl<'a> LazyCanon<'a> {
    fn new(table: &'a Table) -> Self {
        LazyCanon { table, cache: (0..table.width()).map(|_| None).collect() }
    }

    fn get(&mut self, i: usize) -> &Canon<'a> {
        let table = self.table;
        self.cache[i].get_or_insert_with(|| Canon::new(table.column(i)))
    }
}

impl<'a> OutputIndex<'a> {
    pub(crate) fn new(tout: &'a Table) -> Self {
        let canon = (0..tout.width()).map(|i| Canon::new(tout.column(i))).collect();
        OutputIndex { tout, canon }
    }

    pub(crate) fn table(&self) -> &'a Table {
        self.tout
    }

    /// Whether a table with `n` rows could satisfy `phi` at all.
    pub(crate) fn admits_height(&self, phi: Phi, n: usize) -> bool {
        let Phi::Rel(_, rel) = phi else {
            return true;
        };
        if self.tout.width() == 0 {
            return true;
        }
        let h = self.tout.height();
        match rel {
            ColRel::EqBag => n == h,
            ColRel::SubBag => n >= h,
            ColRel::EqSet => (h == 0) == (n == 0),
            ColRel::SubSet => h == 0 || n > 0,
        }
    }

    /// Cheap rejection before any sorting: row counts and types must permit `rel`.
    fn may_relate(&self, i: usize, t: &Table, j: usize, rel: ColRel) -> bool {
        let out = &self.canon[i];
        let n = t.height();
        let ok_len = match rel {
            ColRel::EqBag => out.sorted.len() == n,
            ColRel::SubBag => out.sorted.len() <= n,
            ColRel::EqSet => n > 0 || out.sorted.is_empty(),
            ColRel::SubSet => out.distinct.len() <= n,
        };
        if !ok_len {
            return false;
        }
        // A non-null output cell can only be matched by a comparable column type.
        let has_value = out.distinct.last().is_some_and(|v| !v.is_null());
        !has_value || self.tout.ctype(i).comparable_with(t.ctype(j))
    }

    fn related(&self, i: usize, lazy: &mut LazyCanon<'_>, j: usize, rel: ColRel) -> bool {
        self.may_relate(i, lazy.table, j, rel) && canon_related(&self.canon[i], lazy.get(j), rel)
    }

    pub(crate) fn holds(&self, phi: Phi, t: &Table) -> bool {
        let (mode, rel) = match phi {
            Phi::Top => return true,
            Phi::Rel(m, r) => (m, r),
        };
        let mut lazy = LazyCanon::new(t);
        match mode {
            Mode::Positional => {
                self.tout.width() == t.width() && (0..t.width()).all(|i| self.related(i, &mut lazy, i, rel))
            }
            Mode::Existential => {
                (0..self.tout.width()).all(|i| (0..t.width()).any(|j| self.related(i, &mut lazy, j, rel)))
            }
        }
    }

    /// For each output column, whether some column of `t` relates to it.
    pub(crate) fn covered(&self, t: &Table, rel: ColRel) -> Vec<bool> {
        let mut lazy = LazyCanon::new(t);
        (0..self.tout.width()).map(|i| (0..t.width()).any(|j| self.related(i, &mut lazy, j, rel))).collect()
    }

    /// `(↦, rel)` on `t`, given the output columns already covered elsewhere
    /// and checking only columns `cols` of `t` for the rest.
    pub(crate) fn covers_rest(&self, t: &Table, rel: ColRel, covered: &[bool], cols: Range<usize>) -> bool {
        let mut lazy = LazyCanon::new(t);
        (0..self.tout.width()).all(|i| covered[i] || cols.clone().any(|j| self.related(i, &mut lazy, j, rel)))
    }

    pub(crate) fn matches(&self, t: &Table, rel: ColRel) -> Vec<Vec<usize>> {
        let mut lazy = LazyCanon::new(t);
        (0..self.tout.width())
            .map(|i| (0..t.width()).filter(|&j| self.related(i, &mut lazy, j, rel)).collect())
            .collect()
    }
}

/// Whether `phi(tout, t)` holds.
pub fn phi_holds(phi: Phi, tout: &Table, t: &Table) -> bool {
    OutputIndex::new(tout).holds(phi, t)
}

/// For each output column `i`, the indices `j` of `t` with `rel(tout[i], t[j])`.
pub fn column_matches(tout: &Table, t: &Table, rel: ColRel) -> Vec<Vec<usize>> {
    OutputIndex::new(tout).matches(t, rel)
}
