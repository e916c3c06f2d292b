//! Sketches: programs whose arguments are holes, plus size-ordered expansion.
//!
//! Expansion inserts an operator above a `Table(□)` leaf. Parent-child pairs
//! are filtered by a fixed matrix that keeps sketches in a normal form: Order
//! only at the root, Distinct only at the root or under Order, Project only
//! under Order/Distinct, and no Select directly above Select or Join.

use alloc::boxed::Box;
use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use crate::program::{OpKind, Program};

/// A sketch. Operator arguments are implicit holes; table leaves are either
/// unassigned (`Hole`, rendered `Table(□)`) or named.
///
/// Variant order matters: it is the derived `Ord` used to canonicalise the
/// children of a symmetric `Join`, and keeps named tables last.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sketch {
    Hole,
    Order(Box<Sketch>),
    Distinct(Box<Sketch>),
    Project(Box<Sketch>),
    Select(Box<Sketch>),
    Group(Box<Sketch>),
    Window(Box<Sketch>),
    Join(Box<Sketch>, Box<Sketch>),
    LeftJoin(Box<Sketch>, Box<Sketch>),
    Table(Arc<str>),
}

/// Whether `child` may appear directly below `parent`. `None` is a table leaf.
pub fn allowed(parent: OpKind, child: Option<OpKind>) -> bool {
    use OpKind::*;
    let Some(child) = child else {
        return true;
    };
    match parent {
        Order => child != Order,
        Distinct => !matches!(child, Order | Distinct),
        Project | Group | Window | LeftJoin => !matches!(child, Order | Distinct | Project),
        Select | Join => !matches!(child, Order | Distinct | Project | Select),
    }
}

impl Sketch {
    pub fn unary(kind: OpKind, child: Sketch) -> Sketch {
        let c = Box::new(child);
        match kind {
            OpKind::Order => Sketch::Order(c),
            OpKind::Distinct => Sketch::Distinct(c),
            OpKind::Project => Sketch::Project(c),
            OpKind::Select => Sketch::Select(c),
            OpKind::Group => Sketch::Group(c),
            OpKind::Window => Sketch::Window(c),
            OpKind::Join => Sketch::Join(c, Box::new(Sketch::Hole)),
            OpKind::LeftJoin => Sketch::LeftJoin(c, Box::new(Sketch::Hole)),
        }
    }

    /// The constructor `kind` with fresh `Table(□)` children.
    pub fn fresh(kind: OpKind) -> Sketch {
        Sketch::unary(kind, Sketch::Hole)
    }

    pub fn kind(&self) -> Option<OpKind> {
        Some(match self {
            Sketch::Hole | Sketch::Table(_) => return None,
            Sketch::Order(_) => OpKind::Order,
            Sketch::Distinct(_) => OpKind::Distinct,
            Sketch::Project(_) => OpKind::Project,
            Sketch::Select(_) => OpKind::Select,
            Sketch::Group(_) => OpKind::Group,
            Sketch::Window(_) => OpKind::Window,
            Sketch::Join(..) => OpKind::Join,
            Sketch::LeftJoin(..) => OpKind::LeftJoin,
        })
    }

    pub fn children(&self) -> Vec<&Sketch> {
        match self {
            Sketch::Hole | Sketch::Table(_) => vec![],
            Sketch::Order(c)
            | Sketch::Distinct(c)
            | Sketch::Project(c)
            | Sketch::Select(c)
            | Sketch::Group(c)
            | Sketch::Window(c) => vec![c],
            Sketch::Join(l, r) | Sketch::LeftJoin(l, r) => vec![l, r],
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Sketch> {
        match self {
            Sketch::Hole | Sketch::Table(_) => vec![],
            Sketch::Order(c)
            | Sketch::Distinct(c)
            | Sketch::Project(c)
            | Sketch::Select(c)
            | Sketch::Group(c)
            | Sketch::Window(c) => vec![c],
            Sketch::Join(l, r) | Sketch::LeftJoin(l, r) => vec![l, r],
        }
    }

    pub fn size(&self) -> usize {
        self.kind().map_or(0, OpKind::size) + self.children().into_iter().map(Sketch::size).sum::<usize>()
    }

    /// Operator levels between this node and its deepest leaf or hole.
    pub fn height(&self) -> usize {
        match self.kind() {
            None => 0,
            Some(_) => 1 + self.children().into_iter().map(Sketch::height).max().unwrap_or(0),
        }
    }

    /// Summed height of the subtrees under every `Select`; zero when all
    /// selections apply directly to table leaves.
    pub fn select_depth(&self) -> usize {
        let own = match self {
            Sketch::Select(c) => c.height(),
            _ => 0,
        };
        own + self.children().into_iter().map(Sketch::select_depth).sum::<usize>()
    }

    pub fn holes(&self) -> usize {
        match self {
            Sketch::Hole => 1,
            _ => self.children().into_iter().map(Sketch::holes).sum(),
        }
    }

    pub fn contains(&self, kind: OpKind) -> bool {
        self.kind() == Some(kind) || self.children().into_iter().any(|c| c.contains(kind))
    }

    /// Whether a `Project` sits directly below the (optional) Order/Distinct prefix.
    pub fn has_root_project(&self) -> bool {
        match self {
            Sketch::Order(c) | Sketch::Distinct(c) => c.has_root_project(),
            Sketch::Project(_) => true,
            _ => false,
        }
    }

    /// Whether every parent-child pair is permitted by the matrix.
    pub fn satisfies_matrix(&self) -> bool {
        match self.kind() {
            None => true,
            Some(k) => self.children().into_iter().all(|c| allowed(k, c.kind()) && c.satisfies_matrix()),
        }
    }

    /// Orders the children of every `Join` so that symmetric sketches coincide.
    pub fn canonical(mut self) -> Sketch {
        self.canonicalize();
        self
    }

    fn canonicalize(&mut self) {
        for c in self.children_mut() {
            c.canonicalize();
        }
        if let Sketch::Join(l, r) = self {
            if r < l {
                core::mem::swap(l, r);
            }
        }
    }

    /// Replaces the `n`-th hole (left to right) with `with`, if it is legal there.
    fn replace_hole(&self, n: &mut usize, parent: Option<OpKind>, with: OpKind) -> Option<Option<Sketch>> {
        match self {
            Sketch::Hole => {
                if *n == 0 {
                    *n = usize::MAX;
                    let legal = parent.is_none_or(|p| allowed(p, Some(with)));
                    return Some(legal.then(|| Sketch::fresh(with)));
                }
                *n -= 1;
                None
            }
            Sketch::Table(_) => None,
            _ => {
                let kind = self.kind();
                let mut copy = self.clone();
                for (i, c) in self.children().into_iter().enumerate() {
                    if let Some(result) = c.replace_hole(n, kind, with) {
                        return Some(result.map(|new_child| {
                            *copy.children_mut()[i] = new_child;
                            copy
                        }));
                    }
                }
                None
            }
        }
    }

    /// All sketches obtained by inserting one operator above one `Table(□)`.
    ///
    /// Holes are visited left to right and constructors in [`OpKind::ALL`]
    /// order; results are matrix-legal, canonical, and free of duplicates.
    pub fn expand(&self) -> Vec<Sketch> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for hole in 0..self.holes() {
            for kind in OpKind::ALL {
                let mut n = hole;
                if let Some(Some(s)) = self.replace_hole(&mut n, None, kind) {
                    let s = s.canonical();
                    debug_assert!(s.satisfies_matrix());
                    if seen.insert(s.clone()) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    fn fill(&self, names: &mut impl Iterator<Item = Arc<str>>) -> Sketch {
        match self {
            Sketch::Hole => Sketch::Table(names.next().expect("one name per hole")),
            _ => {
                let mut copy = self.clone();
                let filled: Vec<Sketch> = self.children().into_iter().map(|c| c.fill(names)).collect();
                for (slot, c) in copy.children_mut().into_iter().zip(filled) {
                    *slot = c;
                }
                copy
            }
        }
    }

    /// Every assignment of input names to the holes that uses each input at least once.
    pub fn assign_tables(&self, inputs: &[Arc<str>]) -> Vec<Sketch> {
        let k = self.holes();
        let n = inputs.len();
        if k < n || n == 0 {
            return if k == 0 && n == 0 { vec![self.clone()] } else { vec![] };
        }
        let mut out = Vec::new();
        let mut digits = vec![0usize; k];
        loop {
            let mut used = vec![false; n];
            for &d in &digits {
                used[d] = true;
            }
            if used.iter().all(|&u| u) {
                out.push(self.fill(&mut digits.iter().map(|&d| inputs[d].clone())));
            }
            // Odometer over the k-tuple, rightmost digit fastest.
            let mut i = k;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < n {
                    break;
                }
                digits[i] = 0;
            }
        }
    }

    /// The sketch a program was completed from.
    pub fn of_program(p: &Program) -> Sketch {
        let c = |x: &Program| Box::new(Sketch::of_program(x));
        match p {
            Program::Table(name) => Sketch::Table(name.clone()),
            Program::Order { child, .. } => Sketch::Order(c(child)),
            Program::Distinct { child } => Sketch::Distinct(c(child)),
            Program::Project { child, .. } => Sketch::Project(c(child)),
            Program::Select { child, .. } => Sketch::Select(c(child)),
            Program::Group { child, .. } => Sketch::Group(c(child)),
            Program::Window { child, .. } => Sketch::Window(c(child)),
            Program::Join { left, right, .. } => Sketch::Join(c(left), c(right)),
            Program::LeftJoin { left, right, .. } => Sketch::LeftJoin(c(left), c(right)),
        }
    }
}

impl fmt::Display for Sketch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sketch::Hole => f.write_str("Table(□)"),
            Sketch::Table(name) => write!(f, "Table({name})"),
            Sketch::Order(c) => write!(f, "Order({c}, □)"),
            Sketch::Distinct(c) => write!(f, "Distinct({c})"),
            Sketch::Project(c) => write!(f, "Project({c}, □)"),
            Sketch::Select(c) => write!(f, "Select({c}, □)"),
            Sketch::Group(c) => write!(f, "Group({c}, □, □)"),
            Sketch::Window(c) => write!(f, "Window({c}, □)"),
            Sketch::Join(l, r) => write!(f, "Join({l}, {r}, □)"),
            Sketch::LeftJoin(l, r) => write!(f, "LeftJoin({l}, {r}, □)"),
        }
    }
}

/// Sketches awaiting completion, popped smallest first.
///
/// Among sketches of equal size, those filtering closer to the tables
/// ([`Sketch::select_depth`]) come first, then insertion order.
#[derive(Default)]
pub struct Worklist {
    heap: BinaryHeap<Reverse<(usize, usize, u64, Sketch)>>,
    seq: u64,
}

impl Worklist {
    pub fn new() -> Self {
        Worklist::default()
    }

    pub fn push(&mut self, s: Sketch) {
        let size = s.size();
        let depth = s.select_depth();
        self.heap.push(Reverse((size, depth, self.seq, s)));
        self.seq += 1;
    }

    pub fn push_all(&mut self, sketches: impl IntoIterator<Item = Sketch>) {
        for s in sketches {
            self.push(s);
        }
    }

    /// Removes and returns a minimum-size sketch.
    pub fn pop_min_size(&mut self) -> Option<Sketch> {
        self.heap.pop().map(|Reverse((_, _, _, s))| s)
    }

    pub fn peek_size(&self) -> Option<usize> {
        self.heap.peek().map(|Reverse((size, ..))| *size)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
