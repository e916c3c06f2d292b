//! Search configuration and time budgets.

/// How `Project` arguments are inferred.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ProjectionMode {
    /// Per-column matches against the output, then their cartesian product.
    #[default]
    Fast,
    /// Every ordered subset of the child's columns.
    Baseline,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub timeout_ms: u64,
    /// Sketches larger than this are never expanded into the worklist.
    pub max_sketch_size: usize,
    pub max_prims_per_clause: usize,
    pub max_clauses: usize,
    pub max_join_pairs: usize,
    /// Upper bound on projection candidates tried per child table.
    pub max_projection_combos: usize,
    pub projection: ProjectionMode,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            timeout_ms: 100_000,
            max_sketch_size: 7,
            max_prims_per_clause: 2,
            max_clauses: 2,
            max_join_pairs: 2,
            max_projection_combos: 100_000,
            projection: ProjectionMode::Fast,
        }
    }
}

/// Milliseconds elapsed since the search started.
pub trait Clock {
    fn elapsed_ms(&self) -> u64;
}

/// A clock that never advances, so no deadline ever passes.
#[derive(Clone, Copy, Debug, Default)]
pub struct Frozen;

impl Clock for Frozen {
    fn elapsed_ms(&self) -> u64 {
        0
    }
}

impl<F: Fn() -> u64> Clock for F {
    fn elapsed_ms(&self) -> u64 {
        self()
    }
}
