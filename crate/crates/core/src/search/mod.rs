//! Constraint-programming search over the binary stable-set model.
//!
//! Variables `x_i ∈ {0,1}` with `x_i + x_j <= 1` per edge, maximizing
//! `Σ w_i x_i`. Propagation fixes the neighbors of a vertex set to 1, and a
//! node is pruned once `fixed + free` weight cannot beat the incumbent or the
//! incumbent meets the relaxation bound.

mod dfs;
mod heuristic;
mod hybrid;
mod lds;
mod state;

use std::time::{Duration, Instant};

use crate::graph::{Graph, StableSet};

pub use dfs::dfs_search;
pub use heuristic::{compute_heuristic, heuristic_dive, HeuristicPath};
pub use hybrid::{run, run_traced, solve_cp, solve_hybrid, solve_theta, Method, SolveConfig, Solved};
pub use lds::lds_search;
pub use state::{Domain, Propagation, SearchState};

/// Slack used when comparing the incumbent with a relaxation bound.
pub const BOUND_EPS: f64 = 1e-6;

/// The search model: a graph plus an optional upper bound on its optimum.
#[derive(Debug, Clone)]
pub struct CpModel {
    graph: Graph,
    upper_bound: Option<f64>,
}

impl CpModel {
    pub fn new(graph: Graph) -> Self {
        CpModel {
            graph,
            upper_bound: None,
        }
    }

    pub fn with_upper_bound(mut self, bound: f64) -> Self {
        self.upper_bound = Some(bound);
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn upper_bound(&self) -> Option<f64> {
        self.upper_bound
    }

    /// Incumbent value at which optimality is proven. With integer weights
    /// the optimum is an integer, so the bound is floored.
    pub fn bound_target(&self) -> Option<f64> {
        let ub = self.upper_bound?;
        Some(if self.graph.has_integer_weights() {
            (ub + BOUND_EPS).floor()
        } else {
            ub - BOUND_EPS
        })
    }
}

/// Limits shared by the searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchLimits {
    pub time_limit: Option<Duration>,
    /// Turns off propagation and pruning, so every 0/1 assignment is a leaf.
    /// Only useful for inspecting the shape of the tree.
    pub propagate: bool,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            time_limit: None,
            propagate: true,
        }
    }
}

impl SearchLimits {
    pub fn with_time_limit(time_limit: Duration) -> Self {
        SearchLimits {
            time_limit: Some(time_limit),
            ..Self::default()
        }
    }
}

/// What a search found and how far it got.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: Option<StableSet>,
    pub backtracks: u64,
    pub nodes: u64,
    /// The whole tree was explored (up to pruning).
    pub complete: bool,
    /// The best value is optimal: either the tree is exhausted or the
    /// incumbent meets the bound.
    pub proven: bool,
    pub timed_out: bool,
    /// Wave in which the best solution was found; `None` for DFS.
    pub best_discrepancy: Option<usize>,
    /// Leaves reached per wave (LDS only).
    pub leaves_per_wave: Vec<u64>,
    pub elapsed: Duration,
}

impl SearchOutcome {
    pub fn best_value(&self) -> Option<f64> {
        self.best.as_ref().map(|s| s.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stop {
    Proven,
    Timeout,
}

/// Node counter that looks at the wall clock every 1024 nodes.
#[derive(Debug)]
struct Clock {
    start: Instant,
    limit: Option<Duration>,
    nodes: u64,
}

impl Clock {
    fn new(limit: Option<Duration>) -> Self {
        Clock {
            start: Instant::now(),
            limit,
            nodes: 0,
        }
    }

    /// Counts a node and reports whether time is up.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        match self.limit {
            Some(limit) if self.nodes % 1024 == 0 => self.start.elapsed() >= limit,
            _ => false,
        }
    }
}

/// Records the leaf of `st` as a candidate; with propagation off the leaf
/// may not be stable and is checked first.
fn record_leaf(st: &mut SearchState<'_>) -> bool {
    let set = st.current_set();
    if !st.propagation_enabled() && !st.model().graph().is_stable(&set.members) {
        return false;
    }
    st.offer(set)
}
