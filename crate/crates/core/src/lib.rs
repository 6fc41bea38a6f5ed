//! Exact maximum weighted stable set (and maximum clique, via the complement
//! graph) by constraint-programming search that is guided and bounded by the
//! Lovász theta semidefinite relaxation.
//!
//! The pipeline: [`relax::build_theta3`] builds the relaxation,
//! [`ipm::solve`] solves it, [`ipm::extract_scores`] turns the diagonal of
//! the optimal matrix into per-vertex guidance, and [`search`] runs a
//! limited discrepancy search along that guidance with the relaxation value
//! as a bound.

pub mod dimacs;
pub mod graph;
pub mod ipm;
pub mod relax;
pub mod report;
pub mod search;

pub use graph::{brute_force_alpha, random_graph, Graph, GraphError, StableSet};
pub use ipm::{
    extract_scores, solve, IterationStats, SdpSolution, SdpStatus, SolveOptions, ThetaScores,
};
pub use relax::{build_theta1, build_theta3, SdpProblem};
pub use report::{RunStatus, SearchReport};
pub use search::{
    dfs_search, heuristic_dive, lds_search, run, run_traced, solve_cp, solve_hybrid, solve_theta, CpModel,
    HeuristicPath, Method, SearchLimits, SearchOutcome, SolveConfig, Solved,
};
