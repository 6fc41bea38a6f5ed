use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::{info, warn};

use super::{dfs_search, heuristic_dive, lds_search, CpModel, SearchLimits, SearchOutcome};
use crate::graph::{Graph, StableSet};
use crate::ipm::{
    extract_scores, solve_with_trace, IterationStats, SdpSolution, SdpStatus, SolveOptions, ThetaScores,
};
use crate::relax::build_theta3;
use crate::report::{RunStatus, SearchReport};

/// Which pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Method {
    /// Depth-first search alone.
    #[serde(rename = "cp")]
    Cp,
    /// Relaxation first, then the guided and bounded LDS.
    #[serde(rename = "sdp-cp")]
    SdpCp,
    /// Relaxation only.
    #[serde(rename = "theta")]
    Theta,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Cp, Method::SdpCp, Method::Theta];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cp => "cp",
            Method::SdpCp => "sdp-cp",
            Method::Theta => "theta",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method `{s}` (expected cp, sdp-cp or theta)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    /// Name carried into the report.
    pub instance: String,
    /// `None` searches every wave.
    pub max_discrepancy: Option<usize>,
    /// Wall-clock budget for the whole run, relaxation included.
    pub time_limit: Option<Duration>,
    pub seed: u64,
    /// The relaxation is solved to a 1e-8 relative gap by default, so that
    /// the floored bound stays exact for integer optima up to about 100.
    pub sdp: SolveOptions,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            instance: String::new(),
            max_discrepancy: None,
            time_limit: Some(Duration::from_secs(1000)),
            seed: 0,
            sdp: SolveOptions::new(1e-8, 100),
        }
    }
}

/// A finished run: the report plus the objects behind it.
#[derive(Debug, Clone)]
pub struct Solved {
    pub report: SearchReport,
    pub best: Option<StableSet>,
    pub search: Option<SearchOutcome>,
    pub sdp: Option<SdpSolution>,
}

type Trace<'a> = &'a mut dyn FnMut(&IterationStats);

/// Runs `method` on `g`.
pub fn run(g: &Graph, method: Method, config: &SolveConfig) -> Solved {
    run_traced(g, method, config, &mut |_| {})
}

/// Like [`run`], passing every interior-point iteration to `trace`.
pub fn run_traced(g: &Graph, method: Method, config: &SolveConfig, trace: Trace<'_>) -> Solved {
    match method {
        Method::Cp => solve_cp(g, config),
        Method::SdpCp => hybrid(g, config, trace),
        Method::Theta => theta_only(g, config, trace),
    }
}

fn remaining(limit: Option<Duration>, start: Instant) -> Option<Duration> {
    limit.map(|l| l.saturating_sub(start.elapsed()))
}

fn search_status(out: &SearchOutcome) -> RunStatus {
    if out.proven {
        RunStatus::Optimal
    } else {
        RunStatus::TimeLimit
    }
}

/// Depth-first search without a relaxation.
pub fn solve_cp(g: &Graph, config: &SolveConfig) -> Solved {
    let start = Instant::now();
    let model = CpModel::new(g.clone());
    let out = dfs_search(&model, &SearchLimits { time_limit: config.time_limit, propagate: true });
    info!("cp: value {:?} after {} backtracks", out.best_value(), out.backtracks);
    let mut report = SearchReport::for_graph(&config.instance, g, Method::Cp, config.seed);
    report.fill_search(&out);
    report.status = search_status(&out);
    report.total_time = start.elapsed().as_secs_f64();
    Solved {
        report,
        best: out.best.clone(),
        search: Some(out),
        sdp: None,
    }
}

/// The θ reported for a solve. Upper bound valid for every feasible point of
/// the trace-one relaxation:
/// `tr(CX) = bᵀy − tr(ZX) <= bᵀy − λmin(Z)` whenever `tr X = 1`, for any `y`
/// with `Z = A*(y) − C`.
fn certified_bound(sol: &SdpSolution) -> f64 {
    sol.dual_value + (-sol.min_eigenvalue_z()).max(0.0)
}

fn relax(g: &Graph, opts: &SolveOptions, trace: Trace<'_>) -> Option<(SdpSolution, ThetaScores)> {
    let p = build_theta3(g).expect("graph weights are nonnegative");
    let sol = solve_with_trace(&p, opts, trace);
    info!(
        "relaxation: status {:?}, theta {:.9}, {} iterations",
        sol.status, sol.primal_value, sol.iterations
    );
    if sol.status == SdpStatus::NumericalFailure {
        warn!("relaxation failed: {}", sol.diagnostic.as_deref().unwrap_or("no diagnostic"));
        return None;
    }
    let scores = extract_scores(&sol, &p).ok()?;
    Some((sol, scores))
}

/// Relaxation only: reports θ and no stable set.
pub fn solve_theta(g: &Graph, config: &SolveConfig) -> Solved {
    theta_only(g, config, &mut |_| {})
}

fn theta_only(g: &Graph, config: &SolveConfig, trace: Trace<'_>) -> Solved {
    let start = Instant::now();
    let mut report = SearchReport::for_graph(&config.instance, g, Method::Theta, config.seed);
    let p = build_theta3(g).expect("graph weights are nonnegative");
    let sol = solve_with_trace(&p, &config.sdp, trace);
    report.sdp_time = Some(start.elapsed().as_secs_f64());
    report.status = match sol.status {
        SdpStatus::Optimal => RunStatus::Optimal,
        SdpStatus::MaxIterations => RunStatus::TimeLimit,
        SdpStatus::NumericalFailure => RunStatus::Degraded,
    };
    if sol.status != SdpStatus::NumericalFailure {
        report.theta = Some(certified_bound(&sol));
    }
    report.total_time = start.elapsed().as_secs_f64();
    Solved {
        report,
        best: None,
        search: None,
        sdp: Some(sol),
    }
}

/// The guided search: relaxation, bound, `n` dives, then LDS from the best
/// dive. A failed relaxation degrades to plain DFS.
pub fn solve_hybrid(g: &Graph, config: &SolveConfig) -> Solved {
    hybrid(g, config, &mut |_| {})
}

fn hybrid(g: &Graph, config: &SolveConfig, trace: Trace<'_>) -> Solved {
    let start = Instant::now();
    let mut report = SearchReport::for_graph(&config.instance, g, Method::SdpCp, config.seed);
    let relaxed = relax(g, &config.sdp, trace);
    report.sdp_time = Some(start.elapsed().as_secs_f64());

    let Some((sol, scores)) = relaxed else {
        let model = CpModel::new(g.clone());
        let limits = SearchLimits {
            time_limit: remaining(config.time_limit, start),
            propagate: true,
        };
        let out = dfs_search(&model, &limits);
        report.fill_search(&out);
        report.status = RunStatus::Degraded;
        report.total_time = start.elapsed().as_secs_f64();
        return Solved {
            report,
            best: out.best.clone(),
            search: Some(out),
            sdp: None,
        };
    };

    let bound = certified_bound(&sol);
    report.theta = Some(bound);
    let model = CpModel::new(g.clone()).with_upper_bound(bound);
    let (dive, path) = heuristic_dive(&model, &scores, config.seed);
    info!("dive: value {}", dive.value);
    let limits = SearchLimits {
        time_limit: remaining(config.time_limit, start),
        propagate: true,
    };
    let out = lds_search(&model, &path, config.max_discrepancy, Some(dive), &limits);
    info!(
        "lds: value {:?} at discrepancy {:?}, {} backtracks, proven {}",
        out.best_value(),
        out.best_discrepancy,
        out.backtracks,
        out.proven
    );
    report.fill_search(&out);
    report.status = search_status(&out);
    report.total_time = start.elapsed().as_secs_f64();
    Solved {
        report,
        best: out.best.clone(),
        search: Some(out),
        sdp: Some(sol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> SolveConfig {
        SolveConfig {
            instance: "t".into(),
            ..SolveConfig::default()
        }
    }

    #[test]
    fn empty_graph_is_proven_by_the_bound() {
        let solved = solve_hybrid(&Graph::empty(7), &config());
        let r = &solved.report;
        assert_eq!(r.alpha_found, Some(7.0));
        assert!(r.proven);
        assert_eq!(r.backtracks, 0);
        assert_eq!(r.best_discrepancy, Some(0));
        assert_eq!(r.status, RunStatus::Optimal);
        assert!((r.theta.unwrap() - 7.0).abs() < 1e-5);
    }

    #[test]
    fn cp_never_runs_the_relaxation() {
        let solved = solve_cp(&Graph::cycle(7), &config());
        assert_eq!(solved.report.sdp_time, None);
        assert_eq!(solved.report.theta, None);
        assert_eq!(solved.report.alpha_found, Some(3.0));
        assert!(solved.sdp.is_none());
    }

    #[test]
    fn theta_only_reports_no_alpha() {
        let solved = solve_theta(&Graph::cycle(5), &config());
        assert_eq!(solved.report.alpha_found, None);
        assert!(!solved.report.proven);
        assert!((solved.report.theta.unwrap() - 5f64.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn weighted_hybrid() {
        let g = Graph::cycle(5).with_weights(vec![3.0, 1.0, 4.0, 1.0, 5.0]).unwrap();
        let solved = solve_hybrid(&g, &config());
        assert_eq!(solved.report.alpha_found, Some(9.0));
        assert!(solved.report.proven);
        assert!(g.is_stable(&solved.best.unwrap().members));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>(), Ok(m));
        }
        assert!("dfs".parse::<Method>().is_err());
    }
}
