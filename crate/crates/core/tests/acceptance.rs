//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Pass criterion numbers as arguments to run a subset:
//! `cargo test -p theta-guide-core --test acceptance -- 1 5`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use theta_guide::dimacs::parse_dimacs;
use theta_guide::search::{dfs_search, CpModel, SearchLimits};
use theta_guide::{
    brute_force_alpha, build_theta1, build_theta3, random_graph, solve, solve_cp, solve_hybrid,
    Graph, RunStatus, SdpProblem, SdpSolution, SolveConfig,
};

type Outcome = Result<String, String>;

/// Clique instances and their clique numbers.
const DIMACS: [(&str, f64); 5] = [
    ("hamming6-2", 32.0),
    ("hamming6-4", 4.0),
    ("johnson8-2-4", 4.0),
    ("johnson8-4-4", 14.0),
    ("MANN_a9", 16.0),
];

const GAP_TOL: f64 = 1e-6;
const FEAS_TOL: f64 = 1e-7;
const PSD_TOL: f64 = 1e-7;

fn check(ok: bool, failures: &mut Vec<String>, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

fn verdict(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {}", summary, failures.join("; ")))
    }
}

fn full_budget() -> SolveConfig {
    SolveConfig {
        max_discrepancy: None,
        time_limit: Some(Duration::from_secs(1000)),
        seed: 0,
        ..SolveConfig::default()
    }
}

fn dimacs_original(name: &str) -> Graph {
    let path = common::data_dir().join(format!("{name}.clq"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_dimacs(&text).unwrap().graph
}

struct DimacsRun {
    name: &'static str,
    expected: f64,
    original: Graph,
    solved: theta_guide::Solved,
}

/// Criterion-1 runs, shared with the certificate and determinism checks.
fn dimacs_runs() -> &'static [DimacsRun] {
    static RUNS: OnceLock<Vec<DimacsRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        DIMACS
            .iter()
            .map(|&(name, expected)| {
                let original = dimacs_original(name);
                let config = SolveConfig {
                    instance: name.to_string(),
                    ..full_budget()
                };
                let solved = solve_hybrid(&original.complement(), &config);
                DimacsRun {
                    name,
                    expected,
                    original,
                    solved,
                }
            })
            .collect()
    })
}

/// Thirty small random graphs spread over the density range, every third one
/// weighted.
fn sandwich_graphs() -> Vec<Graph> {
    (0..30u64)
        .map(|k| {
            let n = 8 + (k as usize % 13);
            let density = 0.05 + 0.9 * (k as f64 / 29.0);
            random_graph(n, density, k % 3 == 2, 1000 + k).unwrap()
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    let mut found = Vec::new();
    for run in dimacs_runs() {
        let r = &run.solved.report;
        let best = run.solved.best.as_ref().expect("a clique");
        found.push(format!("{}={}", run.name, r.alpha_found.unwrap_or(-1.0)));
        check(r.alpha_found == Some(run.expected), &mut failures, || {
            format!("{}: found {:?}, expected {}", run.name, r.alpha_found, run.expected)
        });
        check(r.proven && r.status == RunStatus::Optimal, &mut failures, || {
            format!("{}: not proven ({:?})", run.name, r.status)
        });
        check(
            common::is_clique(&run.original, &best.members) && best.members.len() as f64 == best.value,
            &mut failures,
            || format!("{}: returned set is not a clique of the original graph", run.name),
        );
    }
    verdict(failures, found.join(" "))
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_margin = f64::INFINITY;
    for run in dimacs_runs() {
        // α is the clique number of the original graph, too large to
        // enumerate; the proven optimum from criterion 1 stands in.
        let theta = run.solved.sdp.as_ref().expect("relaxation ran").primal_value;
        worst_margin = worst_margin.min(theta + 1e-5 - run.expected);
        check(run.expected <= theta + 1e-5, &mut failures, || {
            format!("{}: alpha {} > theta {theta}", run.name, run.expected)
        });
    }
    let opts = full_budget().sdp;
    for (k, g) in sandwich_graphs().iter().enumerate() {
        let a = common::alpha(g);
        let lib = brute_force_alpha(g).unwrap().value;
        let theta = solve(&build_theta3(g).unwrap(), &opts).primal_value;
        worst_margin = worst_margin.min(theta + 1e-5 - a);
        check(a == lib, &mut failures, || format!("graph {k}: oracles disagree ({a} vs {lib})"));
        check(a <= theta + 1e-5, &mut failures, || format!("graph {k}: alpha {a} > theta {theta}"));
    }
    verdict(failures, format!("35 instances, smallest margin θ+1e-5−α = {worst_margin:.3e}"))
}

/// Fifty small graphs for the oracle comparison, alternating weights.
fn oracle_graphs() -> Vec<Graph> {
    (0..50u64)
        .map(|k| {
            let n = 6 + (k as usize % 10);
            let density = 0.05 + 0.9 * ((k * 7 % 50) as f64 / 49.0);
            random_graph(n, density, k % 2 == 1, 2000 + k).unwrap()
        })
        .collect()
}

fn oracle_reports() -> &'static Vec<(String, String)> {
    static REPORTS: OnceLock<Vec<(String, String)>> = OnceLock::new();
    REPORTS.get_or_init(oracle_json)
}

/// JSON of the cp and sdp-cp reports for every oracle graph, timings removed.
fn oracle_json() -> Vec<(String, String)> {
    oracle_graphs()
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let config = SolveConfig {
                instance: format!("oracle{k}"),
                ..full_budget()
            };
            (
                solve_cp(g, &config).report.without_timings().to_json(),
                solve_hybrid(g, &config).report.without_timings().to_json(),
            )
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let graphs = oracle_graphs();
    for (k, g) in graphs.iter().enumerate() {
        let expected = common::alpha(g);
        let config = SolveConfig {
            instance: format!("oracle{k}"),
            ..full_budget()
        };
        let dfs = dfs_search(&CpModel::new(g.clone()), &SearchLimits::default());
        let hybrid = solve_hybrid(g, &config);
        let lib = brute_force_alpha(g).unwrap().value;
        for (label, value, set) in [
            ("dfs", dfs.best_value(), dfs.best.as_ref()),
            ("lds", hybrid.report.alpha_found, hybrid.best.as_ref()),
        ] {
            check(value == Some(expected), &mut failures, || {
                format!("graph {k}: {label} found {value:?}, expected {expected}")
            });
            check(set.is_some_and(|s| common::is_stable(g, &s.members)), &mut failures, || {
                format!("graph {k}: {label} returned a non-stable set")
            });
        }
        check(hybrid.report.proven, &mut failures, || format!("graph {k}: lds not proven"));
        check(lib == expected, &mut failures, || format!("graph {k}: brute force {lib} vs {expected}"));
    }
    let _ = oracle_reports();
    let elapsed = start.elapsed();
    check(elapsed <= Duration::from_secs(300), &mut failures, || {
        format!("took {:.1}s, over 5 minutes", elapsed.as_secs_f64())
    });
    verdict(
        failures,
        format!("{} graphs, three-way agreement in {:.1}s", graphs.len(), elapsed.as_secs_f64()),
    )
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let opts = full_budget().sdp;
    let mut worst = 0.0f64;
    for k in 0..20u64 {
        let n = 4 + (k as usize % 9);
        let density = 0.1 + 0.8 * (k as f64 / 19.0);
        let g = random_graph(n, density, k % 2 == 0, 3000 + k).unwrap();
        let t1 = solve(&build_theta1(&g), &opts).primal_value;
        let t3 = solve(&build_theta3(&g).unwrap(), &opts).primal_value;
        let scaled = (t1 - t3).abs() / (1.0 + t3);
        worst = worst.max(scaled);
        check(scaled <= 1e-5, &mut failures, || format!("graph {k}: {t1} vs {t3}"));
    }
    verdict(failures, format!("20 graphs, worst |θ1−θ3|/(1+θ) = {worst:.2e}"))
}

fn theta_of(g: &Graph) -> f64 {
    solve(&build_theta3(g).unwrap(), &full_budget().sdp).primal_value
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    for n in 2..=10 {
        let t = theta_of(&Graph::empty(n));
        check((t - n as f64).abs() <= 1e-5, &mut failures, || format!("empty {n}: {t}"));
        let t = theta_of(&Graph::complete(n));
        check((t - 1.0).abs() <= 1e-5, &mut failures, || format!("K{n}: {t}"));
    }
    let c5 = Graph::cycle(5);
    let t = theta_of(&c5);
    check((t - 5f64.sqrt()).abs() <= 1e-4, &mut failures, || format!("C5: {t}"));
    check(common::alpha(&c5) <= t, &mut failures, || "C5: sandwich violated".into());
    verdict(failures, format!("empty and complete graphs n=2..10, θ(C5) = {t:.9}"))
}

fn certificate_failures(label: &str, p: &SdpProblem, sol: &SdpSolution, failures: &mut Vec<String>) -> [f64; 4] {
    let gap = sol.relative_gap();
    let violation = sol.max_scaled_violation(p);
    let (ex, ez) = (sol.min_eigenvalue_x(), sol.min_eigenvalue_z());
    check(gap <= GAP_TOL, failures, || format!("{label}: gap {gap:.2e}"));
    check(violation <= FEAS_TOL, failures, || format!("{label}: residual {violation:.2e}"));
    check(ex >= -PSD_TOL, failures, || format!("{label}: λmin(X) {ex:.2e}"));
    check(ez >= -PSD_TOL, failures, || format!("{label}: λmin(Z) {ez:.2e}"));
    [gap, violation, -ex, -ez]
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = [0.0f64; 4];
    let mut note = |w: [f64; 4]| {
        for (a, b) in worst.iter_mut().zip(w) {
            *a = a.max(b);
        }
    };
    for run in dimacs_runs() {
        let p = build_theta3(&run.original.complement()).unwrap();
        let sol = run.solved.sdp.as_ref().expect("relaxation ran");
        note(certificate_failures(run.name, &p, sol, &mut failures));
    }
    let opts = full_budget().sdp;
    for (k, g) in sandwich_graphs().iter().enumerate() {
        let p = build_theta3(g).unwrap();
        let sol = solve(&p, &opts);
        note(certificate_failures(&format!("graph {k}"), &p, &sol, &mut failures));
    }
    verdict(
        failures,
        format!(
            "worst gap {:.1e}, residual {:.1e}, -λmin(X) {:.1e}, -λmin(Z) {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut curve = Vec::new();
    let mut failures = Vec::new();
    for step in 0..10 {
        let density = 0.05 + 0.1 * step as f64;
        let mut total = 0u64;
        for seed in 0..5 {
            let g = random_graph(40, density, false, 4000 + seed).unwrap();
            let out = dfs_search(&CpModel::new(g), &SearchLimits::with_time_limit(Duration::from_secs(600)));
            check(out.proven, &mut failures, || format!("d={density:.2} seed {seed}: unfinished"));
            total += out.backtracks;
        }
        curve.push((density, total as f64 / 5.0));
    }
    let (peak, _) = curve
        .iter()
        .copied()
        .fold((0.0, f64::NEG_INFINITY), |best, (d, b)| if b > best.1 { (d, b) } else { best });
    check(peak <= 0.35 + 1e-9, &mut failures, || format!("peak at density {peak:.2}"));
    let shape: Vec<String> = curve.iter().map(|(d, b)| format!("{d:.2}:{b:.0}")).collect();
    verdict(failures, format!("peak at {peak:.2}; mean backtracks {}", shape.join(" ")))
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for k in 0..10u64 {
        let density = [0.05, 0.10, 0.15][k as usize % 3];
        let g = random_graph(60, density, false, 5000 + k).unwrap();
        let config = SolveConfig {
            instance: format!("g60s{k}"),
            time_limit: Some(Duration::from_secs(60)),
            seed: k,
            ..SolveConfig::default()
        };
        let cp = solve_cp(&g, &config).report.alpha_found.unwrap_or(0.0);
        let hybrid = solve_hybrid(&g, &config).report.alpha_found.unwrap_or(0.0);
        rows.push(format!("{hybrid}/{cp}"));
        check(hybrid >= cp, &mut failures, || format!("graph {k} (d={density}): sdp-cp {hybrid} < cp {cp}"));
    }
    verdict(failures, format!("sdp-cp/cp incumbents {}", rows.join(" ")))
}

fn criterion_9() -> Outcome {
    let mut failures = Vec::new();
    for run in dimacs_runs() {
        let config = SolveConfig {
            instance: run.name.to_string(),
            ..full_budget()
        };
        let again = solve_hybrid(&run.original.complement(), &config);
        let a = run.solved.report.without_timings().to_json();
        let b = again.report.without_timings().to_json();
        check(a == b, &mut failures, || format!("{}: reports differ", run.name));
    }
    let first = oracle_reports();
    let second = oracle_json();
    let differing = first.iter().zip(&second).filter(|(a, b)| a != b).count();
    check(differing == 0, &mut failures, || format!("{differing} oracle graphs differ"));
    verdict(failures, format!("{} reports compared byte for byte", 5 + 2 * first.len()))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "DIMACS optima", criterion_1),
        (2, "sandwich soundness", criterion_2),
        (3, "oracle equivalence", criterion_3),
        (4, "theta formulations agree", criterion_4),
        (5, "analytic theta values", criterion_5),
        (6, "SDP certificates", criterion_6),
        (7, "density curve", criterion_7),
        (8, "hybrid dominance at low density", criterion_8),
        (9, "determinism", criterion_9),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, title, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} PASS  {title}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} FAIL  {title}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
