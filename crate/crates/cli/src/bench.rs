//! Benchmark driver: a TOML manifest of instances and methods, one report per
//! (instance, method), written as CSV in manifest order.
//!
//! ```toml
//! methods = ["cp", "sdp-cp"]   # default for every instance
//! seed = 0
//! max_discrepancy = "full"     # or a count
//!
//! [[instance]]
//! graph = "dimacs/hamming6-2.clq"   # relative to the manifest
//! complement = true
//!
//! [[instance]]
//! generate = { n = 60, density = 0.1, seed = 3 }
//! methods = ["sdp-cp"]
//!
//! [[sweep]]                     # one generated instance per (density, seed)
//! n = 40
//! densities = [0.05, 0.15, 0.25]
//! seeds = [0, 1, 2]
//! ```

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use anyhow::{bail, Context, Result};
use clap::Args;
use log::info;
use serde::Deserialize;
use theta_guide::report::write_csv;
use theta_guide::{random_graph, run as run_method, Graph, Method, SearchReport, SolveConfig};

use crate::gen::instance_stem;
use crate::input::{instance_name, load_graph};
use crate::solve::time_limit;

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// TOML manifest listing instances and methods.
    #[arg(long)]
    pub suite: PathBuf,
    /// Seconds per run; overrides the manifest. Default 1000.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Instances solved in parallel.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub omit_timings: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
enum Budget {
    Count(usize),
    Word(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    #[serde(default)]
    methods: Vec<Method>,
    time_limit: Option<f64>,
    #[serde(default)]
    seed: u64,
    max_discrepancy: Option<Budget>,
    #[serde(default, rename = "instance")]
    instances: Vec<InstanceSpec>,
    #[serde(default, rename = "sweep")]
    sweeps: Vec<SweepSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceSpec {
    name: Option<String>,
    graph: Option<PathBuf>,
    weights: Option<PathBuf>,
    #[serde(default)]
    complement: bool,
    generate: Option<GenSpec>,
    methods: Option<Vec<Method>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenSpec {
    n: usize,
    density: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    weighted: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSpec {
    n: usize,
    densities: Vec<f64>,
    seeds: Vec<u64>,
    #[serde(default)]
    weighted: bool,
    methods: Option<Vec<Method>>,
}

struct Instance {
    name: String,
    graph: Graph,
    methods: Vec<Method>,
}

/// Everything a run needs, resolved before the first solve.
struct Suite {
    instances: Vec<Instance>,
    config: SolveConfig,
}

fn generated(spec: GenSpec) -> Result<(String, Graph)> {
    let g = random_graph(spec.n, spec.density, spec.weighted, spec.seed)?;
    let name = format!("{}s{}", instance_stem(spec.n, spec.density, spec.weighted), spec.seed);
    Ok((name, g))
}

fn load_suite(path: &Path, time_limit_override: Option<f64>) -> Result<Suite> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let manifest: Manifest = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };

    let mut instances = Vec::new();
    let pick_methods = |own: &Option<Vec<Method>>, what: &str| -> Result<Vec<Method>> {
        let methods = own.clone().unwrap_or_else(|| manifest.methods.clone());
        if methods.is_empty() {
            bail!("{what}: no methods given");
        }
        Ok(methods)
    };
    for (k, spec) in manifest.instances.iter().enumerate() {
        let what = format!("instance {}", k + 1);
        let (default_name, graph) = match (&spec.graph, spec.generate) {
            (Some(g), None) => {
                let graph = load_graph(&resolve(g), spec.weights.as_deref().map(resolve).as_deref(), spec.complement)
                    .with_context(|| what.clone())?;
                (instance_name(g), graph)
            }
            (None, Some(gen)) => {
                let (name, graph) = generated(gen).with_context(|| what.clone())?;
                let graph = if spec.complement { graph.complement() } else { graph };
                (name, graph)
            }
            _ => bail!("{what}: give exactly one of `graph` and `generate`"),
        };
        instances.push(Instance {
            name: spec.name.clone().unwrap_or(default_name),
            graph,
            methods: pick_methods(&spec.methods, &what)?,
        });
    }
    for (k, sweep) in manifest.sweeps.iter().enumerate() {
        let what = format!("sweep {}", k + 1);
        let methods = pick_methods(&sweep.methods, &what)?;
        for &density in &sweep.densities {
            for &seed in &sweep.seeds {
                let spec = GenSpec {
                    n: sweep.n,
                    density,
                    seed,
                    weighted: sweep.weighted,
                };
                let (name, graph) = generated(spec).with_context(|| what.clone())?;
                instances.push(Instance {
                    name,
                    graph,
                    methods: methods.clone(),
                });
            }
        }
    }

    let max_discrepancy = match manifest.max_discrepancy {
        None => None,
        Some(Budget::Count(k)) => Some(k),
        Some(Budget::Word(w)) if w == "full" => None,
        Some(Budget::Word(w)) => bail!("max_discrepancy: expected a count or \"full\", got {w:?}"),
    };
    let seconds = time_limit_override.or(manifest.time_limit).unwrap_or(1000.0);
    Ok(Suite {
        instances,
        config: SolveConfig {
            max_discrepancy,
            time_limit: Some(time_limit(seconds)?),
            seed: manifest.seed,
            ..SolveConfig::default()
        },
    })
}

/// Solves every (instance, method) pair on `jobs` threads; reports come back
/// in manifest order whatever the completion order.
fn execute(suite: &Suite, jobs: usize) -> Vec<SearchReport> {
    let tasks: Vec<(usize, Method)> = suite
        .instances
        .iter()
        .enumerate()
        .flat_map(|(i, inst)| inst.methods.iter().map(move |&m| (i, m)))
        .collect();
    let slots: Vec<OnceLock<SearchReport>> = tasks.iter().map(|_| OnceLock::new()).collect();
    let next = AtomicUsize::new(0);
    let worker = || loop {
        let t = next.fetch_add(1, Ordering::Relaxed);
        let Some(&(i, method)) = tasks.get(t) else { break };
        let inst = &suite.instances[i];
        let config = SolveConfig {
            instance: inst.name.clone(),
            ..suite.config.clone()
        };
        let report = run_method(&inst.graph, method, &config).report;
        info!(
            "{} {}: alpha {:?}, {:?}, {:.2}s",
            inst.name, method, report.alpha_found, report.status, report.total_time
        );
        let _ = slots[t].set(report);
    };
    std::thread::scope(|s| {
        for _ in 1..jobs.max(1) {
            s.spawn(worker);
        }
        worker();
    });
    slots.into_iter().map(|s| s.into_inner().expect("every task ran")).collect()
}

/// Per-instance comparison of the best values found by `cp` and `sdp-cp`.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Wins {
    pub compared: usize,
    pub hybrid: usize,
    pub cp: usize,
    pub ties: usize,
}

pub fn count_wins(reports: &[SearchReport]) -> Wins {
    let mut wins = Wins::default();
    let value = |r: &SearchReport| r.alpha_found.unwrap_or(f64::NEG_INFINITY);
    let mut i = 0;
    while i < reports.len() {
        let j = i + reports[i..].iter().take_while(|r| r.instance == reports[i].instance).count();
        let group = &reports[i..j];
        let find = |m: Method| group.iter().find(|r| r.method == m);
        if let (Some(cp), Some(hy)) = (find(Method::Cp), find(Method::SdpCp)) {
            wins.compared += 1;
            match value(hy).total_cmp(&value(cp)) {
                std::cmp::Ordering::Greater => wins.hybrid += 1,
                std::cmp::Ordering::Less => wins.cp += 1,
                std::cmp::Ordering::Equal => wins.ties += 1,
            }
        }
        i = j;
    }
    wins
}

pub fn run(args: BenchArgs) -> Result<()> {
    if args.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let suite = load_suite(&args.suite, args.time_limit)?;
    let mut reports = execute(&suite, args.jobs);
    if args.omit_timings {
        reports = reports.iter().map(SearchReport::without_timings).collect();
    }
    let wins = count_wins(&reports);
    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    write_csv(&mut out, &reports)?;
    writeln!(
        out,
        "# summary: {} instances compared, sdp-cp better on {}, cp better on {}, equal on {}",
        wins.compared, wins.hybrid, wins.cp, wins.ties
    )?;
    out.flush()?;
    Ok(())
}
