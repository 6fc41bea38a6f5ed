use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use theta_guide::report::write_csv;
use theta_guide::{build_theta3, run_traced, IterationStats, Method, SolveConfig};

use crate::input::{instance_name, load_graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// DIMACS graph file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Weight sidecar: one `<vertex> <weight>` line per vertex.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Solve maximum clique by working on the complement graph.
    #[arg(long)]
    pub complement: bool,
    #[arg(long, default_value = "sdp-cp")]
    pub method: Method,
    /// Discrepancy budget: a count, or `full`.
    #[arg(long, default_value = "full", value_parser = parse_discrepancy)]
    pub max_discrepancy: Discrepancy,
    /// Seconds, relaxation included.
    #[arg(long, default_value_t = 1000.0)]
    pub time_limit: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write per-iteration interior-point statistics as CSV.
    #[arg(long)]
    pub sdp_trace: Option<PathBuf>,
    /// Write the relaxation in SDPA sparse format.
    #[arg(long)]
    pub sdpa_out: Option<PathBuf>,
    /// Zero the wall-clock fields, so reports of repeated runs compare equal.
    #[arg(long)]
    pub omit_timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Discrepancy(pub Option<usize>);

pub fn parse_discrepancy(s: &str) -> Result<Discrepancy, String> {
    if s == "full" {
        return Ok(Discrepancy(None));
    }
    s.parse()
        .map(|k| Discrepancy(Some(k)))
        .map_err(|_| format!("expected a count or `full`, got `{s}`"))
}

pub fn time_limit(seconds: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(seconds).with_context(|| format!("invalid time limit {seconds}"))
}

pub fn run(args: SolveArgs) -> Result<u8> {
    let g = load_graph(&args.graph, args.weights.as_deref(), args.complement)?;
    if let Some(path) = &args.sdpa_out {
        let p = build_theta3(&g).context("building the relaxation")?;
        std::fs::write(path, p.to_sdpa()).with_context(|| format!("writing {}", path.display()))?;
    }
    let config = SolveConfig {
        instance: instance_name(&args.graph),
        max_discrepancy: args.max_discrepancy.0,
        time_limit: Some(time_limit(args.time_limit)?),
        seed: args.seed,
        ..SolveConfig::default()
    };

    let mut trace_out = match &args.sdp_trace {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(f);
            writeln!(w, "{}", IterationStats::CSV_HEADER)?;
            Some(w)
        }
        None => None,
    };
    let mut trace_err = None;
    let mut trace = |s: &IterationStats| {
        if let Some(w) = trace_out.as_mut() {
            if let Err(e) = writeln!(w, "{}", s.csv_row()) {
                trace_err.get_or_insert(e);
            }
        }
    };
    let solved = run_traced(&g, args.method, &config, &mut trace);
    if let Some(e) = trace_err {
        return Err(e).context("writing the iteration trace");
    }
    if let Some(mut w) = trace_out {
        w.flush().context("writing the iteration trace")?;
    }

    let mut report = solved.report;
    if args.omit_timings {
        report = report.without_timings();
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match args.format {
        Format::Json => writeln!(out, "{}", report.to_json())?,
        Format::Csv => write_csv(&mut out, std::slice::from_ref(&report))?,
    }
    Ok(report.status.exit_code() as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrepancy_values() {
        assert_eq!(parse_discrepancy("full"), Ok(Discrepancy(None)));
        assert_eq!(parse_discrepancy("3"), Ok(Discrepancy(Some(3))));
        assert!(parse_discrepancy("-1").is_err());
        assert!(parse_discrepancy("all").is_err());
    }

    #[test]
    fn time_limits() {
        assert_eq!(time_limit(1.5).unwrap(), Duration::from_millis(1500));
        assert!(time_limit(-1.0).is_err());
        assert!(time_limit(f64::NAN).is_err());
    }
}
