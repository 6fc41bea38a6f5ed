//! One row of results per (instance, method), as JSON or CSV.

use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::search::{Method, SearchOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Optimal,
    /// Stopped at a time or discrepancy limit before proving optimality.
    TimeLimit,
    /// The relaxation failed and the run fell back to plain search.
    Degraded,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Optimal => "optimal",
            RunStatus::TimeLimit => "time_limit",
            RunStatus::Degraded => "degraded",
        }
    }

    /// Process exit code for a finished run.
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Optimal => 0,
            RunStatus::TimeLimit => 2,
            RunStatus::Degraded => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    /// Absent for graphs with fewer than two vertices.
    pub density: Option<f64>,
    pub method: Method,
    pub alpha_found: Option<f64>,
    pub proven: bool,
    pub best_discrepancy: Option<usize>,
    /// Seconds spent in the relaxation; absent when it never ran.
    pub sdp_time: Option<f64>,
    pub total_time: f64,
    pub backtracks: u64,
    pub theta: Option<f64>,
    pub seed: u64,
    pub status: RunStatus,
    /// Best stable set found, 1-based.
    pub stable_set: Option<Vec<usize>>,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("row {row}: {message}")]
    Field { row: usize, message: String },
}

/// CSV columns. The first ten follow the layout of the classic result tables;
/// `elapsed` repeats `total_time` so rows that print "limit" there still
/// carry the number.
pub const CSV_COLUMNS: [&str; 16] = [
    "instance",
    "n",
    "m",
    "density",
    "method",
    "alpha",
    "best_discr",
    "sdp_time",
    "total_time",
    "backtracks",
    "theta",
    "proven",
    "status",
    "seed",
    "elapsed",
    "stable_set",
];

impl SearchReport {
    /// Empty report for `g`, filled in by the pipeline.
    pub fn for_graph(instance: &str, g: &Graph, method: Method, seed: u64) -> Self {
        SearchReport {
            instance: instance.to_string(),
            n: g.n(),
            m: g.m(),
            density: g.edge_density().ok(),
            method,
            alpha_found: None,
            proven: false,
            best_discrepancy: None,
            sdp_time: None,
            total_time: 0.0,
            backtracks: 0,
            theta: None,
            seed,
            status: RunStatus::Optimal,
            stable_set: None,
        }
    }

    pub fn fill_search(&mut self, out: &SearchOutcome) {
        self.alpha_found = out.best_value();
        self.proven = out.proven;
        self.best_discrepancy = out.best_discrepancy;
        self.backtracks = out.backtracks;
        self.stable_set = out
            .best
            .as_ref()
            .map(|s| s.members.iter().map(|&v| v + 1).collect());
    }

    /// Copy with wall-clock fields zeroed, for comparing runs.
    pub fn without_timings(&self) -> Self {
        SearchReport {
            sdp_time: self.sdp_time.map(|_| 0.0),
            total_time: 0.0,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn csv_record(&self) -> Vec<String> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(T::to_string).unwrap_or_default()
        }
        let total = if self.status == RunStatus::TimeLimit {
            "limit".to_string()
        } else {
            self.total_time.to_string()
        };
        vec![
            self.instance.clone(),
            self.n.to_string(),
            self.m.to_string(),
            opt(&self.density),
            self.method.to_string(),
            opt(&self.alpha_found),
            opt(&self.best_discrepancy),
            opt(&self.sdp_time),
            total,
            self.backtracks.to_string(),
            opt(&self.theta),
            self.proven.to_string(),
            self.status.as_str().to_string(),
            self.seed.to_string(),
            self.total_time.to_string(),
            self.stable_set
                .as_ref()
                .map(|s| s.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
                .unwrap_or_default(),
        ]
    }

    fn from_csv_record(row: usize, rec: &csv::StringRecord) -> Result<Self, ReportError> {
        let err = |message: String| ReportError::Field { row, message };
        if rec.len() != CSV_COLUMNS.len() {
            return Err(err(format!("expected {} fields, found {}", CSV_COLUMNS.len(), rec.len())));
        }
        let field = |i: usize| &rec[i];
        fn parse<T: std::str::FromStr>(s: &str, name: &str) -> Result<T, String> {
            s.parse().map_err(|_| format!("bad {name} `{s}`"))
        }
        fn parse_opt<T: std::str::FromStr>(s: &str, name: &str) -> Result<Option<T>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse(s, name).map(Some)
            }
        }
        let status = match field(12) {
            "optimal" => RunStatus::Optimal,
            "time_limit" => RunStatus::TimeLimit,
            "degraded" => RunStatus::Degraded,
            other => return Err(err(format!("bad status `{other}`"))),
        };
        let stable_set = match field(15) {
            "" => None,
            s => Some(
                s.split(' ')
                    .map(|v| parse(v, "stable_set"))
                    .collect::<Result<Vec<usize>, _>>()
                    .map_err(err)?,
            ),
        };
        Ok(SearchReport {
            instance: field(0).to_string(),
            n: parse(field(1), "n").map_err(err)?,
            m: parse(field(2), "m").map_err(err)?,
            density: parse_opt(field(3), "density").map_err(err)?,
            method: field(4).parse().map_err(err)?,
            alpha_found: parse_opt(field(5), "alpha").map_err(err)?,
            best_discrepancy: parse_opt(field(6), "best_discr").map_err(err)?,
            sdp_time: parse_opt(field(7), "sdp_time").map_err(err)?,
            backtracks: parse(field(9), "backtracks").map_err(err)?,
            theta: parse_opt(field(10), "theta").map_err(err)?,
            proven: parse(field(11), "proven").map_err(err)?,
            status,
            seed: parse(field(13), "seed").map_err(err)?,
            total_time: parse(field(14), "elapsed").map_err(err)?,
            stable_set,
        })
    }
}

/// Writes a header and one row per report.
pub fn write_csv<W: io::Write>(out: W, reports: &[SearchReport]) -> Result<(), ReportError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Parses the output of [`write_csv`]; lines starting with `#` are skipped.
pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<SearchReport>, ReportError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_COLUMNS) {
        return Err(ReportError::Field {
            row: 0,
            message: "unexpected header".into(),
        });
    }
    r.records()
        .enumerate()
        .map(|(i, rec)| SearchReport::from_csv_record(i + 1, &rec?))
        .collect()
}
